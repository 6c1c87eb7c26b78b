//! Literal causal rules, optionally weighted.

use std::fmt;

use crate::alphabet::{Alphabet, LitSet, Literal, World};
use crate::error::{Error, Result};
use crate::formula::Formula;

/// A real weight or one of the two infinities. Never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Weight(f64);

impl Weight {
    pub const POS_INF: Weight = Weight(f64::INFINITY);
    pub const NEG_INF: Weight = Weight(f64::NEG_INFINITY);
    pub const ZERO: Weight = Weight(0.0);

    pub fn new(value: f64) -> Result<Weight> {
        if value.is_nan() {
            Err(Error::NanWeight)
        } else {
            Ok(Weight(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Parses a decimal real, `+inf`, `-inf` or `inf`.
    pub fn parse(text: &str) -> Result<Weight> {
        match text.trim() {
            "+inf" | "inf" => Ok(Weight::POS_INF),
            "-inf" => Ok(Weight::NEG_INF),
            t => {
                let lower = t.to_ascii_lowercase();
                if lower.contains("inf") || lower.contains("nan") {
                    return Err(Error::Schema(format!("invalid weight `{t}`")));
                }
                t.parse::<f64>()
                    .map_err(|_| Error::Schema(format!("invalid weight `{t}`")))
                    .and_then(Weight::new)
            }
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            write!(f, "+inf")
        } else if self.is_neg_inf() {
            write!(f, "-inf")
        } else {
            // `{:?}` is the shortest representation that parses back exactly.
            write!(f, "{:?}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Lit(Literal),
    Bottom,
}

impl Head {
    pub fn literal(self) -> Option<Literal> {
        match self {
            Head::Lit(l) => Some(l),
            Head::Bottom => None,
        }
    }
}

/// `b1 & ... & bn => head`. The body is kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CausalRule {
    body: Vec<Literal>,
    pub head: Head,
}

impl CausalRule {
    pub fn new<I: IntoIterator<Item = Literal>>(body: I, head: Head) -> Self {
        let mut body: Vec<Literal> = body.into_iter().collect();
        body.sort();
        body.dedup();
        CausalRule { body, head }
    }

    pub fn to_lit<I: IntoIterator<Item = Literal>>(body: I, head: Literal) -> Self {
        CausalRule::new(body, Head::Lit(head))
    }

    pub fn constraint<I: IntoIterator<Item = Literal>>(body: I) -> Self {
        CausalRule::new(body, Head::Bottom)
    }

    /// `top => lit`.
    pub fn fact(lit: Literal) -> Self {
        CausalRule::new([], Head::Lit(lit))
    }

    pub fn body(&self) -> &[Literal] {
        &self.body
    }

    pub fn body_set(&self) -> LitSet {
        LitSet::from_literals(&self.body)
    }

    pub fn is_constraint(&self) -> bool {
        self.head == Head::Bottom
    }

    pub fn has_contradictory_body(&self) -> bool {
        self.body_set().is_contradictory()
    }

    pub fn body_holds(&self, world: World) -> bool {
        self.body.iter().all(|l| l.holds_in(world))
    }

    /// Truth of the material implication `body -> head` in `world`.
    pub fn implication_holds(&self, world: World) -> bool {
        !self.body_holds(world)
            || match self.head {
                Head::Lit(l) => l.holds_in(world),
                Head::Bottom => false,
            }
    }

    pub fn body_formula(&self) -> Formula {
        Formula::conjunction_of_literals(&self.body)
    }

    /// The material implication as a formula.
    pub fn implication(&self) -> Formula {
        let head = match self.head {
            Head::Lit(l) => Formula::literal(l),
            Head::Bottom => Formula::Bot,
        };
        Formula::implies(self.body_formula(), head)
    }

    /// Atoms mentioned by body or head.
    pub fn atom_mask(&self) -> u32 {
        let mut m = self.body.iter().fold(0u32, |m, l| m | 1 << l.atom);
        if let Head::Lit(l) = self.head {
            m |= 1 << l.atom;
        }
        m
    }

    pub fn show(&self, alphabet: &Alphabet) -> String {
        let body = if self.body.is_empty() {
            "top".to_string()
        } else {
            self.body
                .iter()
                .map(|l| alphabet.show_literal(*l))
                .collect::<Vec<_>>()
                .join(" & ")
        };
        let head = match self.head {
            Head::Lit(l) => alphabet.show_literal(l),
            Head::Bottom => "bot".to_string(),
        };
        format!("{body} => {head}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRule {
    pub weight: Weight,
    pub rule: CausalRule,
}

impl WeightedRule {
    pub fn new(weight: Weight, rule: CausalRule) -> Self {
        WeightedRule { weight, rule }
    }

    pub fn hard(rule: CausalRule) -> Self {
        WeightedRule::new(Weight::POS_INF, rule)
    }
}
