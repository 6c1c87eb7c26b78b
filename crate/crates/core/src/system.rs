//! Deterministic and maximum-entropy causal systems.

use std::collections::BTreeSet;
use std::fmt;

use crate::alphabet::{Alphabet, LitSet, Literal};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::loglin::LogLinearModel;
use crate::rule::{CausalRule, Head, WeightedRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    ContradictoryBody,
    AtomOutOfRange,
    AlphabetMismatch,
    NanWeight,
    /// No causal world exists, so knowledge claims hold vacuously.
    InconsistentSystem,
    /// Conditioning event had probability zero.
    ZeroEvidence,
    /// A CPT row was fixed to uniform because its parent assignment is unreachable.
    UnreachableParentRow,
    /// An atom was assigned twice in one intervention.
    RepeatedIntervention,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticKind::ContradictoryBody => "contradictory-body",
            DiagnosticKind::AtomOutOfRange => "atom-out-of-range",
            DiagnosticKind::AlphabetMismatch => "alphabet-mismatch",
            DiagnosticKind::NanWeight => "nan-weight",
            DiagnosticKind::InconsistentSystem => "inconsistent-system",
            DiagnosticKind::ZeroEvidence => "zero-evidence",
            DiagnosticKind::UnreachableParentRow => "unreachable-parent-row",
            DiagnosticKind::RepeatedIntervention => "repeated-intervention",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub location: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, location: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            location: location.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.location)
    }
}

/// A literal causal theory with external premises and observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCausalSystem {
    pub alphabet: Alphabet,
    pub rules: Vec<CausalRule>,
    pub premises: BTreeSet<Literal>,
    pub observations: Vec<Formula>,
}

impl DetCausalSystem {
    pub fn new(alphabet: Alphabet) -> Self {
        DetCausalSystem {
            alphabet,
            rules: Vec::new(),
            premises: BTreeSet::new(),
            observations: Vec::new(),
        }
    }

    pub fn with_rules(mut self, rules: impl IntoIterator<Item = CausalRule>) -> Self {
        self.rules.extend(rules);
        self
    }

    pub fn with_premises(mut self, premises: impl IntoIterator<Item = Literal>) -> Self {
        self.premises.extend(premises);
        self
    }

    pub fn with_observations(mut self, obs: impl IntoIterator<Item = Formula>) -> Self {
        self.observations.extend(obs);
        self
    }

    pub fn premise_set(&self) -> LitSet {
        LitSet::from_literals(&self.premises)
    }

    /// The theory plus a default `l => l` for every premise.
    pub fn explanatory_closure(&self) -> Vec<CausalRule> {
        explanatory_closure(&self.rules, &self.premises)
    }

    /// Atoms with both polarities among the premises.
    pub fn pure_mask(&self) -> u32 {
        let e = self.premise_set();
        e.pos & e.neg
    }

    pub fn observation_formula(&self) -> Formula {
        crate::formula::conjoin(&self.observations)
    }

    /// Fails on the first violated invariant.
    pub fn check(&self) -> Result<()> {
        match validate_det(self).into_iter().next() {
            None => Ok(()),
            Some(d) => Err(Error::InvalidModel(d.to_string())),
        }
    }
}

pub fn explanatory_closure(rules: &[CausalRule], premises: &BTreeSet<Literal>) -> Vec<CausalRule> {
    let mut out = rules.to_vec();
    out.extend(premises.iter().map(|&l| CausalRule::to_lit([l], l)));
    out
}

fn check_rule(alphabet: &Alphabet, rule: &CausalRule, location: String, out: &mut Vec<Diagnostic>) {
    let n = alphabet.len();
    let head_ok = match rule.head {
        Head::Lit(l) => l.atom < n,
        Head::Bottom => true,
    };
    if !head_ok || rule.body().iter().any(|l| l.atom >= n) {
        out.push(Diagnostic::new(DiagnosticKind::AtomOutOfRange, location));
        return;
    }
    if rule.has_contradictory_body() {
        out.push(Diagnostic::new(
            DiagnosticKind::ContradictoryBody,
            format!("{location}: {}", rule.show(alphabet)),
        ));
    }
}

fn check_formula(alphabet: &Alphabet, f: &Formula, location: String, out: &mut Vec<Diagnostic>) {
    if f.max_atom().is_some_and(|a| a >= alphabet.len()) {
        out.push(Diagnostic::new(DiagnosticKind::AtomOutOfRange, location));
    }
}

/// Structural diagnostics; empty when all invariants hold.
pub fn validate_det(sys: &DetCausalSystem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, rule) in sys.rules.iter().enumerate() {
        check_rule(&sys.alphabet, rule, format!("rule {}", i + 1), &mut out);
    }
    for lit in &sys.premises {
        if lit.atom >= sys.alphabet.len() {
            out.push(Diagnostic::new(
                DiagnosticKind::AtomOutOfRange,
                format!("premise on atom index {}", lit.atom),
            ));
        }
    }
    for (i, f) in sys.observations.iter().enumerate() {
        check_formula(&sys.alphabet, f, format!("observation {}", i + 1), &mut out);
    }
    out
}

/// Weighted literal theory, premises, observations and a superordinate
/// LogLinear model over the situations.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntCausalSystem {
    pub alphabet: Alphabet,
    pub rules: Vec<WeightedRule>,
    pub premises: BTreeSet<Literal>,
    pub observations: Vec<Formula>,
    pub sigma: LogLinearModel,
}

impl MaxEntCausalSystem {
    pub fn new(alphabet: Alphabet) -> Self {
        MaxEntCausalSystem {
            sigma: LogLinearModel::new(alphabet.clone()),
            alphabet,
            rules: Vec::new(),
            premises: BTreeSet::new(),
            observations: Vec::new(),
        }
    }

    pub fn with_rules(mut self, rules: impl IntoIterator<Item = WeightedRule>) -> Self {
        self.rules.extend(rules);
        self
    }

    pub fn with_premises(mut self, premises: impl IntoIterator<Item = Literal>) -> Self {
        self.premises.extend(premises);
        self
    }

    pub fn with_observations(mut self, obs: impl IntoIterator<Item = Formula>) -> Self {
        self.observations.extend(obs);
        self
    }

    pub fn with_sigma(mut self, sigma: LogLinearModel) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn premise_set(&self) -> LitSet {
        LitSet::from_literals(&self.premises)
    }

    pub fn pure_mask(&self) -> u32 {
        let e = self.premise_set();
        e.pos & e.neg
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, wr) in self.rules.iter().enumerate() {
            check_rule(
                &self.alphabet,
                &wr.rule,
                format!("rule {}", i + 1),
                &mut out,
            );
        }
        for lit in &self.premises {
            if lit.atom >= self.alphabet.len() {
                out.push(Diagnostic::new(
                    DiagnosticKind::AtomOutOfRange,
                    format!("premise on atom index {}", lit.atom),
                ));
            }
        }
        for (i, f) in self.observations.iter().enumerate() {
            check_formula(
                &self.alphabet,
                f,
                format!("observation {}", i + 1),
                &mut out,
            );
        }
        if self.sigma.alphabet() != &self.alphabet {
            out.push(Diagnostic::new(DiagnosticKind::AlphabetMismatch, "sigma"));
        }
        for (i, (_, f)) in self.sigma.constraints().iter().enumerate() {
            check_formula(&self.alphabet, f, format!("sigma {}", i + 1), &mut out);
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(d) => Err(Error::InvalidModel(d.to_string())),
        }
    }
}
