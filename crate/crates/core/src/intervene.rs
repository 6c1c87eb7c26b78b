//! Interventions: rule surgery and do-queries.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::{compress, expand, Alphabet, Literal};
use crate::detsem::{knows_why_with_cap, provides_demonstrations_with_cap, IRRELEVANCE_CAP};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::maxent::{knows_why_prob, SemanticsOptions, WhyAnswer};
use crate::rule::{CausalRule, Head, WeightedRule};
use crate::system::{DetCausalSystem, Diagnostic, DiagnosticKind, MaxEntCausalSystem};

/// Values forced on a set of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InterventionAssignment {
    values: BTreeMap<usize, bool>,
    repeated: BTreeSet<usize>,
}

impl InterventionAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Later assignments to the same atom win; the atom is recorded as repeated.
    pub fn set(&mut self, atom: usize, value: bool) {
        if self.values.insert(atom, value).is_some() {
            self.repeated.insert(atom);
        }
    }

    pub fn from_literals<I: IntoIterator<Item = Literal>>(lits: I) -> Self {
        let mut out = Self::new();
        for l in lits {
            out.set(l.atom, l.positive);
        }
        out
    }

    /// Parses a comma-separated list such as `~sprinkler, rain`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let mut out = Self::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let lit = alphabet.parse_literal(part)?;
            out.set(lit.atom, lit.positive);
        }
        Ok(out)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn atom_mask(&self) -> u32 {
        self.values.keys().fold(0, |m, a| m | 1 << a)
    }

    pub fn literals(&self) -> Vec<Literal> {
        self.values
            .iter()
            .map(|(&a, &v)| Literal::new(a, v))
            .collect()
    }

    pub fn value(&self, atom: usize) -> Option<bool> {
        self.values.get(&atom).copied()
    }

    pub fn diagnostics(&self, alphabet: &Alphabet) -> Vec<Diagnostic> {
        self.repeated
            .iter()
            .map(|&a| {
                Diagnostic::new(
                    DiagnosticKind::RepeatedIntervention,
                    format!(
                        "`{}` assigned more than once; last value kept",
                        alphabet.name(a)
                    ),
                )
            })
            .collect()
    }
}

fn heads_target(rule: &CausalRule, mask: u32) -> bool {
    matches!(rule.head, Head::Lit(l) if mask >> l.atom & 1 == 1)
}

/// Removes the rules and premises on the targets and installs `top => l`.
pub fn modify_det(sys: &DetCausalSystem, i: &InterventionAssignment) -> DetCausalSystem {
    let mask = i.atom_mask();
    let mut rules: Vec<CausalRule> = sys
        .rules
        .iter()
        .filter(|r| !heads_target(r, mask))
        .cloned()
        .collect();
    rules.extend(i.literals().into_iter().map(CausalRule::fact));
    DetCausalSystem {
        alphabet: sys.alphabet.clone(),
        rules,
        premises: sys
            .premises
            .iter()
            .filter(|l| mask >> l.atom & 1 == 0)
            .copied()
            .collect(),
        observations: sys.observations.clone(),
    }
}

fn counterfactual_check(alphabet: &Alphabet, observations: &[Formula], mask: u32) -> Result<()> {
    let observed = observations.iter().fold(0u32, |m, o| m | o.atom_mask());
    let clash = observed & mask;
    if clash != 0 {
        return Err(Error::CounterfactualQuery(
            crate::graph::bits(clash)
                .map(|a| alphabet.name(a).to_string())
                .collect(),
        ));
    }
    Ok(())
}

/// Knowledge-why of `formula` after the intervention. False when the
/// modified system does not provide demonstrations.
pub fn do_knows(
    sys: &DetCausalSystem,
    i: &InterventionAssignment,
    formula: &Formula,
) -> Result<bool> {
    do_knows_with_cap(sys, i, formula, IRRELEVANCE_CAP)
}

pub fn do_knows_with_cap(
    sys: &DetCausalSystem,
    i: &InterventionAssignment,
    formula: &Formula,
    cap: usize,
) -> Result<bool> {
    counterfactual_check(&sys.alphabet, &sys.observations, i.atom_mask())?;
    let modified = modify_det(sys, i);
    if !provides_demonstrations_with_cap(&modified, cap)? {
        return Ok(false);
    }
    knows_why_with_cap(&modified, formula, cap)
}

/// Weighted counterpart of [`modify_det`]; adds `(+inf, top => l)`.
pub fn modify_maxent(sys: &MaxEntCausalSystem, i: &InterventionAssignment) -> MaxEntCausalSystem {
    let mask = i.atom_mask();
    let mut rules: Vec<WeightedRule> = sys
        .rules
        .iter()
        .filter(|wr| !heads_target(&wr.rule, mask))
        .cloned()
        .collect();
    rules.extend(
        i.literals()
            .into_iter()
            .map(|l| WeightedRule::hard(CausalRule::fact(l))),
    );
    MaxEntCausalSystem {
        alphabet: sys.alphabet.clone(),
        rules,
        premises: sys
            .premises
            .iter()
            .filter(|l| mask >> l.atom & 1 == 0)
            .copied()
            .collect(),
        observations: sys.observations.clone(),
        sigma: sys.sigma.clone(),
    }
}

/// Tolerance of the independence test between intervened and remaining
/// pure premises.
pub const INDEPENDENCE_TOLERANCE: f64 = 1e-9;

fn check_independence(sys: &MaxEntCausalSystem, mask: u32) -> Result<()> {
    let pure = sys.pure_mask();
    let a = pure & mask;
    let b = pure & !mask;
    if a == 0 || b == 0 {
        return Ok(());
    }
    let dist = sys.sigma.rebind(sys.alphabet.clone()).distribution()?;
    let joint = dist.marginal(pure);
    let pa = dist.marginal(a);
    let pb = dist.marginal(b);
    for ai in 0..1usize << a.count_ones() {
        let abits = expand(ai, a);
        for bi in 0..1usize << b.count_ones() {
            let bbits = expand(bi, b);
            let pj = joint.get(&(abits | bbits)).copied().unwrap_or(0.0);
            let prod =
                pa.get(&abits).copied().unwrap_or(0.0) * pb.get(&bbits).copied().unwrap_or(0.0);
            if (pj - prod).abs() > INDEPENDENCE_TOLERANCE {
                return Err(Error::InterventionNotFeasible(format!(
                    "intervened premises are correlated with the others (assignment {} / {}: {pj} vs {prod})",
                    compress(abits, a),
                    compress(bbits, b)
                )));
            }
        }
    }
    Ok(())
}

/// Probability of `formula` after the intervention, when it is knowledge-why.
pub fn do_prob(
    sys: &MaxEntCausalSystem,
    i: &InterventionAssignment,
    formula: &Formula,
    options: &SemanticsOptions,
) -> Result<f64> {
    check_independence(sys, i.atom_mask())?;
    let modified = modify_maxent(sys, i);
    match knows_why_prob(&modified, formula, options)? {
        WhyAnswer::Why(p) => Ok(p),
        WhyAnswer::NotWhy { causal, restricted } => {
            Err(Error::NotKnowledgeWhy { causal, restricted })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_assignment_is_flagged() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let i = InterventionAssignment::parse(&ab, "a, ~a").unwrap();
        assert_eq!(i.value(0), Some(false));
        assert_eq!(i.diagnostics(&ab).len(), 1);
    }

    #[test]
    fn untouched_atom_only_gains_a_fact() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let sys = DetCausalSystem::new(ab.clone())
            .with_rules([CausalRule::to_lit([Literal::pos(0)], Literal::pos(0))])
            .with_premises([Literal::neg(0)]);
        let i = InterventionAssignment::from_literals([Literal::pos(1)]);
        let m = modify_det(&sys, &i);
        assert_eq!(m.premises, sys.premises);
        assert_eq!(m.rules.len(), 2);
        assert_eq!(m.rules[1], CausalRule::fact(Literal::pos(1)));
        assert_eq!(modify_det(&m, &i).rules.len(), 2);
    }
}
