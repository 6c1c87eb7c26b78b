//! Deterministic semantics: closure, completion, causal worlds and the two
//! kinds of knowledge.

use crate::alphabet::{Alphabet, LitSet, Literal, World};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::graph::{bits, causal_structure};
use crate::rule::{CausalRule, Head};
use crate::system::{explanatory_closure, DetCausalSystem, Diagnostic, DiagnosticKind};

/// Atom limit for the exhaustive demonstration check.
pub const IRRELEVANCE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureResult {
    Derived(LitSet),
    Bottom,
}

impl ClosureResult {
    pub fn derived(&self) -> Option<LitSet> {
        match self {
            ClosureResult::Derived(s) => Some(*s),
            ClosureResult::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, ClosureResult::Bottom)
    }
}

/// Least literal set containing `start` and closed under the rules.
pub fn closure(rules: &[CausalRule], start: LitSet) -> ClosureResult {
    let mut set = start;
    if set.is_contradictory() {
        return ClosureResult::Bottom;
    }
    let bodies: Vec<LitSet> = rules.iter().map(CausalRule::body_set).collect();
    let mut fired = vec![false; rules.len()];
    loop {
        let mut changed = false;
        for (i, rule) in rules.iter().enumerate() {
            if fired[i] || !set.contains_all(&bodies[i]) {
                continue;
            }
            fired[i] = true;
            match rule.head {
                Head::Bottom => return ClosureResult::Bottom,
                Head::Lit(l) => {
                    if !set.contains(l) {
                        set.insert(l);
                        if set.is_contradictory() {
                            return ClosureResult::Bottom;
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return ClosureResult::Derived(set);
        }
    }
}

/// Set of worlds, kept ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventSet {
    worlds: Vec<World>,
}

impl EventSet {
    pub fn from_worlds(mut worlds: Vec<World>) -> Self {
        worlds.sort();
        worlds.dedup();
        EventSet { worlds }
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn contains(&self, w: World) -> bool {
        self.worlds.binary_search(&w).is_ok()
    }

    pub fn intersect(&self, other: &EventSet) -> EventSet {
        EventSet {
            worlds: self
                .worlds
                .iter()
                .copied()
                .filter(|w| other.contains(*w))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.worlds.iter().all(|w| other.contains(*w))
    }
}

/// Clark-style completion of a theory that already contains its defaults:
/// `l <-> disjunction of bodies` for every literal, then `bot <-> ...`.
pub fn completion(rules: &[CausalRule], atoms: usize) -> Vec<Formula> {
    let bodies_for = |head: Head| {
        Formula::disjunction(
            rules
                .iter()
                .filter(|r| r.head == head)
                .map(CausalRule::body_formula),
        )
    };
    let mut out = Vec::with_capacity(2 * atoms + 1);
    for atom in 0..atoms {
        for lit in [Literal::pos(atom), Literal::neg(atom)] {
            out.push(Formula::iff(
                Formula::literal(lit),
                bodies_for(Head::Lit(lit)),
            ));
        }
    }
    out.push(Formula::iff(Formula::Bot, bodies_for(Head::Bottom)));
    out
}

/// Fixpoint test: the closure of `world`'s premise literals is `world`.
pub(crate) fn is_self_explaining(
    explanatory: &[CausalRule],
    premises: LitSet,
    full: u32,
    world: World,
) -> bool {
    let lits = world.literals(full);
    closure(explanatory, lits.intersect(&premises)).derived() == Some(lits)
}

fn observed(observations: &[Formula], world: World) -> bool {
    observations.iter().all(|o| o.eval(world))
}

/// Causal worlds by the defining fixpoint condition.
pub fn causal_worlds(sys: &DetCausalSystem) -> Result<EventSet> {
    sys.alphabet.check_enumerable()?;
    let explanatory = sys.explanatory_closure();
    let premises = sys.premise_set();
    let full = sys.alphabet.full_mask();
    Ok(EventSet::from_worlds(
        sys.alphabet
            .worlds()
            .filter(|&w| {
                observed(&sys.observations, w)
                    && is_self_explaining(&explanatory, premises, full, w)
            })
            .collect(),
    ))
}

/// Worlds satisfying the material implication of every rule.
pub fn necessity_event(sys: &DetCausalSystem) -> Result<EventSet> {
    sys.alphabet.check_enumerable()?;
    Ok(EventSet::from_worlds(
        sys.alphabet
            .worlds()
            .filter(|&w| sys.rules.iter().all(|r| r.implication_holds(w)))
            .collect(),
    ))
}

/// Worlds fully explained by the rules they satisfy.
pub fn sufficiency_event(sys: &DetCausalSystem) -> Result<EventSet> {
    sys.alphabet.check_enumerable()?;
    let premises = sys.premise_set();
    let full = sys.alphabet.full_mask();
    Ok(EventSet::from_worlds(
        sys.alphabet
            .worlds()
            .filter(|&w| {
                let restricted: Vec<CausalRule> = sys
                    .rules
                    .iter()
                    .filter(|r| r.implication_holds(w))
                    .cloned()
                    .collect();
                let explanatory = explanatory_closure(&restricted, &sys.premises);
                is_self_explaining(&explanatory, premises, full, w)
            })
            .collect(),
    ))
}

/// Causal worlds as necessity, sufficiency and observations combined.
pub fn causal_worlds_by_splitting(sys: &DetCausalSystem) -> Result<EventSet> {
    let nec = necessity_event(sys)?;
    let suf = sufficiency_event(sys)?;
    Ok(EventSet::from_worlds(
        nec.intersect(&suf)
            .worlds()
            .iter()
            .copied()
            .filter(|&w| observed(&sys.observations, w))
            .collect(),
    ))
}

/// Truth in every causal world, with an `InconsistentSystem` diagnostic when
/// there are none.
pub fn knows_that_with_diagnostics(
    sys: &DetCausalSystem,
    formula: &Formula,
) -> Result<(bool, Vec<Diagnostic>)> {
    let worlds = causal_worlds(sys)?;
    let mut diags = Vec::new();
    if worlds.is_empty() {
        diags.push(Diagnostic::new(
            DiagnosticKind::InconsistentSystem,
            "no causal world; knowledge holds vacuously",
        ));
    }
    Ok((worlds.worlds().iter().all(|&w| formula.eval(w)), diags))
}

pub fn knows_that(sys: &DetCausalSystem, formula: &Formula) -> Result<bool> {
    knows_that_with_diagnostics(sys, formula).map(|(b, _)| b)
}

fn derived_system_has_world(
    rules: &[CausalRule],
    premises: LitSet,
    low: u32,
    high: u32,
    full: u32,
) -> bool {
    let all_low = LitSet { pos: low, neg: low };
    let premises = premises.union(&all_low);
    let explanatory: Vec<CausalRule> = rules
        .iter()
        .cloned()
        .chain(
            premises
                .to_vec()
                .into_iter()
                .map(|l| CausalRule::to_lit([l], l)),
        )
        .collect();
    let high_atoms: Vec<usize> = bits(high).collect();
    // Every assignment to the non-descendants must extend to a causal world.
    let mut low_assign = 0u32;
    loop {
        let found = (0u64..1 << high_atoms.len()).any(|ext| {
            let mut w = low_assign;
            for (j, &a) in high_atoms.iter().enumerate() {
                if ext >> j & 1 == 1 {
                    w |= 1 << a;
                }
            }
            is_self_explaining(&explanatory, premises, full, World(w))
        });
        if !found {
            return false;
        }
        // Next subset of `low`.
        if low_assign == low {
            return true;
        }
        low_assign = (low_assign.wrapping_sub(low)) & low;
    }
}

pub fn provides_demonstrations_with_cap(sys: &DetCausalSystem, cap: usize) -> Result<bool> {
    let n = sys.alphabet.len();
    if n > cap {
        return Err(Error::Undecided(format!(
            "demonstration check over {n} atoms exceeds the limit of {cap}"
        )));
    }
    let full = sys.alphabet.full_mask();
    let graph = causal_structure(n, &sys.rules);
    let premises = sys.premise_set();
    let mut seen = std::collections::HashSet::new();
    let mut s = 0u32;
    loop {
        let high = graph.descendants(s);
        if seen.insert(high) {
            let low = full & !high;
            let rules: Vec<CausalRule> = sys
                .rules
                .iter()
                .filter(|r| match r.head {
                    Head::Lit(l) => high >> l.atom & 1 == 1,
                    Head::Bottom => true,
                })
                .cloned()
                .collect();
            if !derived_system_has_world(&rules, premises, low, high, full) {
                return Ok(false);
            }
        }
        if s == full {
            return Ok(true);
        }
        s += 1;
    }
}

/// Exhaustive irrelevance check over every atom set and every assignment to
/// its non-descendants.
pub fn provides_demonstrations(sys: &DetCausalSystem) -> Result<bool> {
    provides_demonstrations_with_cap(sys, IRRELEVANCE_CAP)
}

/// Observations built only from premise literals.
pub fn premise_observations(observations: &[Formula], premises: LitSet) -> Vec<Formula> {
    observations
        .iter()
        .filter(|o| o.nnf_literals().iter().all(|&l| premises.contains(l)))
        .cloned()
        .collect()
}

pub fn knows_why(sys: &DetCausalSystem, formula: &Formula) -> Result<bool> {
    knows_why_with_cap(sys, formula, IRRELEVANCE_CAP)
}

pub fn knows_why_with_cap(sys: &DetCausalSystem, formula: &Formula, cap: usize) -> Result<bool> {
    if !provides_demonstrations_with_cap(sys, cap)? {
        return Err(Error::NoDemonstrations(
            "some upstream assignment has no causal world".into(),
        ));
    }
    if !knows_that(sys, formula)? {
        return Ok(false);
    }
    let mut restricted = sys.clone();
    restricted.observations = premise_observations(&sys.observations, sys.premise_set());
    knows_that(&restricted, formula)
}

/// Causal worlds rendered as `{a, b}` strings.
pub fn show_worlds(alphabet: &Alphabet, set: &EventSet) -> Vec<String> {
    set.worlds()
        .iter()
        .map(|&w| alphabet.show_world(w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_basics() {
        assert_eq!(
            closure(&[], LitSet::default()),
            ClosureResult::Derived(LitSet::default())
        );
        let r = [CausalRule::constraint([Literal::pos(0)])];
        assert!(closure(&r, LitSet::from_literals(&[Literal::pos(0)])).is_bottom());
    }

    #[test]
    fn constraint_with_premise_has_no_demonstrations() {
        let ab = Alphabet::new(["p"]).unwrap();
        let sys = DetCausalSystem::new(ab)
            .with_rules([CausalRule::constraint([Literal::pos(0)])])
            .with_premises([Literal::pos(0)]);
        assert!(!provides_demonstrations(&sys).unwrap());
        assert!(matches!(
            knows_why(&sys, &Formula::Top),
            Err(Error::NoDemonstrations(_))
        ));
    }

    #[test]
    fn vacuous_knowledge_is_flagged() {
        let ab = Alphabet::new(["p"]).unwrap();
        let sys = DetCausalSystem::new(ab).with_rules([CausalRule::constraint([])]);
        let (holds, diags) = knows_that_with_diagnostics(&sys, &Formula::Bot).unwrap();
        assert!(holds);
        assert_eq!(diags[0].kind, DiagnosticKind::InconsistentSystem);
    }

    #[test]
    fn empty_theory_full_premises() {
        let ab = Alphabet::new(["p", "q"]).unwrap();
        let sys = DetCausalSystem::new(ab).with_premises([
            Literal::pos(0),
            Literal::neg(0),
            Literal::pos(1),
            Literal::neg(1),
        ]);
        assert_eq!(sufficiency_event(&sys).unwrap().len(), 4);
    }
}
