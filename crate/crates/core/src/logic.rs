//! Evaluation, disjunctive normal form and exhaustive model enumeration.

use crate::alphabet::{Alphabet, LitSet, Literal, World};
use crate::error::{Error, Result};
use crate::formula::Formula;

pub fn eval(formula: &Formula, world: World) -> bool {
    formula.eval(world)
}

/// Non-contradictory conjunction of literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConjClause(LitSet);

impl ConjClause {
    pub fn new(lits: LitSet) -> Option<Self> {
        if lits.is_contradictory() {
            None
        } else {
            Some(ConjClause(lits))
        }
    }

    pub fn literals(&self) -> Vec<Literal> {
        self.0.to_vec()
    }

    pub fn lit_set(&self) -> LitSet {
        self.0
    }

    pub fn holds_in(&self, world: World) -> bool {
        world.bits() & self.0.pos == self.0.pos && world.bits() & self.0.neg == 0
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conjunction_of_literals(&self.literals())
    }
}

fn prune(mut clauses: Vec<LitSet>) -> Vec<LitSet> {
    clauses.retain(|c| !c.is_contradictory());
    clauses.sort_by_key(|c| (c.len(), c.neg, c.pos));
    clauses.dedup();
    let mut kept: Vec<LitSet> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if !kept.iter().any(|k| c.contains_all(k)) {
            kept.push(c);
        }
    }
    kept
}

fn dnf_of_nnf(f: &Formula, bound: usize) -> Result<Vec<LitSet>> {
    let out = match f {
        Formula::Top => vec![LitSet::default()],
        Formula::Bot => Vec::new(),
        Formula::Atom(a) => vec![LitSet::from_literals(&[Literal::pos(*a)])],
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) => vec![LitSet::from_literals(&[Literal::neg(*a)])],
            _ => unreachable!("input is in negation normal form"),
        },
        Formula::Or(a, b) => {
            let mut left = dnf_of_nnf(a, bound)?;
            left.extend(dnf_of_nnf(b, bound)?);
            prune(left)
        }
        Formula::And(a, b) => {
            let left = dnf_of_nnf(a, bound)?;
            let right = dnf_of_nnf(b, bound)?;
            if left.len().saturating_mul(right.len()) > bound.saturating_mul(bound) {
                return Err(Error::DnfBlowUp {
                    clauses: left.len().saturating_mul(right.len()),
                    bound,
                });
            }
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    out.push(l.union(r));
                }
            }
            prune(out)
        }
        Formula::Implies(..) | Formula::Iff(..) => unreachable!("input is in negation normal form"),
    };
    if out.len() > bound {
        return Err(Error::DnfBlowUp {
            clauses: out.len(),
            bound,
        });
    }
    Ok(out)
}

/// Disjunctive normal form. Contradictory and subsumed clauses are dropped;
/// the result is sorted by clause size.
///
/// Fails when more than `2^atoms` clauses would be needed.
pub fn to_dnf(formula: &Formula, atoms: usize) -> Result<Vec<ConjClause>> {
    let bound = 1usize << atoms.min(40);
    let clauses = dnf_of_nnf(&formula.nnf(), bound)?;
    Ok(clauses.into_iter().filter_map(ConjClause::new).collect())
}

/// Models of `formula`, ascending.
pub fn enumerate_models(alphabet: &Alphabet, formula: &Formula) -> Result<Vec<World>> {
    alphabet.check_enumerable()?;
    Ok(alphabet.worlds().filter(|&w| formula.eval(w)).collect())
}

/// Semantic entailment by exhaustive search for a counter-model.
pub fn entails(alphabet: &Alphabet, premises: &[Formula], goal: &Formula) -> Result<bool> {
    alphabet.check_enumerable()?;
    Ok(alphabet
        .worlds()
        .all(|w| !premises.iter().all(|p| p.eval(w)) || goal.eval(w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: usize) -> Formula {
        Formula::atom(i)
    }

    #[test]
    fn dnf_of_disjunction() {
        let d = to_dnf(&Formula::or(a(0), a(1)), 2).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].literals(), vec![Literal::pos(0)]);
        assert_eq!(d[1].literals(), vec![Literal::pos(1)]);
        assert!(to_dnf(&Formula::Bot, 0).unwrap().is_empty());
        assert!(to_dnf(&Formula::and(a(0), Formula::not(a(0))), 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn dnf_preserves_truth() {
        let f = Formula::iff(
            Formula::or(a(0), a(1)),
            Formula::and(a(2), Formula::not(a(0))),
        );
        let d = to_dnf(&f, 3).unwrap();
        for w in 0..8 {
            let w = World(w);
            assert_eq!(f.eval(w), d.iter().any(|c| c.holds_in(w)));
        }
    }

    #[test]
    fn entailment() {
        let ab = Alphabet::new(["rain", "cloudy"]).unwrap();
        let gamma = vec![a(0), Formula::implies(a(0), a(1))];
        assert!(entails(&ab, &gamma, &a(1)).unwrap());
        assert!(!entails(&ab, &[a(1)], &a(0)).unwrap());
        assert!(entails(&ab, &[], &Formula::Top).unwrap());
        assert_eq!(enumerate_models(&ab, &Formula::Top).unwrap().len(), 4);
    }
}
