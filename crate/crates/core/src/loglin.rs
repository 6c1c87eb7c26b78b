//! LogLinear models and exact distributions over worlds.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, World};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::rule::Weight;

/// Weighted propositional constraints. Infinite weights are hard.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearModel {
    alphabet: Alphabet,
    constraints: Vec<(Weight, Formula)>,
}

impl LogLinearModel {
    pub fn new(alphabet: Alphabet) -> Self {
        LogLinearModel {
            alphabet,
            constraints: Vec::new(),
        }
    }

    pub fn with_constraints(
        alphabet: Alphabet,
        constraints: impl IntoIterator<Item = (Weight, Formula)>,
    ) -> Self {
        LogLinearModel {
            alphabet,
            constraints: constraints.into_iter().collect(),
        }
    }

    pub fn push(&mut self, weight: Weight, formula: Formula) {
        self.constraints.push((weight, formula));
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn constraints(&self) -> &[(Weight, Formula)] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Same constraints over another alphabet (atom indices unchanged).
    pub fn rebind(&self, alphabet: Alphabet) -> Self {
        LogLinearModel {
            alphabet,
            constraints: self.constraints.clone(),
        }
    }

    /// `ln` of the world weight, `None` when a hard constraint is violated.
    pub fn log_weight(&self, world: World) -> Option<f64> {
        let mut total = 0.0;
        for (w, f) in &self.constraints {
            let sat = f.eval(world);
            if w.is_pos_inf() {
                if !sat {
                    return None;
                }
            } else if w.is_neg_inf() {
                if sat {
                    return None;
                }
            } else if sat {
                total += w.value();
            }
        }
        Some(total)
    }

    pub fn world_weight(&self, world: World) -> f64 {
        self.log_weight(world).map_or(0.0, f64::exp)
    }

    pub fn distribution(&self) -> Result<Distribution> {
        self.alphabet.check_enumerable()?;
        let logs: Vec<f64> = self
            .alphabet
            .worlds()
            .map(|w| self.log_weight(w).unwrap_or(f64::NEG_INFINITY))
            .collect();
        Distribution::from_log_weights(self.alphabet.clone(), logs)
    }

    pub fn probability(&self, formula: &Formula) -> Result<f64> {
        Ok(self.distribution()?.probability(formula))
    }

    /// `P(formula | evidence)`, 0 when the evidence has probability 0.
    pub fn conditional(&self, formula: &Formula, evidence: &Formula) -> Result<f64> {
        Ok(self
            .distribution()?
            .conditional(formula, evidence)
            .unwrap_or(0.0))
    }
}

/// Probability for every world of an alphabet, indexed by world bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl Distribution {
    /// Normalizes unnormalized log weights; fails when all are `-inf`.
    pub fn from_log_weights(alphabet: Alphabet, logs: Vec<f64>) -> Result<Self> {
        assert_eq!(logs.len(), alphabet.world_count());
        let z = log_sum_exp(&logs);
        if z == f64::NEG_INFINITY {
            return Err(Error::InconsistentHardConstraints);
        }
        let probs = logs.iter().map(|l| (l - z).exp()).collect();
        Ok(Distribution { alphabet, probs })
    }

    /// Wraps probabilities that already sum to one.
    pub fn from_probs(alphabet: Alphabet, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), alphabet.world_count());
        Distribution { alphabet, probs }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, world: World) -> f64 {
        self.probs[world.bits() as usize]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn probability(&self, formula: &Formula) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| formula.eval(World(*i as u32)))
            .map(|(_, p)| p)
            .sum()
    }

    /// `None` when the evidence has probability zero.
    pub fn conditional(&self, formula: &Formula, evidence: &Formula) -> Option<f64> {
        let pe = self.probability(evidence);
        if pe <= 0.0 {
            return None;
        }
        Some(self.probability(&Formula::and(formula.clone(), evidence.clone())) / pe)
    }

    /// Distribution conditioned on `evidence`.
    pub fn condition(&self, evidence: &Formula) -> Result<Distribution> {
        let pe = self.probability(evidence);
        if pe <= 0.0 {
            return Err(Error::ZeroEvidence);
        }
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if evidence.eval(World(i as u32)) {
                    p / pe
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Distribution {
            alphabet: self.alphabet.clone(),
            probs,
        })
    }

    /// Marginal over the atoms in `mask`, keyed by `world & mask`.
    pub fn marginal(&self, mask: u32) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (i, p) in self.probs.iter().enumerate() {
            *out.entry(i as u32 & mask).or_insert(0.0) += p;
        }
        out
    }

    /// Worlds with positive probability.
    pub fn support(&self) -> Vec<World> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| World(i as u32))
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
