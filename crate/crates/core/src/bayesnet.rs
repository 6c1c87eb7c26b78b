//! Boolean Bayesian networks.

use std::fmt;

use crate::alphabet::{compress, expand, Alphabet, Literal, World};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::graph::{bits, condensation, Digraph};
use crate::loglin::{Distribution, LogLinearModel};
use crate::maxent::{logit, weighted};
use crate::rule::{CausalRule, Weight};
use crate::system::MaxEntCausalSystem;

/// One node per atom; `cpt[node][row]` is the probability that the node is
/// true, where bit `j` of `row` is the value of the `j`-th parent in atom
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    alphabet: Alphabet,
    parents: Vec<u32>,
    cpt: Vec<Vec<f64>>,
}

impl BayesNet {
    pub fn new(alphabet: Alphabet, parents: Vec<u32>, cpt: Vec<Vec<f64>>) -> Result<Self> {
        let n = alphabet.len();
        if parents.len() != n || cpt.len() != n {
            return Err(Error::InvalidModel(
                "one parent set and table per node".into(),
            ));
        }
        let mut g = Digraph::new(n);
        for (node, &pa) in parents.iter().enumerate() {
            if pa & !alphabet.full_mask() != 0 {
                return Err(Error::InvalidModel("parent index out of range".into()));
            }
            for p in bits(pa) {
                g.add_edge(p, node);
            }
            let rows = 1usize << pa.count_ones();
            if cpt[node].len() != rows {
                return Err(Error::InvalidModel(format!(
                    "table of `{}` needs {rows} rows",
                    alphabet.name(node)
                )));
            }
            if cpt[node].iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::InvalidModel(format!(
                    "table of `{}` has an entry outside [0, 1]",
                    alphabet.name(node)
                )));
            }
        }
        let acyclic = (0..n).all(|v| !g.has_edge(v, v))
            && condensation(&g)
                .components
                .iter()
                .all(|c| c.count_ones() == 1);
        if !acyclic {
            return Err(Error::InvalidModel("network graph has a cycle".into()));
        }
        Ok(BayesNet {
            alphabet,
            parents,
            cpt,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn parents(&self, node: usize) -> u32 {
        self.parents[node]
    }

    pub fn table(&self, node: usize) -> &[f64] {
        &self.cpt[node]
    }

    pub fn is_source(&self, node: usize) -> bool {
        self.parents[node] == 0
    }

    /// Probability that `node` is true given the parent values in `world`.
    pub fn prob_true(&self, node: usize, world: World) -> f64 {
        self.cpt[node][compress(world.bits(), self.parents[node])]
    }

    /// Product of table entries.
    pub fn joint(&self, world: World) -> f64 {
        (0..self.alphabet.len())
            .map(|v| {
                let p = self.prob_true(v, world);
                if world.get(v) {
                    p
                } else {
                    1.0 - p
                }
            })
            .product()
    }

    pub fn distribution(&self) -> Result<Distribution> {
        self.alphabet.check_enumerable()?;
        let probs = self.alphabet.worlds().map(|w| self.joint(w)).collect();
        Ok(Distribution::from_probs(self.alphabet.clone(), probs))
    }

    /// Graph surgery: the intervened nodes lose their parents and become
    /// deterministic.
    pub fn intervene(&self, i: &[Literal]) -> BayesNet {
        let mut out = self.clone();
        for l in i {
            out.parents[l.atom] = 0;
            out.cpt[l.atom] = vec![if l.positive { 1.0 } else { 0.0 }];
        }
        out
    }
}

pub fn bn_intervene(bn: &BayesNet, i: &[Literal]) -> BayesNet {
    bn.intervene(i)
}

/// How table entries become rule weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum WeightConvention {
    /// `logit` of the probability of the rule's material implication.
    Paper,
    /// `logit` of the conditional probability itself.
    #[default]
    Logit,
}

impl fmt::Display for WeightConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightConvention::Paper => "paper",
            WeightConvention::Logit => "logit",
        })
    }
}

/// Weight of `(w, pa => p)` for `P(p | pa) = theta` and `P(pa) = mass`.
pub fn rule_weight(theta: f64, mass: f64, convention: WeightConvention) -> f64 {
    if theta <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if theta >= 1.0 {
        return f64::INFINITY;
    }
    match convention {
        WeightConvention::Logit => logit(theta),
        WeightConvention::Paper => {
            // logit(theta * mass + 1 - mass), as ln(a / (1 - a)) without cancellation.
            let a = theta * mass + 1.0 - mass;
            let b = mass * (1.0 - theta);
            if b <= 0.0 {
                f64::INFINITY
            } else {
                (a / b).ln()
            }
        }
    }
}

/// Embeds the network as a max-entropy causal system: one weighted rule per
/// non-source node and parent row, sources as pure premises with their
/// marginals in the superordinate model.
pub fn bochman_bn(bn: &BayesNet, convention: WeightConvention) -> Result<MaxEntCausalSystem> {
    let ab = bn.alphabet.clone();
    let n = ab.len();
    let dist = match convention {
        WeightConvention::Paper => Some(bn.distribution()?),
        WeightConvention::Logit => None,
    };
    let mut rules = Vec::new();
    let mut premises = Vec::new();
    let mut sigma = LogLinearModel::new(ab.clone());
    for node in 0..n {
        premises.push(Literal::neg(node));
        let pa = bn.parents[node];
        if pa == 0 {
            premises.push(Literal::pos(node));
            sigma.push(Weight::new(logit(bn.cpt[node][0]))?, Formula::atom(node));
            continue;
        }
        let marginal = dist.as_ref().map(|d| d.marginal(pa));
        for (row, &theta) in bn.cpt[node].iter().enumerate() {
            let assignment = expand(row, pa);
            let mass = marginal
                .as_ref()
                .map_or(1.0, |m| m.get(&assignment).copied().unwrap_or(0.0));
            let body = World(assignment).literals(pa).to_vec();
            rules.push(weighted(
                rule_weight(theta, mass, convention),
                CausalRule::to_lit(body, Literal::pos(node)),
            ));
        }
    }
    Ok(MaxEntCausalSystem::new(ab)
        .with_rules(rules)
        .with_premises(premises)
        .with_sigma(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_bad_rows() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        assert!(BayesNet::new(
            ab.clone(),
            vec![0b10, 0b01],
            vec![vec![0.5; 2], vec![0.5; 2]]
        )
        .is_err());
        assert!(BayesNet::new(ab.clone(), vec![0, 0b01], vec![vec![0.5], vec![0.5]]).is_err());
        assert!(BayesNet::new(ab, vec![0, 0], vec![vec![1.5], vec![0.5]]).is_err());
    }

    #[test]
    fn deterministic_chain() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let bn = BayesNet::new(ab, vec![0, 0b01], vec![vec![1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(bn.joint(World(0b11)), 1.0);
    }

    #[test]
    fn weights() {
        assert!((rule_weight(0.6, 0.5, WeightConvention::Paper) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(
            rule_weight(0.0, 0.5, WeightConvention::Paper),
            f64::NEG_INFINITY
        );
        assert_eq!(
            rule_weight(0.3, 0.0, WeightConvention::Paper),
            f64::INFINITY
        );
        assert!((rule_weight(0.5, 0.2, WeightConvention::Logit)).abs() < 1e-15);
    }
}
