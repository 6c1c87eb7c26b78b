//! Boolean structural causal models and their causal-system embeddings.

use std::collections::BTreeMap;

use crate::alphabet::{compress, expand, Alphabet, Literal, World};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::graph::{bits, condensation, Digraph};
use crate::logic::to_dnf;
use crate::loglin::{Distribution, LogLinearModel};
use crate::rule::{CausalRule, Weight, WeightedRule};
use crate::system::{DetCausalSystem, MaxEntCausalSystem};

/// Variable limit for the exhaustive functionality check.
pub const FUNCTIONALITY_CAP: usize = 12;

/// Externals `U`, internals `V` and one equation per internal variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Scm {
    alphabet: Alphabet,
    externals: u32,
    equations: BTreeMap<usize, Formula>,
}

impl Scm {
    /// Every atom not in `externals` must have exactly one equation.
    pub fn new(
        alphabet: Alphabet,
        externals: u32,
        equations: BTreeMap<usize, Formula>,
    ) -> Result<Self> {
        let full = alphabet.full_mask();
        if externals & !full != 0 {
            return Err(Error::InvalidModel("external index out of range".into()));
        }
        for (&v, f) in &equations {
            if v >= alphabet.len() {
                return Err(Error::InvalidModel("equation for unknown variable".into()));
            }
            if externals >> v & 1 == 1 {
                return Err(Error::InvalidModel(format!(
                    "external `{}` has an equation",
                    alphabet.name(v)
                )));
            }
            if f.atom_mask() & !full != 0 {
                return Err(Error::InvalidModel(format!(
                    "equation of `{}` mentions an unknown atom",
                    alphabet.name(v)
                )));
            }
        }
        for v in bits(full & !externals) {
            if !equations.contains_key(&v) {
                return Err(Error::InvalidModel(format!(
                    "internal `{}` has no equation",
                    alphabet.name(v)
                )));
            }
        }
        Ok(Scm {
            alphabet,
            externals,
            equations,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn externals(&self) -> u32 {
        self.externals
    }

    pub fn internals(&self) -> u32 {
        self.alphabet.full_mask() & !self.externals
    }

    pub fn equations(&self) -> &BTreeMap<usize, Formula> {
        &self.equations
    }

    pub fn equation(&self, var: usize) -> Option<&Formula> {
        self.equations.get(&var)
    }

    /// Internal variables occurring in the equation of `var`.
    pub fn parents(&self, var: usize) -> u32 {
        self.equations[&var].atom_mask() & self.internals()
    }

    /// External variables occurring in the equation of `var`.
    pub fn error_terms(&self, var: usize) -> u32 {
        self.equations[&var].atom_mask() & self.externals
    }

    /// Graph over all variables with an edge into each internal from every
    /// variable in its equation.
    pub fn graph(&self) -> Digraph {
        let mut g = Digraph::new(self.alphabet.len());
        for (&v, f) in &self.equations {
            for p in bits(f.atom_mask()) {
                g.add_edge(p, v);
            }
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        let g = self.graph();
        let c = condensation(&g);
        c.components.iter().all(|m| m.count_ones() == 1)
            && (0..g.node_count()).all(|v| !g.has_edge(v, v))
    }

    pub fn satisfies(&self, world: World) -> bool {
        self.equations
            .iter()
            .all(|(&v, f)| world.get(v) == f.eval(world))
    }

    /// All worlds extending the situation `u` that satisfy every equation.
    pub fn solve(&self, u: World) -> Vec<World> {
        let base = u.bits() & self.externals;
        let internals = self.internals();
        (0..1usize << internals.count_ones())
            .map(|i| World(base | expand(i, internals)))
            .filter(|&w| self.satisfies(w))
            .collect()
    }

    /// Situations in ascending order, as worlds with internals false.
    pub fn situations(&self) -> impl Iterator<Item = World> + '_ {
        (0..1usize << self.externals.count_ones()).map(|i| World(expand(i, self.externals)))
    }

    /// Replaces the equations of the intervened internals by constants.
    pub fn submodel(&self, i: &BTreeMap<usize, bool>) -> Result<Scm> {
        let mut equations = self.equations.clone();
        for (&v, &value) in i {
            if self.externals >> v & 1 == 1 {
                return Err(Error::ExternalIntervention(
                    self.alphabet.name(v).to_string(),
                ));
            }
            if v >= self.alphabet.len() {
                return Err(Error::InvalidModel(
                    "intervention on unknown variable".into(),
                ));
            }
            equations.insert(v, if value { Formula::Top } else { Formula::Bot });
        }
        Ok(Scm {
            alphabet: self.alphabet.clone(),
            externals: self.externals,
            equations,
        })
    }

    /// Unique solution for every submodel and situation.
    pub fn is_functional(&self) -> Result<bool> {
        if self.is_acyclic() {
            return Ok(true);
        }
        let n = self.alphabet.len();
        if n > FUNCTIONALITY_CAP {
            return Err(Error::Undecided(format!(
                "functionality of a cyclic model with {n} variables exceeds the limit of {FUNCTIONALITY_CAP}"
            )));
        }
        let internals = self.internals();
        let mut subset = 0u32;
        loop {
            for values in 0..1usize << subset.count_ones() {
                let assign = expand(values, subset);
                let i: BTreeMap<usize, bool> =
                    bits(subset).map(|v| (v, assign >> v & 1 == 1)).collect();
                let sub = self.submodel(&i)?;
                if sub.situations().any(|u| sub.solve(u).len() != 1) {
                    return Ok(false);
                }
            }
            if subset == internals {
                return Ok(true);
            }
            subset = subset.wrapping_sub(internals) & internals;
        }
    }

    fn rules(&self) -> Result<Vec<CausalRule>> {
        let mut rules = Vec::new();
        for (&v, f) in &self.equations {
            for clause in to_dnf(f, self.alphabet.len())? {
                rules.push(CausalRule::to_lit(clause.literals(), Literal::pos(v)));
            }
        }
        Ok(rules)
    }

    fn premises(&self) -> Vec<Literal> {
        let mut out: Vec<Literal> = bits(self.externals).map(Literal::pos).collect();
        out.extend((0..self.alphabet.len()).map(Literal::neg));
        out
    }

    /// Causal system whose causal worlds are the solutions of the model.
    pub fn bochman_det(&self) -> Result<DetCausalSystem> {
        Ok(DetCausalSystem::new(self.alphabet.clone())
            .with_rules(self.rules()?)
            .with_premises(self.premises()))
    }
}

/// Tolerance on the total mass of a situation distribution.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// A model with a distribution over situations.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbScm {
    pub scm: Scm,
    /// Indexed by `compress(situation, externals)`.
    situation_probs: Vec<f64>,
}

impl ProbScm {
    pub fn new(scm: Scm, situation_probs: Vec<f64>) -> Result<Self> {
        let expected = 1usize << scm.externals.count_ones();
        if situation_probs.len() != expected {
            return Err(Error::InvalidModel(format!(
                "expected {expected} situation probabilities, got {}",
                situation_probs.len()
            )));
        }
        if situation_probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidModel(
                "situation probability outside [0, 1]".into(),
            ));
        }
        let total: f64 = situation_probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!(
                "situation probabilities sum to {total}"
            )));
        }
        Ok(ProbScm {
            scm,
            situation_probs,
        })
    }

    /// Independent error terms with the given probabilities of being true,
    /// keyed by external atom.
    pub fn from_marginals(scm: Scm, marginals: &BTreeMap<usize, f64>) -> Result<Self> {
        let ext = scm.externals;
        if bits(ext).any(|u| !marginals.contains_key(&u))
            || marginals.keys().any(|&u| ext >> u & 1 == 0)
        {
            return Err(Error::InvalidModel(
                "marginals must cover exactly the externals".into(),
            ));
        }
        if marginals.values().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidModel("marginal outside [0, 1]".into()));
        }
        let probs = (0..1usize << ext.count_ones())
            .map(|i| {
                let s = expand(i, ext);
                bits(ext)
                    .map(|u| {
                        let p = marginals[&u];
                        if s >> u & 1 == 1 {
                            p
                        } else {
                            1.0 - p
                        }
                    })
                    .product()
            })
            .collect();
        ProbScm::new(scm, probs)
    }

    pub fn situation_prob(&self, u: World) -> f64 {
        self.situation_probs[compress(u.bits(), self.scm.externals)]
    }

    pub fn situation_probs(&self) -> &[f64] {
        &self.situation_probs
    }

    /// Joint over all variables: each situation's mass moves to its solution.
    pub fn prob_joint(&self) -> Result<Distribution> {
        if !self.scm.is_functional()? {
            return Err(Error::NonFunctional(
                "some submodel and situation lack a unique solution".into(),
            ));
        }
        let ab = self.scm.alphabet.clone();
        ab.check_enumerable()?;
        let mut probs = vec![0.0; ab.world_count()];
        for u in self.scm.situations() {
            let sol = self.scm.solve(u);
            probs[sol[0].bits() as usize] += self.situation_prob(u);
        }
        Ok(Distribution::from_probs(ab, probs))
    }

    /// Whether the situation distribution is the product of its marginals.
    pub fn is_markovian(&self) -> bool {
        let ext = self.scm.externals;
        let marginal = |u: usize| -> f64 {
            self.scm
                .situations()
                .filter(|s| s.get(u))
                .map(|s| self.situation_prob(s))
                .sum()
        };
        let margins: Vec<(usize, f64)> = bits(ext).map(|u| (u, marginal(u))).collect();
        self.scm.situations().all(|s| {
            let product: f64 = margins
                .iter()
                .map(|&(u, p)| if s.get(u) { p } else { 1.0 - p })
                .product();
            (product - self.situation_prob(s)).abs() <= PROBABILITY_SUM_TOLERANCE
        })
    }

    pub fn submodel(&self, i: &BTreeMap<usize, bool>) -> Result<ProbScm> {
        Ok(ProbScm {
            scm: self.scm.submodel(i)?,
            situation_probs: self.situation_probs.clone(),
        })
    }

    /// Joint of the submodel.
    pub fn post_intervention(&self, i: &BTreeMap<usize, bool>) -> Result<Distribution> {
        self.submodel(i)?.prob_joint()
    }

    /// Max-entropy system with hard structural rules and the situation
    /// distribution as superordinate model.
    pub fn bochman_prob(&self) -> Result<MaxEntCausalSystem> {
        let scm = &self.scm;
        let ab = scm.alphabet.clone();
        let mut sigma = LogLinearModel::new(ab.clone());
        for u in scm.situations() {
            let lits = u.literals(scm.externals).to_vec();
            let conj = Formula::conjunction_of_literals(&lits);
            let p = self.situation_prob(u);
            let w = if p > 0.0 {
                Weight::new(p.ln())?
            } else {
                Weight::NEG_INF
            };
            sigma.push(w, conj);
        }
        Ok(MaxEntCausalSystem::new(ab)
            .with_rules(scm.rules()?.into_iter().map(WeightedRule::hard))
            .with_premises(scm.premises())
            .with_sigma(sigma))
    }
}
