//! Probabilistic causal semantics of maximum-entropy causal systems.
//!
//! The rule graph is condensed into components. Pure premises form a single
//! source whose distribution comes from the superordinate model; every other
//! component gets a conditional table over its locally explainable
//! assignments. The tables are chained into a joint distribution and
//! conditioned on the observations.

pub mod solver;

use std::collections::BTreeMap;
use std::fmt;

use crate::alphabet::{compress, expand, LitSet, World};
use crate::detsem::{is_self_explaining, premise_observations};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::graph::{bits, causal_structure, condensation, CondensationDag};
use crate::loglin::{Distribution, LogLinearModel};
use crate::rule::{CausalRule, Head, Weight, WeightedRule};
use crate::system::{DetCausalSystem, Diagnostic, DiagnosticKind, MaxEntCausalSystem};

use solver::{MaxEntProblem, SolverOptions, SolverRow};

/// How finite rule weights turn into conditional tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum CptMode {
    /// Row proportional to `exp` of the summed weights of satisfied rules.
    #[default]
    Logit,
    /// Entropy-maximal row whose implications have probability `sigmoid(w)`.
    MaxEnt,
}

impl fmt::Display for CptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CptMode::Logit => "logit",
            CptMode::MaxEnt => "maxent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SemanticsOptions {
    pub mode: CptMode,
    pub solver: SolverOptions,
}

impl SemanticsOptions {
    pub fn with_mode(mode: CptMode) -> Self {
        SemanticsOptions {
            mode,
            ..Default::default()
        }
    }
}

pub fn sigmoid(w: f64) -> f64 {
    if w >= 0.0 {
        1.0 / (1.0 + (-w).exp())
    } else {
        let e = w.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`], mapping 0 and 1 to the infinities.
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// The rules with their weights dropped.
pub fn explanatory_part(sys: &MaxEntCausalSystem) -> DetCausalSystem {
    DetCausalSystem {
        alphabet: sys.alphabet.clone(),
        rules: sys.rules.iter().map(|wr| wr.rule.clone()).collect(),
        premises: sys.premises.clone(),
        observations: sys.observations.clone(),
    }
}

/// Each rule as a weighted material implication.
pub fn constraint_part(sys: &MaxEntCausalSystem) -> LogLinearModel {
    LogLinearModel::with_constraints(
        sys.alphabet.clone(),
        sys.rules
            .iter()
            .map(|wr| (wr.weight, wr.rule.implication())),
    )
}

/// `P(formula | observations)` under the rule constraints together with the
/// superordinate model.
pub fn that_semantics(sys: &MaxEntCausalSystem, formula: &Formula) -> Result<f64> {
    let mut model = constraint_part(sys);
    for (w, f) in sys.sigma.constraints() {
        model.push(*w, f.clone());
    }
    model.conditional(formula, &crate::formula::conjoin(&sys.observations))
}

/// Conditional table of one non-source component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCpt {
    pub members: u32,
    pub parent_atoms: u32,
    pub parents: Vec<usize>,
    /// `rows[compress(pa, parent_atoms)][compress(v, members)]`.
    pub rows: Vec<Vec<f64>>,
    /// Parent assignments with zero upstream probability (maxent mode only).
    pub unreachable_rows: Vec<usize>,
}

impl ComponentCpt {
    /// Table entry for the parent and member values of `world`.
    pub fn prob(&self, world: World) -> f64 {
        self.rows[compress(world.bits(), self.parent_atoms)][compress(world.bits(), self.members)]
    }
}

/// Assembled network and the resulting distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalSemantics {
    pub mode: CptMode,
    pub pure_atoms: u32,
    pub condensation: CondensationDag,
    /// Distribution of the pure premises, keyed by `world & pure_atoms`.
    pub source: BTreeMap<u32, f64>,
    /// Tables in topological order; pure-premise components are absent.
    pub cpts: Vec<ComponentCpt>,
    /// Network joint before conditioning on observations.
    pub prior: Distribution,
    /// Network joint conditioned on observations.
    pub distribution: Distribution,
    pub diagnostics: Vec<Diagnostic>,
}

impl CausalSemantics {
    pub fn probability(&self, formula: &Formula) -> f64 {
        self.distribution.probability(formula)
    }
}

struct LocalRow {
    /// Member assignments (compressed) admitted in this row.
    support: Vec<usize>,
    /// Per supported cell, which finite rules have a true implication.
    features: Vec<Vec<f64>>,
}

struct LocalTable {
    members: u32,
    finite_weights: Vec<f64>,
    rows: Vec<LocalRow>,
}

fn local_rules(sys: &MaxEntCausalSystem, members: u32) -> Vec<&WeightedRule> {
    sys.rules
        .iter()
        .filter(|wr| matches!(wr.rule.head, Head::Lit(l) if members >> l.atom & 1 == 1))
        .collect()
}

fn local_table(sys: &MaxEntCausalSystem, members: u32, parent_atoms: u32) -> LocalTable {
    let rules = local_rules(sys, members);
    let e = sys.premise_set();
    let local_premises = LitSet {
        pos: parent_atoms | (e.pos & members),
        neg: parent_atoms | (e.neg & members),
    };
    let defaults: Vec<CausalRule> = local_premises
        .to_vec()
        .into_iter()
        .map(|l| CausalRule::to_lit([l], l))
        .collect();
    let finite: Vec<&WeightedRule> = rules
        .iter()
        .copied()
        .filter(|r| r.weight.is_finite())
        .collect();
    let local_mask = members | parent_atoms;
    let pa_count = 1usize << parent_atoms.count_ones();
    let v_count = 1usize << members.count_ones();
    let mut rows = Vec::with_capacity(pa_count);
    for pi in 0..pa_count {
        let pa = expand(pi, parent_atoms);
        let mut support = Vec::new();
        let mut features = Vec::new();
        for vi in 0..v_count {
            let world = World(pa | expand(vi, members));
            let excluded = rules.iter().any(|wr| {
                wr.rule.body_holds(world)
                    && match wr.rule.head {
                        Head::Lit(l) => {
                            (wr.weight.is_pos_inf() && !l.holds_in(world))
                                || (wr.weight.is_neg_inf() && l.holds_in(world))
                        }
                        Head::Bottom => false,
                    }
            });
            if excluded {
                continue;
            }
            let explanatory: Vec<CausalRule> = rules
                .iter()
                .filter(|wr| wr.rule.implication_holds(world))
                .map(|wr| wr.rule.clone())
                .chain(defaults.iter().cloned())
                .collect();
            if !is_self_explaining(&explanatory, local_premises, local_mask, world) {
                continue;
            }
            support.push(vi);
            features.push(
                finite
                    .iter()
                    .map(|wr| f64::from(u8::from(wr.rule.implication_holds(world))))
                    .collect(),
            );
        }
        rows.push(LocalRow { support, features });
    }
    LocalTable {
        members,
        finite_weights: finite.iter().map(|wr| wr.weight.value()).collect(),
        rows,
    }
}

fn parent_atoms_of(dag: &CondensationDag, comp: usize) -> u32 {
    dag.parents[comp]
        .iter()
        .fold(0u32, |m, &p| m | dag.components[p])
}

/// Outcome of the three demonstration conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemonstrationReport {
    pub violations: Vec<String>,
}

impl DemonstrationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every table row is defined, that no weighted rule explains a
/// pure premise, and that every atom has a rule or a premise.
pub fn provides_demonstrations_prob(sys: &MaxEntCausalSystem) -> Result<DemonstrationReport> {
    sys.alphabet.check_enumerable()?;
    let ab = &sys.alphabet;
    let mut violations = Vec::new();
    let pure = sys.pure_mask();
    for wr in &sys.rules {
        if let Head::Lit(l) = wr.rule.head {
            if pure >> l.atom & 1 == 1 {
                violations.push(format!(
                    "rule `{}` explains pure premise `{}`",
                    wr.rule.show(ab),
                    ab.name(l.atom)
                ));
            }
        }
    }
    let e = sys.premise_set();
    let headed = sys.rules.iter().fold(0u32, |m, wr| match wr.rule.head {
        Head::Lit(l) => m | 1 << l.atom,
        Head::Bottom => m,
    });
    for atom in 0..ab.len() {
        if (headed | e.pos | e.neg) >> atom & 1 == 0 {
            violations.push(format!(
                "atom `{}` has neither rule nor premise",
                ab.name(atom)
            ));
        }
    }
    let dag = dag_of(sys);
    for (c, &members) in dag.components.iter().enumerate() {
        if members & pure == members {
            continue;
        }
        let parent_atoms = parent_atoms_of(&dag, c);
        let table = local_table(sys, members, parent_atoms);
        for (pi, row) in table.rows.iter().enumerate() {
            if row.support.is_empty() {
                violations.push(format!(
                    "no explainable value of {} given {}",
                    ab.show_world(World(members)),
                    show_partial(sys, expand(pi, parent_atoms), parent_atoms)
                ));
            }
        }
    }
    Ok(DemonstrationReport { violations })
}

fn show_partial(sys: &MaxEntCausalSystem, bits_: u32, mask: u32) -> String {
    let parts: Vec<String> = bits(mask)
        .map(|a| {
            let name = sys.alphabet.name(a);
            if bits_ >> a & 1 == 1 {
                name.to_string()
            } else {
                format!("~{name}")
            }
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn dag_of(sys: &MaxEntCausalSystem) -> CondensationDag {
    let rules: Vec<CausalRule> = sys.rules.iter().map(|wr| wr.rule.clone()).collect();
    condensation(&causal_structure(sys.alphabet.len(), &rules))
}

fn rows_for(
    table: &LocalTable,
    upstream: &[f64],
    options: &SemanticsOptions,
    diagnostics: &mut Vec<Diagnostic>,
    label: &str,
) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let v_count = 1usize << table.members.count_ones();
    let mut unreachable = Vec::new();
    let dense = |row: &LocalRow, probs: &[f64]| {
        let mut out = vec![0.0; v_count];
        for (vi, p) in row.support.iter().zip(probs) {
            out[*vi] = *p;
        }
        out
    };
    let rows = match options.mode {
        CptMode::Logit => table
            .rows
            .iter()
            .map(|row| {
                let scores: Vec<f64> = row
                    .features
                    .iter()
                    .map(|f| {
                        f.iter()
                            .zip(&table.finite_weights)
                            .map(|(a, b)| a * b)
                            .sum()
                    })
                    .collect();
                let z = crate::loglin::log_sum_exp(&scores);
                let probs: Vec<f64> = scores.iter().map(|s| (s - z).exp()).collect();
                dense(row, &probs)
            })
            .collect(),
        CptMode::MaxEnt => {
            let problem = MaxEntProblem {
                rows: table
                    .rows
                    .iter()
                    .zip(upstream)
                    .map(|(row, &mass)| SolverRow {
                        mass,
                        cells: row.features.clone(),
                    })
                    .collect(),
                targets: table.finite_weights.iter().map(|&w| sigmoid(w)).collect(),
            };
            let solution = problem.solve(&options.solver).map_err(|e| match e {
                Error::IncoherentWeights(m) => Error::IncoherentWeights(format!("{label}: {m}")),
                other => other,
            })?;
            for (pi, &mass) in upstream.iter().enumerate() {
                if mass <= 0.0 {
                    unreachable.push(pi);
                }
            }
            if !unreachable.is_empty() {
                diagnostics.push(Diagnostic::new(
                    DiagnosticKind::UnreachableParentRow,
                    format!("{label}: {} row(s) set uniform", unreachable.len()),
                ));
            }
            table
                .rows
                .iter()
                .zip(&solution.rows)
                .map(|(row, probs)| dense(row, probs))
                .collect()
        }
    };
    Ok((rows, unreachable))
}

/// Builds the network over the condensation and conditions it on the
/// observations.
pub fn causal_semantics(
    sys: &MaxEntCausalSystem,
    options: &SemanticsOptions,
) -> Result<CausalSemantics> {
    let report = provides_demonstrations_prob(sys)?;
    if !report.holds() {
        return Err(Error::NoDemonstrations(report.violations.join("; ")));
    }
    let ab = &sys.alphabet;
    let n = ab.len();
    let pure = sys.pure_mask();
    let sigma = sys.sigma.rebind(ab.clone()).distribution()?;
    let source = sigma.marginal(pure);
    let dag = dag_of(sys);
    let mut diagnostics = Vec::new();

    // Partial joint over the atoms placed so far; other bits stay 0.
    let mut partial = vec![0.0; 1usize << n];
    for (&s, &p) in &source {
        partial[s as usize] = p;
    }
    let mut cpts = Vec::new();
    for (c, &members) in dag.components.iter().enumerate() {
        if members & pure == members {
            continue;
        }
        let parent_atoms = parent_atoms_of(&dag, c);
        let table = local_table(sys, members, parent_atoms);
        let mut upstream = vec![0.0; 1usize << parent_atoms.count_ones()];
        for (w, &p) in partial.iter().enumerate() {
            if p > 0.0 {
                upstream[compress(w as u32, parent_atoms)] += p;
            }
        }
        let label = ab.show_world(World(members));
        let (rows, unreachable_rows) =
            rows_for(&table, &upstream, options, &mut diagnostics, &label)?;
        let mut next = vec![0.0; 1usize << n];
        for (w, &p) in partial.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let row = &rows[compress(w as u32, parent_atoms)];
            for (vi, &q) in row.iter().enumerate() {
                if q > 0.0 {
                    next[w | expand(vi, members) as usize] += p * q;
                }
            }
        }
        partial = next;
        cpts.push(ComponentCpt {
            members,
            parent_atoms,
            parents: dag.parents[c].clone(),
            rows,
            unreachable_rows,
        });
    }
    let prior = Distribution::from_probs(ab.clone(), partial);
    let evidence = crate::formula::conjoin(&sys.observations);
    let distribution = prior.condition(&evidence).inspect_err(|_| {
        diagnostics.push(Diagnostic::new(
            DiagnosticKind::ZeroEvidence,
            "observations",
        ));
    })?;
    Ok(CausalSemantics {
        mode: options.mode,
        pure_atoms: pure,
        condensation: dag,
        source,
        cpts,
        prior,
        distribution,
        diagnostics,
    })
}

/// Answer of a probabilistic knowledge-why query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WhyAnswer {
    Why(f64),
    /// Observations outside the premises shift the probability.
    NotWhy {
        causal: f64,
        restricted: f64,
    },
}

impl WhyAnswer {
    pub fn value(self) -> Option<f64> {
        match self {
            WhyAnswer::Why(p) => Some(p),
            WhyAnswer::NotWhy { .. } => None,
        }
    }
}

/// Tolerance for comparing the observed and the premise-only semantics.
pub const WHY_TOLERANCE: f64 = 1e-9;

pub fn knows_why_prob(
    sys: &MaxEntCausalSystem,
    formula: &Formula,
    options: &SemanticsOptions,
) -> Result<WhyAnswer> {
    let causal = causal_semantics(sys, options)?.probability(formula);
    let kept = premise_observations(&sys.observations, sys.premise_set());
    if kept.len() == sys.observations.len() {
        return Ok(WhyAnswer::Why(causal));
    }
    let mut restricted_sys = sys.clone();
    restricted_sys.observations = kept;
    let restricted = causal_semantics(&restricted_sys, options)?.probability(formula);
    if (causal - restricted).abs() <= WHY_TOLERANCE {
        Ok(WhyAnswer::Why(causal))
    } else {
        Ok(WhyAnswer::NotWhy { causal, restricted })
    }
}

/// The `(pa, v)` table row of component `members` for one parent
/// assignment, given the upstream parent marginal (maxent mode only).
pub fn component_cpt(
    sys: &MaxEntCausalSystem,
    members: u32,
    parent_atoms: u32,
    upstream: &[f64],
    options: &SemanticsOptions,
) -> Result<Vec<Vec<f64>>> {
    let table = local_table(sys, members, parent_atoms);
    let mut diags = Vec::new();
    rows_for(&table, upstream, options, &mut diags, "component").map(|(rows, _)| rows)
}

/// Weighted rule helper used by the transformations.
pub(crate) fn weighted(weight: f64, rule: CausalRule) -> WeightedRule {
    WeightedRule::new(
        Weight::new(weight).expect("weights derived from probabilities are not NaN"),
        rule,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{Alphabet, Literal};

    #[test]
    fn sigmoid_logit_inverse() {
        for p in [0.01, 0.3, 0.5, 0.99] {
            assert!((sigmoid(logit(p)) - p).abs() < 1e-15);
        }
        assert_eq!(logit(1.0), f64::INFINITY);
        assert_eq!(logit(0.0), f64::NEG_INFINITY);
    }

    fn single_cause(weight: f64) -> MaxEntCausalSystem {
        // q pure, q => p with weight, default ~p.
        let ab = Alphabet::new(["q", "p"]).unwrap();
        MaxEntCausalSystem::new(ab.clone())
            .with_rules([weighted(
                weight,
                CausalRule::to_lit([Literal::pos(0)], Literal::pos(1)),
            )])
            .with_premises([Literal::pos(0), Literal::neg(0), Literal::neg(1)])
    }

    #[test]
    fn logit_row_is_sigmoid() {
        let sys = single_cause(2.0_f64.ln());
        let sem = causal_semantics(&sys, &SemanticsOptions::default()).unwrap();
        let p = sem
            .distribution
            .conditional(&Formula::atom(1), &Formula::atom(0))
            .unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        // Without the cause only the default explains p's value.
        let p0 = sem
            .distribution
            .conditional(&Formula::atom(1), &Formula::not(Formula::atom(0)))
            .unwrap();
        assert_eq!(p0, 0.0);
    }

    #[test]
    fn maxent_row_matches_closed_form() {
        // Target P(q -> p) = sigmoid(w) = 0.8 with P(q) = 0.5 gives 0.6.
        let sys = single_cause(4.0_f64.ln());
        let sem = causal_semantics(&sys, &SemanticsOptions::with_mode(CptMode::MaxEnt)).unwrap();
        let p = sem
            .distribution
            .conditional(&Formula::atom(1), &Formula::atom(0))
            .unwrap();
        assert!((p - 0.6).abs() < 1e-9);
    }

    #[test]
    fn missing_explanation_is_reported() {
        let ab = Alphabet::new(["q"]).unwrap();
        let sys = MaxEntCausalSystem::new(ab);
        let r = provides_demonstrations_prob(&sys).unwrap();
        assert!(!r.holds());
        assert!(causal_semantics(&sys, &SemanticsOptions::default()).is_err());
    }

    #[test]
    fn rule_on_pure_premise_is_reported() {
        let ab = Alphabet::new(["q"]).unwrap();
        let sys = MaxEntCausalSystem::new(ab)
            .with_rules([weighted(1.0, CausalRule::fact(Literal::pos(0)))])
            .with_premises([Literal::pos(0), Literal::neg(0)]);
        assert!(!provides_demonstrations_prob(&sys).unwrap().holds());
    }
}
