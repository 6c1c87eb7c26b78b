//! Random models and brute-force oracles shared by the integration tests.
//! The oracles only use the public data types, never the engine's
//! evaluation code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use csys::bayesnet::BayesNet;
use csys::loglin::LogLinearModel;
use csys::scm::Scm;
use csys::{
    Alphabet, CausalRule, DetCausalSystem, Formula, Head, Literal, MaxEntCausalSystem, Weight,
    WeightedRule, World,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| format!("p{i}"))).unwrap()
}

// ---- oracles -------------------------------------------------------------

pub fn holds(f: &Formula, w: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(a) => w >> a & 1 == 1,
        Formula::Not(x) => !holds(x, w),
        Formula::And(a, b) => holds(a, w) && holds(b, w),
        Formula::Or(a, b) => holds(a, w) || holds(b, w),
        Formula::Implies(a, b) => !holds(a, w) || holds(b, w),
        Formula::Iff(a, b) => holds(a, w) == holds(b, w),
    }
}

fn lit_true(l: Literal, w: u32) -> bool {
    (w >> l.atom & 1 == 1) == l.positive
}

/// Forward chaining over literal sets; `None` when bottom is derived.
pub fn naive_closure(rules: &[CausalRule], start: &BTreeSet<Literal>) -> Option<BTreeSet<Literal>> {
    let mut set = start.clone();
    loop {
        let mut changed = false;
        for r in rules {
            if r.body().iter().all(|l| set.contains(l)) {
                match r.head {
                    Head::Bottom => return None,
                    Head::Lit(h) => changed |= set.insert(h),
                }
            }
        }
        if !changed {
            return Some(set);
        }
    }
}

fn world_literals(n: usize, w: u32) -> BTreeSet<Literal> {
    (0..n).map(|a| Literal::new(a, w >> a & 1 == 1)).collect()
}

/// Causal worlds straight from the definition: the closure of the world's
/// premises under the rules plus defaults is exactly the world.
pub fn oracle_causal_worlds(sys: &DetCausalSystem) -> Vec<u32> {
    let n = sys.alphabet.len();
    let mut rules = sys.rules.clone();
    rules.extend(sys.premises.iter().map(|&l| CausalRule::to_lit([l], l)));
    (0..1u32 << n)
        .filter(|&w| {
            let lits = world_literals(n, w);
            let start: BTreeSet<Literal> = lits
                .iter()
                .copied()
                .filter(|l| sys.premises.contains(l))
                .collect();
            naive_closure(&rules, &start).is_some_and(|c| c == lits)
                && sys.observations.iter().all(|o| holds(o, w))
        })
        .collect()
}

pub fn worlds_of(set: &csys::detsem::EventSet) -> Vec<u32> {
    set.worlds().iter().map(|w| w.0).collect()
}

/// Solutions of `scm` with `fixed` overriding the listed equations.
pub fn oracle_solutions(scm: &Scm, fixed: &BTreeMap<usize, bool>) -> Vec<u32> {
    let n = scm.alphabet().len();
    (0..1u32 << n)
        .filter(|&w| {
            scm.equations().iter().all(|(&v, f)| {
                let value = fixed.get(&v).copied().unwrap_or_else(|| holds(f, w));
                (w >> v & 1 == 1) == value
            })
        })
        .collect()
}

/// Product of table entries; `tables[v][row]` with rows indexed by parents in
/// atom order.
pub fn oracle_joint(parents: &[u32], tables: &[Vec<f64>], w: u32) -> f64 {
    let mut p = 1.0;
    for (v, &pa) in parents.iter().enumerate() {
        let mut row = 0usize;
        let mut j = 0;
        for a in 0..parents.len() {
            if pa >> a & 1 == 1 {
                row |= ((w >> a & 1) as usize) << j;
                j += 1;
            }
        }
        let theta = tables[v][row];
        p *= if w >> v & 1 == 1 { theta } else { 1.0 - theta };
    }
    p
}

/// Joint after forcing `atom` to `value` and cutting its table.
pub fn oracle_intervened_joint(
    parents: &[u32],
    tables: &[Vec<f64>],
    atom: usize,
    value: bool,
    w: u32,
) -> f64 {
    let mut parents = parents.to_vec();
    let mut tables = tables.to_vec();
    parents[atom] = 0;
    tables[atom] = vec![if value { 1.0 } else { 0.0 }];
    oracle_joint(&parents, &tables, w)
}

/// Normalized product of exp(weights) of satisfied constraints.
pub fn oracle_loglin(model: &LogLinearModel) -> Vec<f64> {
    let n = model.alphabet().len();
    let mut weights: Vec<f64> = (0..1u32 << n)
        .map(|w| {
            let mut x = 1.0f64;
            for (wt, f) in model.constraints() {
                let sat = holds(f, w);
                if wt.is_pos_inf() && !sat || wt.is_neg_inf() && sat {
                    return 0.0;
                }
                if wt.is_finite() && sat {
                    x *= wt.value().exp();
                }
            }
            x
        })
        .collect();
    let z: f64 = weights.iter().sum();
    for x in &mut weights {
        *x /= z;
    }
    weights
}

pub fn world_formula(n: usize, w: u32) -> Formula {
    Formula::conjunction((0..n).map(|a| Formula::literal(Literal::new(a, w >> a & 1 == 1))))
}

// ---- generators ----------------------------------------------------------

pub fn random_literal(rng: &mut TestRng, atoms: &[usize]) -> Literal {
    Literal::new(*atoms.choose(rng).unwrap(), rng.gen_bool(0.5))
}

/// Body of up to `max` literals over distinct atoms.
pub fn random_body(rng: &mut TestRng, atoms: &[usize], max: usize) -> Vec<Literal> {
    let k = rng.gen_range(0..=max.min(atoms.len()));
    let mut pool = atoms.to_vec();
    pool.shuffle(rng);
    pool[..k]
        .iter()
        .map(|&a| Literal::new(a, rng.gen_bool(0.5)))
        .collect()
}

pub fn random_formula(rng: &mut TestRng, atoms: &[usize], depth: usize) -> Formula {
    if depth == 0 || atoms.is_empty() || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ if atoms.is_empty() => Formula::Top,
            _ => Formula::atom(*atoms.choose(rng).unwrap()),
        };
    }
    let a = random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, atoms, depth - 1)),
        2 => Formula::or(a, random_formula(rng, atoms, depth - 1)),
        3 => Formula::implies(a, random_formula(rng, atoms, depth - 1)),
        _ => Formula::iff(a, random_formula(rng, atoms, depth - 1)),
    }
}

/// Literal rules over at most six atoms with random premises and
/// occasional observations.
pub fn random_det_system(rng: &mut TestRng, max_atoms: usize) -> DetCausalSystem {
    let n = rng.gen_range(1..=max_atoms);
    let atoms: Vec<usize> = (0..n).collect();
    let rules: Vec<CausalRule> = (0..rng.gen_range(0..=2 * n))
        .map(|_| {
            let body = random_body(rng, &atoms, 2);
            if rng.gen_bool(0.1) {
                CausalRule::constraint(body)
            } else {
                CausalRule::to_lit(body, random_literal(rng, &atoms))
            }
        })
        .collect();
    let mut premises = Vec::new();
    for a in 0..n {
        if rng.gen_bool(0.6) {
            premises.push(Literal::neg(a));
        }
        if rng.gen_bool(0.4) {
            premises.push(Literal::pos(a));
        }
    }
    let observations: Vec<Formula> = (0..rng.gen_range(0..=2))
        .map(|_| random_formula(rng, &atoms, 2))
        .collect();
    DetCausalSystem::new(alphabet(n))
        .with_rules(rules)
        .with_premises(premises)
        .with_observations(observations)
}

/// Acyclic theory: rule heads only depend on lower atoms. Default negation
/// for every atom, both polarities for a random prefix.
pub fn random_acyclic_det(rng: &mut TestRng, max_atoms: usize) -> DetCausalSystem {
    let n = rng.gen_range(1..=max_atoms);
    let pure = rng.gen_range(0..=n.min(2));
    let mut rules = Vec::new();
    for v in pure..n {
        let lower: Vec<usize> = (0..v).collect();
        for _ in 0..rng.gen_range(0..=2) {
            let body = random_body(rng, &lower, 2);
            rules.push(CausalRule::to_lit(body, Literal::new(v, rng.gen_bool(0.7))));
        }
    }
    let mut premises: Vec<Literal> = (0..n).map(Literal::neg).collect();
    premises.extend((0..pure).map(Literal::pos));
    DetCausalSystem::new(alphabet(n))
        .with_rules(rules)
        .with_premises(premises)
}

/// Acyclic model: externals first, each internal a random formula of
/// earlier variables.
pub fn random_scm(rng: &mut TestRng, max_vars: usize) -> Scm {
    let total = rng.gen_range(2..=max_vars);
    let ext = rng.gen_range(1..=2.min(total - 1));
    let ab = alphabet(total);
    let mut eqs = BTreeMap::new();
    for v in ext..total {
        let earlier: Vec<usize> = (0..v).collect();
        eqs.insert(v, random_formula(rng, &earlier, 2));
    }
    Scm::new(ab, (1u32 << ext) - 1, eqs).unwrap()
}

pub fn random_probability(rng: &mut TestRng, degenerate: f64) -> f64 {
    if rng.gen_bool(degenerate) {
        if rng.gen_bool(0.5) {
            0.0
        } else {
            1.0
        }
    } else {
        rng.gen_range(0.05..0.95)
    }
}

/// Parent masks and tables of a random network: nodes in topological order,
/// at most two parents each.
pub fn random_bn_parts(rng: &mut TestRng, max_nodes: usize) -> (Vec<u32>, Vec<Vec<f64>>) {
    let n = rng.gen_range(1..=max_nodes);
    let mut parents = Vec::with_capacity(n);
    let mut tables = Vec::with_capacity(n);
    for v in 0..n {
        let mut pool: Vec<usize> = (0..v).collect();
        pool.shuffle(rng);
        let k = rng.gen_range(0..=pool.len().min(2));
        let pa = pool[..k].iter().fold(0u32, |m, &p| m | 1 << p);
        // Sources stay non-degenerate so every situation has mass.
        let degenerate = if pa == 0 { 0.0 } else { 0.1 };
        let rows = (0..1usize << k)
            .map(|_| random_probability(rng, degenerate))
            .collect();
        parents.push(pa);
        tables.push(rows);
    }
    (parents, tables)
}

pub fn bn_from_parts(parents: &[u32], tables: &[Vec<f64>]) -> BayesNet {
    BayesNet::new(alphabet(parents.len()), parents.to_vec(), tables.to_vec()).unwrap()
}

pub fn random_weight(rng: &mut TestRng) -> Weight {
    match rng.gen_range(0..10) {
        0 => Weight::POS_INF,
        1 => Weight::NEG_INF,
        _ => Weight::new(rng.gen_range(-3.0..3.0)).unwrap(),
    }
}

/// Max-entropy system with one or two pure atoms, default negation for the
/// rest and rules headed only in non-pure atoms.
pub fn random_maxent_system(rng: &mut TestRng, max_atoms: usize) -> MaxEntCausalSystem {
    let n = rng.gen_range(2..=max_atoms);
    let pure = rng.gen_range(1..=2.min(n - 1));
    let atoms: Vec<usize> = (0..n).collect();
    let inner: Vec<usize> = (pure..n).collect();
    let rules: Vec<WeightedRule> = (0..rng.gen_range(1..=n + 2))
        .map(|_| {
            let body = random_body(rng, &atoms, 2);
            let head = random_literal(rng, &inner);
            WeightedRule::new(random_weight(rng), CausalRule::to_lit(body, head))
        })
        .collect();
    let mut premises: Vec<Literal> = (0..n).map(Literal::neg).collect();
    premises.extend((0..pure).map(Literal::pos));
    let ab = alphabet(n);
    let pure_atoms: Vec<usize> = (0..pure).collect();
    let sigma = LogLinearModel::with_constraints(
        ab.clone(),
        (0..rng.gen_range(0..=2)).map(|_| {
            (
                Weight::new(rng.gen_range(-2.0..2.0)).unwrap(),
                random_formula(rng, &pure_atoms, 2),
            )
        }),
    );
    MaxEntCausalSystem::new(ab)
        .with_rules(rules)
        .with_premises(premises)
        .with_sigma(sigma)
}

pub fn all_worlds(n: usize) -> impl Iterator<Item = World> {
    (0..1u32 << n).map(World)
}
