mod common;

use common::{holds, random_formula, rng};
use csys::graph::{causal_structure, condensation, Digraph};
use csys::logic::{entails, enumerate_models, to_dnf};
use csys::{CausalRule, Formula};
use proptest::prelude::*;
use rand::Rng;

fn random_graph(seed: u64) -> Digraph {
    let mut r = rng(seed);
    let n = r.gen_range(1..=12);
    let mut g = Digraph::new(n);
    let density = r.gen_range(0.0..0.35);
    for a in 0..n {
        for b in 0..n {
            if r.gen_bool(density) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Transitive closure by Warshall; `reach[a] >> b & 1` when b is reachable
/// from a by a path of length >= 0.
fn warshall(g: &Digraph) -> Vec<u32> {
    let n = g.node_count();
    let mut reach: Vec<u32> = (0..n).map(|a| 1 << a | g.successors(a)).collect();
    for k in 0..n {
        for a in 0..n {
            if reach[a] >> k & 1 == 1 {
                reach[a] |= reach[k];
            }
        }
    }
    reach
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn condensation_matches_reachability(seed in any::<u64>()) {
        let g = random_graph(seed);
        let n = g.node_count();
        let dag = condensation(&g);
        let reach = warshall(&g);

        // Components partition the nodes.
        let union = dag.components.iter().fold(0u32, |m, c| {
            assert_eq!(m & c, 0);
            m | c
        });
        prop_assert_eq!(union, (1u32 << n) - 1);

        for a in 0..n {
            prop_assert!(dag.components[dag.component_of[a]] >> a & 1 == 1);
            for b in 0..n {
                let mutual = reach[a] >> b & 1 == 1 && reach[b] >> a & 1 == 1;
                prop_assert_eq!(dag.component_of[a] == dag.component_of[b], mutual);
            }
        }
        // Parents are exactly the components with an edge into the child,
        // and always come earlier.
        for (c, parents) in dag.parents.iter().enumerate() {
            for &p in parents {
                prop_assert!(p < c);
            }
            let mut expected: Vec<usize> = g
                .edges()
                .into_iter()
                .filter(|&(_, b)| dag.component_of[b] == c)
                .map(|(a, _)| dag.component_of[a])
                .filter(|&p| p != c)
                .collect();
            expected.sort();
            expected.dedup();
            prop_assert_eq!(parents, &expected);
        }
    }

    #[test]
    fn structure_grows_with_rules(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = common::random_det_system(&mut r, 6);
        let n = sys.alphabet.len();
        let atoms: Vec<usize> = (0..n).collect();
        let extra = CausalRule::to_lit(
            common::random_body(&mut r, &atoms, 2),
            common::random_literal(&mut r, &atoms),
        );
        let before = causal_structure(n, &sys.rules).edges();
        let mut rules = sys.rules.clone();
        rules.push(extra.clone());
        let after = causal_structure(n, &rules).edges();
        for e in &before {
            prop_assert!(after.contains(e));
        }
        let head = extra.head.literal().unwrap().atom;
        for l in extra.body() {
            prop_assert!(after.contains(&(l.atom, head)));
        }
    }

    #[test]
    fn models_are_sorted_and_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(0..=6);
        let ab = common::alphabet(n);
        let atoms: Vec<usize> = (0..n).collect();
        let phi = random_formula(&mut r, &atoms, 4);
        let got: Vec<u32> = enumerate_models(&ab, &phi).unwrap().iter().map(|w| w.0).collect();
        let expected: Vec<u32> = (0..1u32 << n).filter(|&w| holds(&phi, w)).collect();
        prop_assert_eq!(got, expected);
        prop_assert_eq!(enumerate_models(&ab, &Formula::Top).unwrap().len(), 1 << n);
    }

    #[test]
    fn dnf_preserves_models(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let atoms: Vec<usize> = (0..n).collect();
        let phi = random_formula(&mut r, &atoms, 4);
        let clauses = to_dnf(&phi, n).unwrap();
        let back = Formula::disjunction(clauses.iter().map(|c| c.to_formula()));
        for w in 0..1u32 << n {
            prop_assert_eq!(holds(&back, w), holds(&phi, w));
            let direct = clauses.iter().any(|c| c.holds_in(csys::World(w)));
            prop_assert_eq!(direct, holds(&phi, w));
        }
        for c in &clauses {
            prop_assert!(!c.lit_set().is_contradictory());
        }
    }

    #[test]
    fn entailment_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let ab = common::alphabet(n);
        let atoms: Vec<usize> = (0..n).collect();
        let premises: Vec<Formula> = (0..r.gen_range(0..3))
            .map(|_| random_formula(&mut r, &atoms, 2))
            .collect();
        let goal = random_formula(&mut r, &atoms, 3);
        let expected = (0..1u32 << n)
            .filter(|&w| premises.iter().all(|p| holds(p, w)))
            .all(|w| holds(&goal, w));
        prop_assert_eq!(entails(&ab, &premises, &goal).unwrap(), expected);
    }

    #[test]
    fn eval_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let atoms: Vec<usize> = (0..8).collect();
        let phi = random_formula(&mut r, &atoms, 5);
        let w: u32 = r.gen_range(0..256);
        prop_assert_eq!(csys::logic::eval(&phi, csys::World(w)), holds(&phi, w));
        prop_assert_eq!(phi.nnf().eval(csys::World(w)), holds(&phi, w));
    }
}
