mod common;

use common::{holds, oracle_causal_worlds, random_formula, rng, worlds_of};
use csys::detsem::{
    causal_worlds, causal_worlds_by_splitting, completion, knows_that, knows_why, necessity_event,
    sufficiency_event,
};
use csys::error::Error;
use csys::intervene::{modify_det, modify_maxent, InterventionAssignment};
use csys::logic::enumerate_models;
use csys::system::DiagnosticKind;
use csys::{Formula, Literal};
use proptest::prelude::*;
use rand::Rng;

fn random_assignment(r: &mut common::TestRng, n: usize) -> InterventionAssignment {
    let atoms: Vec<usize> = (0..n).collect();
    InterventionAssignment::from_literals(
        (0..r.gen_range(0..=2)).map(|_| common::random_literal(r, &atoms)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn splitting_agrees_with_closure(seed in any::<u64>()) {
        let sys = common::random_det_system(&mut rng(seed), 6);
        let direct = causal_worlds(&sys).unwrap();
        prop_assert_eq!(worlds_of(&direct), oracle_causal_worlds(&sys));
        prop_assert_eq!(causal_worlds_by_splitting(&sys).unwrap(), direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn causal_worlds_satisfy_the_completion(seed in any::<u64>()) {
        let sys = common::random_det_system(&mut rng(seed), 6);
        let comp = Formula::conjunction(completion(&sys.explanatory_closure(), sys.alphabet.len()));
        let models: Vec<u32> = enumerate_models(&sys.alphabet, &comp).unwrap().iter().map(|w| w.0).collect();
        for w in worlds_of(&causal_worlds(&sys).unwrap()) {
            prop_assert!(models.contains(&w));
        }
        let both = necessity_event(&sys).unwrap().intersect(&sufficiency_event(&sys).unwrap());
        for w in worlds_of(&causal_worlds(&sys).unwrap()) {
            prop_assert!(both.contains(csys::World(w)));
        }
    }

    #[test]
    fn acyclic_completion_is_exact(seed in any::<u64>()) {
        let sys = common::random_acyclic_det(&mut rng(seed), 6);
        let comp = Formula::conjunction(completion(&sys.explanatory_closure(), sys.alphabet.len()));
        let models: Vec<u32> = enumerate_models(&sys.alphabet, &comp).unwrap().iter().map(|w| w.0).collect();
        prop_assert_eq!(worlds_of(&causal_worlds(&sys).unwrap()), models);
    }

    #[test]
    fn observations_only_shrink(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = common::random_det_system(&mut r, 6);
        let atoms: Vec<usize> = (0..sys.alphabet.len()).collect();
        let extra = random_formula(&mut r, &atoms, 2);
        let before = causal_worlds(&sys).unwrap();
        let after = causal_worlds(&sys.clone().with_observations([extra.clone()])).unwrap();
        prop_assert!(after.is_subset(&before));
        let kept: Vec<u32> = worlds_of(&before).into_iter().filter(|&w| holds(&extra, w)).collect();
        prop_assert_eq!(worlds_of(&after), kept);
    }

    #[test]
    fn knowledge_why_implies_knowledge_that(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = common::random_det_system(&mut r, 5);
        let atoms: Vec<usize> = (0..sys.alphabet.len()).collect();
        let phi = random_formula(&mut r, &atoms, 2);
        match knows_why(&sys, &phi) {
            Ok(true) => prop_assert!(knows_that(&sys, &phi).unwrap()),
            Ok(false) | Err(Error::NoDemonstrations(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn last_intervention_wins(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = common::random_det_system(&mut r, 5);
        let atom = r.gen_range(0..sys.alphabet.len());
        let first = r.gen_bool(0.5);
        let last = r.gen_bool(0.5);
        let mut twice = InterventionAssignment::new();
        twice.set(atom, first);
        twice.set(atom, last);
        let once = InterventionAssignment::from_literals([Literal::new(atom, last)]);
        prop_assert_eq!(modify_det(&sys, &twice), modify_det(&sys, &once));
        let diags = twice.diagnostics(&sys.alphabet);
        prop_assert_eq!(diags.len(), 1);
        prop_assert_eq!(diags[0].kind, DiagnosticKind::RepeatedIntervention);
        prop_assert!(once.diagnostics(&sys.alphabet).is_empty());
    }

    #[test]
    fn surgery_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let det = common::random_det_system(&mut r, 5);
        let i = random_assignment(&mut r, det.alphabet.len());
        let once = modify_det(&det, &i);
        prop_assert_eq!(modify_det(&once, &i), once.clone());
        // Intervened atoms end up fixed in every causal world.
        for w in causal_worlds(&once).unwrap().worlds() {
            for l in i.literals() {
                prop_assert!(l.holds_in(*w));
            }
        }

        let me = common::random_maxent_system(&mut r, 5);
        let i = random_assignment(&mut r, me.alphabet.len());
        let once = modify_maxent(&me, &i);
        prop_assert_eq!(modify_maxent(&once, &i), once);
    }
}
