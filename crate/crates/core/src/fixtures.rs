//! Worked example systems: two burning houses and the sprinkler in its
//! deterministic, structural, network and LogLinear forms.

use std::collections::BTreeMap;

use crate::alphabet::Alphabet;
use crate::bayesnet::BayesNet;
use crate::dsl::{parse_formula, parse_system, ParsedSystem};
use crate::loglin::LogLinearModel;
use crate::rule::Weight;
use crate::scm::{ProbScm, Scm};
use crate::system::DetCausalSystem;

pub const FIRE_TEXT: &str = "\
system fire det
atoms start_fire_h1 start_fire_h2 fire_h1 fire_h2.
rule fire_h2 => fire_h1.
rule fire_h1 => fire_h2.
rule start_fire_h1 => fire_h1.
rule start_fire_h2 => fire_h2.
premise start_fire_h1.
premise ~start_fire_h1.
premise start_fire_h2.
premise ~start_fire_h2.
premise ~fire_h1.
premise ~fire_h2.
";

pub const SPRINKLER_TEXT: &str = "\
system sprinkler det
atoms cloudy rain sprinkler wet slippery.
rule cloudy => rain.
rule ~cloudy => sprinkler.
rule rain => wet.
rule sprinkler => wet.
rule wet => slippery.
premise cloudy.
premise ~cloudy.
premise ~rain.
premise ~sprinkler.
premise ~wet.
premise ~slippery.
";

fn det(text: &str) -> DetCausalSystem {
    match parse_system(text).expect("fixture parses").system {
        ParsedSystem::Det(s) => s,
        ParsedSystem::MaxEnt(_) => unreachable!("fixture is deterministic"),
    }
}

/// Two houses that set each other on fire, without observations.
pub fn fire() -> DetCausalSystem {
    det(FIRE_TEXT)
}

/// [`fire`] with the observation that the first house burns.
pub fn fire_observed() -> DetCausalSystem {
    let mut sys = fire();
    let f = parse_formula(&sys.alphabet, "fire_h1").expect("atom exists");
    sys.observations.push(f);
    sys
}

/// Deterministic sprinkler with default negation.
pub fn sprinkler() -> DetCausalSystem {
    det(SPRINKLER_TEXT)
}

fn scm_from(externals: &[&str], equations: &[(&str, &str)]) -> Scm {
    let names: Vec<&str> = externals
        .iter()
        .copied()
        .chain(equations.iter().map(|(v, _)| *v))
        .collect();
    let ab = Alphabet::new(names).expect("fixture names are valid");
    let ext = (0..externals.len()).fold(0u32, |m, i| m | 1 << i);
    let eq = equations
        .iter()
        .map(|(v, f)| {
            (
                ab.index(v).expect("declared"),
                parse_formula(&ab, f).expect("fixture equation parses"),
            )
        })
        .collect();
    Scm::new(ab, ext, eq).expect("fixture model is valid")
}

/// Deterministic sprinkler model with the weather as only external.
pub fn sprinkler_scm() -> Scm {
    scm_from(
        &["cloudy"],
        &[
            ("rain", "cloudy"),
            ("sprinkler", "~cloudy"),
            ("wet", "rain | sprinkler"),
            ("slippery", "wet"),
        ],
    )
}

/// Probabilistic sprinkler model with six independent error terms.
pub fn sprinkler_pscm() -> ProbScm {
    let scm = scm_from(
        &["u1", "u2", "u3", "u4", "u5", "u6"],
        &[
            ("cloudy", "u1"),
            ("rain", "cloudy & u2"),
            ("sprinkler", "cloudy & u3 | ~cloudy & u4"),
            ("wet", "(rain | sprinkler) & u5"),
            ("slippery", "wet & u6"),
        ],
    );
    let marginals: BTreeMap<usize, f64> = [0.5, 0.6, 0.1, 0.7, 0.9, 0.8]
        .into_iter()
        .enumerate()
        .collect();
    ProbScm::from_marginals(scm, &marginals).expect("fixture distribution is valid")
}

/// Sprinkler network: cloudy -> rain, sprinkler -> wet -> slippery.
pub fn sprinkler_bn() -> BayesNet {
    let ab = Alphabet::new(["cloudy", "rain", "sprinkler", "wet", "slippery"]).expect("valid");
    let parents = vec![0, 0b00001, 0b00001, 0b00110, 0b01000];
    let cpt = vec![
        vec![0.5],
        vec![0.0, 0.6],
        vec![0.7, 0.1],
        // rows: (~rain,~sprinkler), (rain,~sprinkler), (~rain,sprinkler), (rain,sprinkler)
        vec![0.0, 0.9, 0.9, 0.9],
        vec![0.0, 0.8],
    ];
    BayesNet::new(ab, parents, cpt).expect("fixture network is valid")
}

/// Weighted constraints over the sprinkler atoms.
pub fn loglin_example() -> LogLinearModel {
    let ab = Alphabet::new(["cloudy", "rain", "sprinkler", "wet"]).expect("valid");
    let f = |s: &str| parse_formula(&ab, s).expect("fixture formula parses");
    LogLinearModel::with_constraints(
        ab.clone(),
        [
            (Weight::new(2f64.ln()).expect("finite"), f("cloudy -> rain")),
            (
                Weight::new(3f64.ln()).expect("finite"),
                f("~cloudy -> sprinkler"),
            ),
            (Weight::POS_INF, f("wet <-> rain")),
        ],
    )
}
