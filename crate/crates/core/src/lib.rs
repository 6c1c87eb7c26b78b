//! Exact engine for deterministic and maximum-entropy causal systems.
//!
//! Everything is computed by enumeration over a capped alphabet, so results
//! are exact up to floating-point rounding.

pub mod alphabet;
pub mod bayesnet;
pub mod detsem;
pub mod dsl;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod intervene;
pub mod logic;
pub mod loglin;
pub mod maxent;
pub mod rule;
pub mod scm;
pub mod system;

pub use alphabet::{Alphabet, LitSet, Literal, World};
pub use error::{Error, Result};
pub use formula::Formula;
pub use rule::{CausalRule, Head, Weight, WeightedRule};
pub use system::{DetCausalSystem, MaxEntCausalSystem};
