use thiserror::Error;

use crate::dsl::SourceSpan;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet has {atoms} atoms, enumeration cap is {cap}")]
    CapExceeded { atoms: usize, cap: usize },

    #[error("undecided at this scale: {0}")]
    Undecided(String),

    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),

    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("weight must not be NaN")]
    NanWeight,

    #[error("{message} at {span}")]
    Syntax { message: String, span: SourceSpan },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("inconsistent hard constraints: no world has positive weight")]
    InconsistentHardConstraints,

    #[error("conditioning on an event of probability zero")]
    ZeroEvidence,

    #[error("system does not provide demonstrations: {0}")]
    NoDemonstrations(String),

    #[error("counterfactual query: intervened atoms {0:?} occur in observations")]
    CounterfactualQuery(Vec<String>),

    #[error("intervention not feasible: {0}")]
    InterventionNotFeasible(String),

    #[error("query is not knowledge-why (causal {causal}, observation-free {restricted})")]
    NotKnowledgeWhy { causal: f64, restricted: f64 },

    #[error("model is not functional: {0}")]
    NonFunctional(String),

    #[error("cannot intervene on external variable `{0}`")]
    ExternalIntervention(String),

    #[error("incoherent weights: {0}")]
    IncoherentWeights(String),

    #[error("DNF blow-up: {clauses} clauses exceed the bound {bound}")]
    DnfBlowUp { clauses: usize, bound: usize },
}

impl Error {
    /// Errors that stem from the enumeration budget rather than the input.
    pub fn is_scale_limit(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Undecided(_))
    }
}
