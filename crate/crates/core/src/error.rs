use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors reported by the library.
///
/// Witness fields (node paths, rational values) are pre-rendered as strings so
/// that errors stay cheap to move around and easy to print in reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("horizon must be at least 1")]
    HorizonTooSmall,

    #[error("depth {depth} out of range on a space of horizon {horizon}")]
    DepthOutOfRange { depth: usize, horizon: usize },

    #[error("node does not belong to this space")]
    ForeignNode,

    #[error("operands were built over different spaces")]
    SpaceMismatch,

    #[error("operands carry different processes over the same space")]
    ProcessMismatch,

    #[error("invalid child probabilities under node {node}: {detail}")]
    EdgeProbabilities { node: String, detail: String },

    #[error("expected {expected} values, got {got}")]
    WrongValueCount { expected: usize, got: usize },

    #[error("negative weight at leaf {leaf}")]
    NegativeWeight { leaf: usize },

    #[error("not a submartingale: one-step drift {drift} at node {node}")]
    NotSubmartingale { node: String, drift: String },

    #[error("random time is not a stopping time (event at time {depth} splits an atom)")]
    NotStoppingTime { depth: usize },

    #[error("malformed process spec: {0}")]
    MalformedSpec(String),

    #[error("invalid rational literal {literal:?}: {detail}")]
    BadRational { literal: String, detail: String },

    #[error(
        "measure identity fails at depth {depth}, atom {atom}: \
         expectation route gives {expectation_side}, measure route gives {measure_side}"
    )]
    IdentityMismatch {
        depth: usize,
        atom: String,
        expectation_side: String,
        measure_side: String,
    },

    #[error("negative mass {mass} for the last-zero component {component}")]
    NegativeMass { component: String, mass: String },

    #[error("measure levels out of order: {lower} > {higher}")]
    LevelOrder { lower: usize, higher: usize },

    #[error("event must consist of distinct atoms of one depth: {0}")]
    BadEvent(String),

    #[error("sample count must be at least 1")]
    BadSampleCount,

    #[error("invalid scaling: {0}")]
    BadScaling(String),
}
