use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("lattice rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("subspace is not contained in the given ambient subspace")]
    NotContained,

    #[error("index preorders differ")]
    IndexMismatch,

    #[error("lattice map is not order preserving for the given cones")]
    NotOrderPreserving,

    #[error("restriction hypotheses fail: {0}")]
    RestrictionHypotheses(String),

    #[error("index cone is not strict; normalize the multifiltration first")]
    NonStrictCone,

    #[error("{0}")]
    NonGeneratingCone(String),

    #[error("multifiltration is not exhaustive")]
    NotExhaustive,

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("oracle cap exceeded: {found} candidate points, cap is {cap}")]
    CapExceeded { found: usize, cap: usize },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("integer overflow in lattice arithmetic")]
    Overflow,

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("incompatible family: {0}")]
    IncompatibleFamily(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
