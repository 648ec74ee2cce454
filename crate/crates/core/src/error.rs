use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("expression is not a polynomial: {0}")]
    NotPolynomial(String),

    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,

    #[error("bad prime {0}: it divides a coefficient denominator")]
    BadPrime(u64),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("polynomial with {terms} terms exceeds the size bound of {bound} terms (raise it with CCC_MAX_TERMS)")]
    TermBound { terms: usize, bound: usize },

    #[error("singular coframe: {0}")]
    SingularCoframe(String),

    #[error("dimension {0} is too small: the conformal criterion needs n >= 3")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("invalid hypersurface: {0}")]
    InvalidHypersurface(String),

    #[error("sampling failure: found {found} of {needed} admissible points after {attempts} attempts")]
    SamplingFailure {
        found: usize,
        needed: usize,
        attempts: usize,
    },

    #[error("kernel dimension did not stabilize after {doublings} sample doublings (dims {dims:?})")]
    NotSaturated { doublings: usize, dims: Vec<usize> },

    #[error("no admissible integration path from the base point: {0}")]
    NoAdmissiblePath(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal identity violation: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
