use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate cube factor (slope must be strictly positive)")]
    DegenerateCube,

    #[error("factor {index} does not map [-1,1] into [-1,1]")]
    NotALittleCube { index: usize },

    #[error("cubes overlap: configuration interiors are not disjoint")]
    OverlappingCubes,

    #[error("arity mismatch: expected {expected} inputs, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid knot: {0}")]
    InvalidKnot(String),

    #[error("knot is not embedded: {0}")]
    NotEmbedded(String),

    #[error("supports overlap")]
    OverlappingSupports,

    #[error("radius {radius} exceeds the allowed bound {limit}")]
    RadiusTooLarge { radius: f64, limit: f64 },

    #[error("perturbation magnitude {magnitude} exceeds the allowed bound {limit}")]
    PerturbationTooLarge { magnitude: f64, limit: f64 },

    /// Non-generic input; callers are expected to perturb and retry.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("degeneracy persisted after {retries} perturbation retries")]
    DegeneracyBudgetExhausted { retries: usize },

    #[error("loop is not based: {0}")]
    NotBased(String),

    #[error("loop is not closed: {0}")]
    NotClosed(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("unknown knot name `{0}`")]
    UnknownKnot(String),

    #[error("leaf `{leaf}` cannot evaluate: {reason}")]
    LeafDomain { leaf: String, reason: String },

    #[error("top face mismatch: deviation {deviation}")]
    FaceMismatch { deviation: f64 },

    #[error("no generic projection direction found after {attempts} attempts")]
    NoGenericProjection { attempts: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
