use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("photon number must be at least 1 (got {0})")]
    ZeroPhotons(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is {0} instead of 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("state vector has norm {0} instead of 1")]
    NotNormalized(f64),

    #[error("direction vector must be a unit vector (norm {0})")]
    InvalidDirection(f64),

    #[error("moment order must be 1, 2 or 3 (got {0})")]
    InvalidOrder(u32),

    #[error("invalid sampling: {0}")]
    InvalidSampling(String),

    #[error("invariance pattern {0} is not physically possible for three photons")]
    ImpossibleClass(String),

    #[error("unknown state name `{0}`")]
    UnknownState(String),

    #[error("invalid optical element: {0}")]
    InvalidElement(String),

    #[error("post-selection has zero probability")]
    ZeroProbability,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty data")]
    EmptyData,

    #[error("invalid spectral grid: {0}")]
    InvalidGrid(String),

    #[error("filter transmits no amplitude")]
    ZeroTransmission,

    #[error("state file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
