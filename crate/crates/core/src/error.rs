use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (max |M - M^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not traceless (|tr| = {trace:.3e}): {context}")]
    NotTraceless { trace: f64, context: String },

    #[error("site {site} out of range for layout with {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("joint dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("state is not normalized (norm = {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("matrix-exponential action did not converge: {0}")]
    NoConvergence(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("missing parameter {0:?}")]
    MissingParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closure exceeded {max_ops} operators before terminating")]
    ClosureInconclusive { max_ops: usize },

    #[error("state is not of branching form: {0}")]
    NotBranching(String),

    #[error("trace of density matrix deviates from one: {trace:.3e}")]
    BadTrace { trace: f64 },

    #[error("cannot sample {requested} fragments out of {available}")]
    TooManySamples { requested: u128, available: u128 },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("incompatible initial state: {0}")]
    IncompatibleState(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
