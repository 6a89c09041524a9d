use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frequency {0} outside [0, 1)")]
    FrequencyOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible signal request: {0}")]
    Infeasible(String),

    #[error("rejection sampling gave up after {0} attempts")]
    SamplingBudgetExceeded(usize),

    #[error("noise level is zero: {0}")]
    ZeroNoise(&'static str),

    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },

    #[error("singular Fisher information (condition number {condition:.3e})")]
    SingularFim { condition: f64 },

    #[error("no dual-polynomial peaks reach the localization level")]
    NoPeaks,

    #[error("model order {k} leaves no noise subspace (dimension {dim})")]
    ModelOrder { k: usize, dim: usize },

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("eigendecomposition failed")]
    Eigen,
}
