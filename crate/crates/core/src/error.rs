use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the forecasting pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The Gram matrix could not be factorized (singular or indefinite).
    #[error("linear system is singular or not positive definite")]
    SingularSystem,

    /// A hyperparameter is outside its admissible range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Reservoir weight generation kept producing unusable draws.
    #[error("reservoir generation failed: {0}")]
    Generation(String),

    /// A series is too short for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A series is constant where variation is required.
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    /// The reference sequence of a normalized metric is identically zero.
    #[error("reference sequence is identically zero")]
    ZeroReference,

    /// Numerical integration left the finite range.
    #[error("integration diverged at sample {step}")]
    Integration { step: usize },

    /// Too many Monte-Carlo trials failed to aggregate a report.
    #[error("ablation failed: {0}")]
    Ablation(String),

    /// Statistics were requested for an empty group.
    #[error("empty aggregation group: {0}")]
    Aggregation(String),

    /// A plain argument error (bad tolerance, bad range, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A NaN or infinity showed up where finite values are required.
    #[error("non-finite value in {0}")]
    NonFinite(String),
}
