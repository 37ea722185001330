//! Error type shared by every module in the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Operands have incompatible variants, dimensions, or grids.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A NaN or infinity was encountered at ingestion.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A quadrature grid is not strictly increasing from 0 to 1.
    #[error("grid violation: {0}")]
    GridViolation(String),

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every pairwise distance in the sample is zero.
    #[error("degenerate sample: all pairwise squared distances are zero")]
    DegenerateSample,

    /// A weight array does not match the sample size.
    #[error("weight array has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    /// The operation needs more observations than the sample holds.
    #[error("sample too small: n = {n}, need at least {min}")]
    SampleTooSmall { n: usize, min: usize },

    /// The weight family carries no regularity certificate.
    #[error("weight family {0} has no certificate and is excluded from inference")]
    UnsupportedFamily(String),

    /// A certificate whose mean-square limit cannot normalize the statistic.
    #[error("invalid certificate: mean-square limit {w_squared} must exceed 1")]
    InvalidCertificate { w_squared: f64 },

    /// The variance estimate is too close to zero to studentize.
    #[error("degenerate variance estimate: sigma_sq = {sigma_sq:e}")]
    DegenerateVariance { sigma_sq: f64 },

    /// An argument such as a probability lies outside its open interval.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// A simulation scenario with nonsensical sizes or parameters.
    #[error("bad scenario: {0}")]
    BadScenario(String),

    /// Too large a fraction of Monte Carlo replicates was degenerate.
    #[error("{degenerate} of {replicates} replicates were degenerate (> 1%)")]
    TooManyDegenerate { degenerate: usize, replicates: usize },

    /// A field of a data file failed to parse as a number.
    #[error("parse error in {path} at row {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: usize,
        message: String,
    },

    /// The X and Y data files disagree on the number of observations.
    #[error("row count mismatch: x has {x_rows} rows, y has {y_rows}")]
    RowCountMismatch { x_rows: usize, y_rows: usize },

    /// An unbounded kernel was requested without the explicit override.
    #[error("linear kernel is unbounded; set allow_unbounded in the kernel config to use it")]
    UnboundedKernel,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a manifest, config, or scenario file.
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}
