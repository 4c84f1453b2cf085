use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad class of a failure, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or out-of-domain input data or arguments.
    Input,
    /// The estimator has no finite or identifiable solution for this data.
    Estimation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("function is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("row {row}: {msg}")]
    InvalidRow { row: usize, msg: String },

    #[error("epoch {index} is not greater than its predecessor")]
    NotMonotone { index: usize },

    #[error("no failures recorded; total exposure is {exposure}")]
    NoFailures { exposure: f64 },

    #[error("value {value} is outside the valid range: {msg}")]
    OutOfRange { value: f64, msg: String },

    #[error("information matrix is singular (determinant {det})")]
    SingularInformation { det: f64 },

    #[error("underdetermined: {0}")]
    Underdetermined(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("per-failure time ratio is 1; initial error count is unidentifiable")]
    DegenerateGamma,

    #[error("estimated initial error count {e0} does not exceed corrected count {corrected}")]
    NegativeEstimate { e0: f64, corrected: f64 },

    #[error("residual error content is not positive ({residual})")]
    ResidualNonPositive { residual: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("no reliability growth: B/A = {ratio} does not exceed (k-1)/2 = {threshold}")]
    NoGrowthEvidence { ratio: f64, threshold: f64 },

    #[error("at least 2 intervals are required, got {0}")]
    TooFewIntervals(usize),

    #[error("sample variance is zero; shape parameter has no finite estimate")]
    DegenerateSample,

    #[error("weights sum to {sum}, expected {expected}")]
    WeightSumMismatch { sum: f64, expected: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NoSignChange { .. } => "NoSignChange",
            Error::NonFinite { .. } => "NonFinite",
            Error::Domain(_) => "DomainError",
            Error::Parse { .. } => "ParseError",
            Error::InvalidRow { .. } => "DomainError",
            Error::NotMonotone { .. } => "NotMonotone",
            Error::NoFailures { .. } => "NoFailures",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::SingularInformation { .. } => "SingularInformation",
            Error::Underdetermined(_) => "Underdetermined",
            Error::NoConvergence(_) => "NoConvergence",
            Error::DegenerateGamma => "DegenerateGamma",
            Error::NegativeEstimate { .. } => "NegativeEstimate",
            Error::ResidualNonPositive { .. } => "ResidualNonPositive",
            Error::Degenerate(_) => "Degenerate",
            Error::NoGrowthEvidence { .. } => "NoGrowthEvidence",
            Error::TooFewIntervals(_) => "TooFewIntervals",
            Error::DegenerateSample => "DegenerateSample",
            Error::WeightSumMismatch { .. } => "WeightSumMismatch",
            Error::Io(_) => "IoError",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NoGrowthEvidence { .. }
            | Error::NoConvergence(_)
            | Error::SingularInformation { .. }
            | Error::NoSignChange { .. }
            | Error::DegenerateGamma
            | Error::NegativeEstimate { .. }
            | Error::Degenerate(_)
            | Error::DegenerateSample
            | Error::Underdetermined(_) => ErrorClass::Estimation,
            _ => ErrorClass::Input,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be finite and > 0, got {value}"
        )))
    }
}

pub(crate) fn require_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be finite and >= 0, got {value}"
        )))
    }
}
