use alloc::string::String;

/// Errors raised by the discretization, root finding and counting routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is out of range. `field` names the offending input.
    #[error("invalid configuration `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    /// The sampled model violates a structural requirement.
    #[error("invalid model: {0}")]
    Model(String),

    /// A spectral parameter lies outside the half-line where the resolvents exist.
    #[error("z = {z} is outside the admissible domain z < {upper}")]
    Domain { z: f64, upper: f64 },

    #[error("length mismatch: expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Config {
        field,
        reason: reason.into(),
    }
}
