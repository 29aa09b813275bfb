use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside the support: {0}")]
    OutOfSupport(String),

    #[error("natural parameter outside the natural domain: {0}")]
    NaturalDomainViolation(String),

    #[error("matrix is not symmetric positive definite")]
    NotSpd,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate omega solution: {0}")]
    DegenerateSolution(String),

    #[error("alpha {0} outside the admissible range")]
    InvalidAlpha(f64),

    #[error("numerical procedure did not converge: {0}")]
    NonConvergent(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of a numerical procedure rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergent(_) | Error::DegenerateSolution(_))
    }
}
