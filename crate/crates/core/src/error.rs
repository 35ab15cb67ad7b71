//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A series, transformation or window-doubling loop ran out of budget.
    #[error("no convergence in {op}: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    /// A matrix or block that must be invertible is not.
    #[error("singular matrix in {op}: {detail}")]
    Singular { op: &'static str, detail: String },

    /// The covariance violates the two-mode uncertainty relations.
    #[error("uncertainty relation violated: d2 = {d2}, d0 = {d0}")]
    Uncertainty { d2: f64, d0: f64 },

    /// A covariance matrix failed validation.
    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    /// Two independent evaluations of the same quantity disagree.
    #[error("self-check mismatch in {op}: {detail}")]
    SelfCheck { op: &'static str, detail: String },

    /// Parameters outside the validity range of an approximation.
    #[error("approximation not valid: {0}")]
    Validity(String),

    /// Integration step too coarse for the fastest oscillation.
    #[error("integration step {step} exceeds the limit {limit}")]
    StepTooLarge { step: f64, limit: f64 },

    /// Mode pair without a tabulated closed form.
    #[error("no closed form for mode pair ({0}, {1})")]
    UnsupportedPair(i64, i64),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn singular(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Singular { op, detail: detail.into() }
    }

    pub(crate) fn no_convergence(op: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence { op, detail: detail.into() }
    }
}
