use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ground-set size mismatch: expected n = {expected}, got n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("item index {index} out of range for ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("{what} exceeds the supported size: {actual} > {limit}")]
    SizeGuard {
        what: &'static str,
        limit: u128,
        actual: u128,
    },

    #[error("input is not submodular: {0}")]
    NotSubmodular(String),

    #[error("input is not monotone: {0}")]
    NotMonotone(String),

    #[error("target outside guaranteed class for (R = {r}, p = {p}): linear separator infeasible")]
    SeparatorInfeasible { r: f64, p: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn guard(what: &'static str, limit: u128, actual: u128) -> Self {
        Error::SizeGuard {
            what,
            limit,
            actual,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
