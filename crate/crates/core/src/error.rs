use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no modes given")]
    NoModes,

    #[error("mode {mode} has truncation {dim}, need at least 2")]
    InvalidDim { mode: usize, dim: usize },

    #[error("mode index {index} out of range for a {modes}-mode state")]
    ModeIndex { index: usize, modes: usize },

    #[error("mode {0} named twice")]
    RepeatedMode(usize),

    #[error("occupation {occupation} of mode {mode} does not fit truncation {dim}")]
    Occupation {
        mode: usize,
        occupation: usize,
        dim: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("ket norm {0} is not 1")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace {0} outside [0, 1]")]
    Trace(f64),

    #[error("truncation leak {leak:.3e} exceeds budget {budget:.3e}")]
    LeakBudget { leak: f64, budget: f64 },

    #[error("{name} = {value} is out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("covariance matrix violates the uncertainty relation (min eigenvalue {0:.3e})")]
    Unphysical(f64),

    #[error("integration became unstable at t = {t:.3e} s (covariance norm {norm:.3e})")]
    Unstable { t: f64, norm: f64 },

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

/// Rejects non-finite and non-positive values.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Parameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Parameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

pub(crate) fn unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Parameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
