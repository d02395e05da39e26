use thiserror::Error;

use crate::numerics::SolveError;

/// Errors raised by the model evaluators and the equilibrium solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} = {value} ({requirement})")]
    Domain {
        what: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("singular feedback term: {0}")]
    Singular(&'static str),

    #[error("degenerate static equilibrium: firm count {n_tilde} does not exceed one")]
    DegenerateEquilibrium { x_tilde: f64, n_tilde: f64 },

    #[error("first-order condition has no positive root at n = {n}")]
    NoPositiveOutput { n: f64 },

    #[error("integration step failed at t = {t}: non-finite state")]
    StepFailure { t: f64 },

    #[error(transparent)]
    Solve(#[from] SolveError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            requirement: "must be finite and > 0",
        })
    }
}

pub(crate) fn require_firm_count(n: f64) -> Result<()> {
    if n >= 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "n",
            value: n,
            requirement: "firm count must be >= 1",
        })
    }
}
