use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("slope {slope} outside the closure of the derivative range [{lo}, {hi}]")]
    Range { slope: f64, lo: f64, hi: f64 },

    #[error("non-finite integrand {value} at t = {t}")]
    Integration { t: f64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tolerance {epsilon} is not above the minimal attainable divergence {epsilon_min}; raise the tolerance")]
    Infeasible { epsilon: f64, epsilon_min: f64 },

    #[error("problem is not well-posed: {0}")]
    NotWellPosed(String),

    #[error("{what}: no sign change on [{lo}, {hi}] (residuals {f_lo}, {f_hi})")]
    Bracket {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{what}: no convergence after {iterations} iterations (best residual {residual})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("pointwise argmin is unbounded at t = {t}")]
    UnboundedArgmin { t: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
