use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatch, bad ids, bad probabilities).
    #[error("invalid input: {0}")]
    Input(String),

    /// A pairwise-marginal bound `max(0, q_u+q_v-1) <= q_uv <= min(q_u, q_v)` is violated.
    #[error("invalid marginals on edge {edge}: {detail}")]
    InvalidMarginals { edge: usize, detail: String },

    /// An enumeration-based routine was asked to handle more than it supports.
    #[error("capacity exceeded: {what} is {size}, limit {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// A cutting-plane loop hit its iteration cap.
    #[error("no convergence after {iterations} iterations (max violation {violation:e})")]
    NonConvergence {
        iterations: usize,
        violation: f64,
        last: Vec<f64>,
    },

    /// An LP that should be feasible and bounded was reported otherwise.
    #[error("linear program unexpectedly {0}")]
    LpStatus(&'static str),

    /// Pipage rounding found no admissible move at a fractional point.
    #[error("rounding stalled: {0}")]
    Structural(String),

    /// The convex decomposition did not reproduce its input point.
    #[error("decomposition residual {residual:e} exceeds tolerance")]
    Decomposition { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
