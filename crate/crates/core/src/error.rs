use thiserror::Error;

use crate::manifold::ScalarField;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "grid mismatch: expected L={expected_l} N={expected_n}, found L={found_l} N={found_n}"
    )]
    GridMismatch {
        expected_l: f64,
        expected_n: usize,
        found_l: f64,
        found_n: usize,
    },

    #[error("invalid field: {0}")]
    InvalidField(String),

    /// An iterative method ran out of iterations. The last iterate is kept so
    /// callers can inspect how far it got.
    #[error("no convergence after {iterations} iterations (last estimate {last_estimate})")]
    ConvergenceFailure {
        iterations: usize,
        last_estimate: f64,
        last_iterate: Box<ScalarField>,
    },

    #[error("no negative-energy endpoint found (lowest energy seen {best_energy})")]
    NoNegativeEndpoint { best_energy: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
