use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is numerically singular (1-norm condition estimate {cond:.3e})")]
    Singular { cond: f64 },

    #[error("not a UCP subsystem semigroup: {0}")]
    NotUcpSemigroup(String),

    #[error("extension infeasible: {0}")]
    Infeasible(String),

    #[error("not a group on the subsystem: {0}")]
    NotAGroup(String),

    #[error("extension is not unique: multi-start spread {spread:.3e} exceeds {tol:.3e}")]
    NotUnique { spread: f64, tol: f64 },

    #[error(
        "resolvent-family escalation reached omega = {omega:.3e} without a conditionally \
         completely positive generator (violation {violation:.3e}); use extend_generator instead"
    )]
    OmegaCapReached { omega: f64, violation: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
