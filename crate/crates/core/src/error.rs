use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size guard of one of the solvers was violated.
    #[error("size guard: {what} (limit {limit}, requested {requested})")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The requested engine cannot handle this model or mode.
    #[error("engine '{engine}' cannot handle this request: {reason}")]
    EngineMismatch { engine: String, reason: String },

    #[error("unknown engine '{0}'")]
    UnknownEngine(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ground-state concurrence is zero (g(0) = {0:.3e}); T* undefined")]
    NoPositiveConcurrence(f64),

    #[error("no sign change of the concurrence argument between {lo:.3e} and {hi:.3e}")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}
