use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmsError {
    /// Shape or structure mismatch (non-square, non-Hermitian, wrong length).
    #[error("structural error: {0}")]
    Structure(String),

    #[error("size error: {0}")]
    Size(String),

    /// An iterative factorization ran out of sweeps.
    #[error("no convergence after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// Matrix is singular or indefinite for the requested solve.
    #[error("matrix is not positive definite (smallest eigenvalue {smallest:.3e}, largest {largest:.3e})")]
    Rank { smallest: f64, largest: f64 },

    #[error("degenerate signal: {0}")]
    Degenerate(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Step size outside the stability region of a closed form.
    #[error("unstable step size mu={mu} (bound {bound})")]
    Unstable { mu: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("all {runs} Monte Carlo runs diverged")]
    AllDiverged { runs: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, LmsError>;
