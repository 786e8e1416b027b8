use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inversion of a quaternion with vanishing norm.
    #[error("singular input: {0}")]
    SingularInput(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A linear system or closed-form denominator vanished.
    #[error("singular system: {0}")]
    Singular(String),

    #[error("degenerate scale factor (alpha = 0)")]
    DegenerateScale,

    #[error("S transform undefined: first cumulant is zero")]
    UndefinedS,

    #[error("{context}: no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence {
        context: String,
        residual: f64,
        iterations: usize,
    },

    #[error("eigenvalue iteration failed to converge for block ending at row {0}")]
    EigenNoConvergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid word {0:?}: expected a non-empty sequence over {{X, X†}}")]
    InvalidWord(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn no_convergence(context: impl Into<String>, residual: f64, iterations: usize) -> Self {
        Error::NoConvergence {
            context: context.into(),
            residual,
            iterations,
        }
    }
}
