use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature did not converge after {evaluations} evaluations: value {value}, error estimate {err_estimate}")]
    NonConvergence {
        value: f64,
        err_estimate: f64,
        evaluations: usize,
    },

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("theta must lie in (0, 1], got {0}")]
    InvalidTheta(f64),

    #[error("unstable resolution: {0}")]
    UnstableResolution(String),

    #[error("statistic grid too coarse: interpolation error estimate {estimate:.3e} exceeds {limit:.0e}")]
    GridTooCoarse { estimate: f64, limit: f64 },

    #[error("policy does not match model: {0}")]
    PolicyMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the numerical method rather than by the request itself.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::UnstableResolution(_)
                | Error::GridTooCoarse { .. }
                | Error::Io(_)
        )
    }
}
