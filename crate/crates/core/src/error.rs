use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("zero frequency is excluded")]
    ZeroFrequency,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root {root} lies within {tol:e} of the imaginary axis; the operator is not elliptic at this frequency")]
    ImaginaryAxisRoot { root: String, tol: f64 },

    #[error("found {found} roots on the requested side, expected {expected}")]
    RootCount { expected: usize, found: usize },

    #[error("root finder did not converge")]
    RootFinding,

    #[error("singular or ill-conditioned matrix (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (achieved {achieved:e})")]
    Quadrature { tol: f64, achieved: f64 },

    #[error("pair is not decaying: Re(lambda + conj(mu)) = {0}")]
    NotDecaying(f64),

    #[error("row {row}: {message}")]
    Input { row: usize, message: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
