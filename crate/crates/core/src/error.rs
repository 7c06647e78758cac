use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite potential value at {context}")]
    NonFinite { context: String },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("optimizer did not converge after {iterations} iterations (|grad|_inf = {grad_norm:e})")]
    IterationLimit { iterations: usize, grad_norm: f64 },

    #[error("no stretch-factor bracket found along this ray (level set not star-shaped?)")]
    NoBracket,

    #[error("potential is not monotone along the ray; stretch factor is not unique")]
    NonMonotone,

    #[error("level set crossing is not transverse (directional derivative {0:e})")]
    NonTransverse(f64),

    #[error("all weights vanish")]
    DegenerateWeights,

    #[error("degenerate variance")]
    DegenerateVariance,

    #[error("monomial degree {0} exceeds the Wick enumeration limit of 16")]
    DegreeTooLarge(usize),

    #[error("ODE integration failed: {0}")]
    Ode(String),

    #[error("sample {stream_id} failed: {source}")]
    Sample {
        stream_id: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
