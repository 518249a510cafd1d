use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("point set does not fit in a hemisphere")]
    NotInHemisphere,

    #[error("map family `{family}` is not defined on domain {domain}")]
    FamilyMismatch { family: String, domain: String },

    #[error("map family `{family}` expects {expected} parameters, got {got}")]
    Arity {
        family: String,
        expected: String,
        got: usize,
    },

    #[error("instance exceeds oracle scale: {0}")]
    ScaleGuard(String),

    #[error("cover degenerate: {0}")]
    CoverDegenerate(String),

    #[error("partition of unity has full support at sample {0}")]
    InteriorHit(usize),

    #[error("undersampled: {0}")]
    Undersampled(String),

    #[error("no witness found: residual {residual:.3e} exceeds {threshold:.3e}")]
    NoWitnessFound { residual: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
