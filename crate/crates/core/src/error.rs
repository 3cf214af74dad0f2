use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the open unit ball (|z|^2 = {sq_norm})")]
    OutsideBall { sq_norm: f64 },

    #[error("point is not on the unit sphere (|z|^2 = {sq_norm})")]
    NotOnSphere { sq_norm: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not unitary (max residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("kernel series needs {needed} terms, cap is {max} (|a| = {modulus})")]
    SeriesTruncation {
        needed: usize,
        max: usize,
        modulus: f64,
    },

    #[error("non-finite integrand sample at {point:?}")]
    NonFiniteSample { point: Vec<(f64, f64)> },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("backend {backend} cannot integrate this function: {reason}")]
    BackendUnsupported { backend: &'static str, reason: String },

    #[error("function evaluation failed: {0}")]
    Evaluation(String),

    #[error("norm of reference function is zero")]
    ZeroNorm,

    #[error("search produced no finite candidate values")]
    SearchExhausted,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
