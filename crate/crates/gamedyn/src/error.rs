use thiserror::Error;

/// Crate-wide error type. Diagnostics carry `f64` copies of the offending
/// values regardless of the scalar type in use.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input at index {index}")]
    NonFiniteInput { index: usize },

    #[error("non-finite state at index {index} (t = {t})")]
    NonFiniteState { index: usize, t: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("point on the boundary of dom(∂h): coordinate {index} = {value}")]
    BoundaryPoint { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("trajectory diverged at t = {t}: |z|_inf = {max_abs:e}")]
    Divergence { t: f64, max_abs: f64 },

    #[error("solver did not converge in {iterations} iterations (last residual {residual:e}){hint}")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        hint: String,
    },

    #[error("metric/bound mismatch: {0}")]
    MetricMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite<T: crate::Scalar>(v: &[T]) -> Result<()> {
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput { index: i });
        }
    }
    Ok(())
}
