use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not accretive: smallest eigenvalue of the real symmetric part is {lambda:e}")]
    NonAccretive { lambda: f64 },

    #[error("invalid exponent p = {p}: {reason}")]
    InvalidExponent { p: f64, reason: &'static str },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("point lies on the singular set of the Bellman function: {0}")]
    SingularSet(&'static str),

    #[error("theorem hypothesis not satisfied: {0}")]
    HypothesisUnmet(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),
}

pub(crate) fn check_exponent_gt1(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent { p, reason: "expected 1 < p < inf" });
    }
    Ok(())
}
