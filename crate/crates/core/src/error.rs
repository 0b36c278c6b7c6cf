use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two groups: input problems (malformed data, bad
/// parameters) and mathematical precondition failures (a moment matrix that
/// is not positive definite, too few moments for the requested order).
/// [`Error::is_precondition`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("moment sequence is empty")]
    EmptyMoments,

    #[error("moments not normalized: m0 = {0}, expected 1")]
    NotNormalized(String),

    #[error("insufficient moments: need m0..m{needed}, have m0..m{available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("moment matrix is not positive definite at order {order}")]
    NotPositiveDefinite { order: usize },

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("order too small: requested {requested}, available {available}")]
    OrderTooSmall { requested: usize, available: usize },

    #[error("even moment m{index} is not strictly positive")]
    NonPositiveMoment { index: usize },

    #[error("unknown moment family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for failures of a mathematical precondition rather than of the
    /// input encoding.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InsufficientMoments { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::ZeroDiagonal { .. }
                | Error::OrderTooSmall { .. }
                | Error::NonPositiveMoment { .. }
                | Error::Numeric(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
