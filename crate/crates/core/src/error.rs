use thiserror::Error;

/// Failures shared by every module of the crate.
///
/// `InsufficientPrecision` and `WindowTooSmall` mean the computation is sound
/// but the truncation was too coarse; callers may retry with a larger window.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("inversion of an element that is zero at the working precision")]
    ZeroAtPrecision,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("window too small: {what} (the window must reach t^{needed})")]
    WindowTooSmall { what: String, needed: i64 },
    #[error("incompatible coefficient rings: {0}")]
    IncompatibleRings(String),
    #[error("not irreducible: {0}")]
    NotIrreducible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True when retrying with a larger window or more digits could succeed.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrecision(_) | Error::WindowTooSmall { .. }
        )
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::InsufficientPrecision(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
