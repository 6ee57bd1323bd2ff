use alloc::string::String;

/// Errors raised by the core routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A vector that must be nonempty was empty.
    #[error("empty input: {0}")]
    Empty(String),
    /// The inputs are individually valid but violate a joint contract
    /// (overlapping edge sets, a split that does not belong to the graph).
    #[error("contract violation: {0}")]
    Contract(String),
    /// The requested configuration cannot be realised (e.g. `k-` exceeds `|F-|`).
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A normalisation constant vanished.
    #[error("degenerate: {0}")]
    Degenerate(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! param_err {
    ($($arg:tt)*) => { $crate::Error::Parameter(alloc::format!($($arg)*)) };
}
pub(crate) use param_err;
