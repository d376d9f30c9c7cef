//! Error type shared across the crate.

/// Errors produced by library operations.
///
/// `InvalidArgument` covers domain violations on individual operations,
/// `Config` covers inconsistent experiment setups (grid/knot mismatches,
/// resolution-guard violations, bad ladders), and `NonFinite` reports a
/// numeric failure such as an overflowed trajectory. The CLI maps the first
/// two to exit code 1 and the last to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    NonFinite(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn non_finite(msg: impl Into<String>) -> Self {
        Error::NonFinite(msg.into())
    }
}
