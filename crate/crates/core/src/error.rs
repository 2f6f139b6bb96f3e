use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window [{lo}, {hi}): {reason}")]
    InvalidWindow { lo: u64, hi: u64, reason: &'static str },

    #[error("{n} lies outside the table window [{lo}, {hi})")]
    OutOfWindow { n: u64, lo: u64, hi: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("work budget exceeded: {0}")]
    Budget(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
