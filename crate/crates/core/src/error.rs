//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid argument for a geometric or algebraic operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid field or experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Instance exceeds a solver's size cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Label interaction fails the triangle inequality required by
    /// expansion moves; carries the worst violating triple.
    #[error("metric violation: cost({a},{b}) exceeds cost({a},{c}) + cost({c},{b}) by {gap}")]
    Metric { a: u8, b: u8, c: u8, gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
