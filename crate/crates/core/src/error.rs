use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid stopping pattern: {0}")]
    InvalidPattern(String),

    /// An enumeration or brute-force routine was asked to go beyond its guard.
    #[error("{what} = {value} exceeds the enumeration limit of {limit}")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("primal value of {key} is fractional ({value})")]
    NotIntegral { key: String, value: f64 },

    #[error("missing dual value for {0}")]
    MissingDual(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver backend error: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
