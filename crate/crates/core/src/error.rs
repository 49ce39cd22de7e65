use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("creation sequence for n = {n} must have {expected} flags, got {got}")]
    CreationLength {
        n: usize,
        expected: usize,
        got: usize,
    },

    #[error("edge count {m} is outside 0..={max} for n = {n}")]
    EdgeCount { n: usize, m: usize, max: usize },

    #[error("n = {n} exceeds the configured cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("{name} = {value} is outside {allowed}")]
    OutOfRange {
        name: &'static str,
        value: String,
        allowed: &'static str,
    },

    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("{0} has no exact rational value")]
    Inexact(String),

    #[error("function is not convex: {0}")]
    NonConvex(String),

    #[error("no sign change of Q found for k = {k}")]
    BracketNotFound { k: u32 },

    #[error("cannot parse {0:?} as a number")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl std::fmt::Display,
        allowed: &'static str,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            allowed,
        }
    }
}
