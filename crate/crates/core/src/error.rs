use alloc::string::String;

/// Errors raised by the estimators and transforms in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("length mismatch: {what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("filter `{name}` is not paraunitary: {reason}")]
    NotParaunitary { name: String, reason: String },

    #[error(
        "depth {depth} not feasible for length {length}: {reason} (max feasible depth {max_depth})"
    )]
    InfeasibleDepth {
        depth: u32,
        length: usize,
        max_depth: u32,
        reason: &'static str,
    },

    #[error("band [{lo}, {hi}] covers {bins} grid points, at least 2 are required")]
    BandTooNarrow { lo: f64, hi: f64, bins: usize },

    #[error("estimate peak at {found} is not within {tolerance} of hint {hint}")]
    PeakNotNearHint {
        hint: f64,
        found: f64,
        tolerance: f64,
    },

    #[error("reports come from different scenarios: `{first}` and `{other}`")]
    MixedScenarios { first: String, other: String },

    #[error("baseline `{0}` not present among the reports")]
    MissingBaseline(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
