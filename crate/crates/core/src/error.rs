use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input data are unusable.
    Input,
    /// The requested configuration is invalid or inconsistent.
    Config,
    /// A numerical procedure failed on otherwise valid input.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("input contains no observations")]
    Empty,
    #[error("row {row}: cannot parse date `{value}` with format `{format}`")]
    BadDate {
        row: usize,
        value: String,
        format: String,
    },
    #[error("row {row}: cannot parse value `{value}`")]
    BadValue { row: usize, value: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("dates must be strictly increasing (violated at {0})")]
    Unordered(NaiveDate),
    #[error("non-finite value at {0}")]
    NonFinite(NaiveDate),
    #[error("non-positive value {value} at {date}; cannot take logarithm")]
    NonPositive { date: NaiveDate, value: f64 },
    #[error("series is already log-transformed")]
    AlreadyLog,
    #[error("a series needs at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("dates and values differ in length ({dates} vs {values})")]
    LengthMismatch { dates: usize, values: usize },
    #[error("invalid slice [{start}, {end}) of a series with {len} observations")]
    BadSlice { start: usize, end: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("window of {len} observations is too short; at least {needed} required")]
    WindowTooShort { len: usize, needed: usize },
    #[error("degenerate window")]
    DegenerateWindow,
    #[error("every window in the sample is degenerate")]
    AllDegenerate,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{missing} of {total} Monte Carlo replications were degenerate (budget 1%)")]
    MissingReplications { missing: usize, total: usize },
    #[error("statistic and critical-value sequences are not aligned")]
    Misaligned,
    #[error("episodes overlap or are out of order")]
    OverlappingEpisodes,
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Io { .. } | Csv(_) | MissingColumn(_) | Empty | BadDate { .. } | BadValue { .. }
            | DuplicateDate(_) | Unordered(_) | NonFinite(_) | NonPositive { .. } | TooShort(_)
            | LengthMismatch { .. } | Json(_) => ErrorKind::Input,
            AlreadyLog | BadSlice { .. } | DimensionMismatch(_) | WindowTooShort { .. }
            | Config(_) | Misaligned | OverlappingEpisodes => ErrorKind::Config,
            DegenerateWindow | AllDegenerate | MissingReplications { .. } => ErrorKind::Numerical,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
