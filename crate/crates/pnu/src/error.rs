//! Crate-wide error type.

use std::fmt;

/// Errors produced by data loading, risk construction, training, and the
/// experiment harness.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid configuration: bad parameter ranges, incompatible loss/family
    /// pairs, malformed grids.
    Config(String),
    /// Invalid or insufficient data: dimension mismatches, undersized sets,
    /// degenerate geometry.
    Data(String),
    /// CSV parse failure, with the 1-based data row that caused it.
    Parse { row: usize, message: String },
    /// A sampling request exceeded the pool, naming the short class.
    Capacity {
        class: &'static str,
        requested: usize,
        available: usize,
    },
    /// A risk term with nonzero weight referenced an empty sample set.
    Evaluation(String),
    /// Numerical failure (singular system, non-convergence). Carries the
    /// objective trace when an iterative solver gave up.
    Numerical { message: String, trace: Vec<f64> },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical {
            message: msg.into(),
            trace: Vec::new(),
        }
    }

    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// data-dependent errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Numerical { .. } => 2,
            Error::Data(_)
            | Error::Parse { .. }
            | Error::Capacity { .. }
            | Error::Evaluation(_) => 3,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Parse { row, message } => write!(f, "parse error at row {row}: {message}"),
            Error::Capacity {
                class,
                requested,
                available,
            } => write!(
                f,
                "capacity error: requested {requested} {class} samples, pool has {available}"
            ),
            Error::Evaluation(msg) => write!(f, "evaluation error: {msg}"),
            Error::Numerical { message, .. } => write!(f, "numerical error: {message}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
