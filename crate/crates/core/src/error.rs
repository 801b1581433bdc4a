use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unlabeled pool is empty")]
    EmptyPool,

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("pool consistency violated: {0}")]
    PoolConsistency(String),

    #[error("format error at byte offset {offset}: {msg}")]
    Format { offset: u64, msg: String },

    #[error("label {label} at position {position} is not below class count {classes}")]
    LabelRange {
        position: usize,
        label: u32,
        classes: u32,
    },

    #[error("dataset consistency: {0}")]
    Consistency(String),

    #[error("cannot train on an empty labeled set")]
    CannotTrain,

    #[error("training diverged at step {step}: loss is not finite")]
    Divergence { step: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("requested {requested} instances but only {available} candidates are available")]
    InsufficientCandidates { requested: usize, available: usize },

    #[error("strategy requires a non-empty labeled pool (data warm-start)")]
    NeedsWarmStart,

    #[error("invalid strategy input: {0}")]
    InvalidInput(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("incomplete suite: {0}")]
    IncompleteSuite(String),

    #[error("parse error at line {line}: {msg}")]
    Parse {
        line: usize,
        /// Last cycle entry that parsed completely before the failure.
        last_complete_cycle: Option<usize>,
        msg: String,
    },

    #[error("cycle {cycle}: {source}")]
    Cycle {
        cycle: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            msg: msg.into(),
        }
    }

    pub(crate) fn at_cycle(self, cycle: usize) -> Self {
        Error::Cycle {
            cycle,
            source: Box::new(self),
        }
    }
}
