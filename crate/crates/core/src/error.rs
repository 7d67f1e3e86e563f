use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two sequences that must be paired have different lengths.
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// Fewer elements than the operation needs.
    TooShort {
        len: usize,
        min: usize,
    },
    /// A NaN or infinite value where only finite values are allowed.
    NonFiniteValue {
        index: usize,
    },
    /// A score column whose pairs are all tied, so tau is undefined.
    DegenerateColumn {
        classifier: String,
    },
    /// A value outside the domain of the operation.
    OutOfRange {
        value: f64,
    },
    /// Requested embedding dimension exceeds `max`.
    DimensionTooLarge {
        dim: usize,
        max: usize,
    },
    EmptyInput,
    NonPositiveWeight {
        index: usize,
    },
    /// A trial present in the score matrix has no label.
    MissingLabel {
        trial: String,
    },
    /// Only one class is present among the labelled trials.
    SingleClass,
    /// A trial present in the score matrix has no group assignment.
    UnmappedTrial {
        trial: String,
    },
    /// A classifier did not score a trial that other classifiers scored.
    MissingTrial {
        classifier: String,
        trial: String,
    },
    DuplicateTrial {
        classifier: String,
        trial: String,
    },
    DuplicateClassifierId {
        classifier: String,
    },
    NonFiniteScore {
        classifier: String,
        trial: String,
    },
    DuplicateKey {
        key: String,
    },
    /// A distance matrix cell violates symmetry, zero diagonal or range rules.
    InvalidDistance {
        row: usize,
        col: usize,
        reason: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::TooShort { len, min } => write!(f, "need at least {min} elements, got {len}"),
            Error::NonFiniteValue { index } => write!(f, "non-finite value at index {index}"),
            Error::DegenerateColumn { classifier } => {
                write!(
                    f,
                    "degenerate column {classifier}: all pairs tied, tau undefined"
                )
            }
            Error::OutOfRange { value } => write!(f, "value {value} out of range"),
            Error::DimensionTooLarge { dim, max } => {
                write!(f, "embedding dimension {dim} exceeds maximum {max}")
            }
            Error::EmptyInput => write!(f, "empty input"),
            Error::NonPositiveWeight { index } => write!(f, "non-positive weight at index {index}"),
            Error::MissingLabel { trial } => write!(f, "missing label for trial {trial}"),
            Error::SingleClass => write!(f, "both positive and negative trials are required"),
            Error::UnmappedTrial { trial } => write!(f, "trial {trial} has no group"),
            Error::MissingTrial { classifier, trial } => {
                write!(f, "classifier {classifier} is missing trial {trial}")
            }
            Error::DuplicateTrial { classifier, trial } => {
                write!(f, "classifier {classifier} has duplicate trial {trial}")
            }
            Error::DuplicateClassifierId { classifier } => {
                write!(f, "duplicate classifier id {classifier}")
            }
            Error::NonFiniteScore { classifier, trial } => {
                write!(
                    f,
                    "classifier {classifier} has a non-finite score for trial {trial}"
                )
            }
            Error::DuplicateKey { key } => write!(f, "duplicate key {key}"),
            Error::InvalidDistance { row, col, reason } => {
                write!(f, "invalid distance at ({row}, {col}): {reason}")
            }
        }
    }
}

impl core::error::Error for Error {}
