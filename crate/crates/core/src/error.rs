use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dataset has no instances")]
    EmptyDataset,
    #[error("{what} has {actual} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("label {label} at row {row} is outside [0, {num_classes})")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        num_classes: usize,
    },
    #[error("class {0} has no instances")]
    MissingClass(usize),
    #[error("duplicate instance id {0:?}")]
    DuplicateId(String),
    #[error("non-finite feature value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("class {class} has {count} members, fewer than k = {k}")]
    InfeasibleStratification {
        class: usize,
        count: usize,
        k: usize,
    },
    #[error("invalid fold count k = {0}")]
    InvalidFoldCount(usize),
    #[error("fold {fold} is out of range for k = {k}")]
    FoldOutOfRange { fold: usize, k: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("k-nearest neighbours needs at least {needed} training instances, got {actual}")]
    TooFewInstances { needed: usize, actual: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("invalid probability vector")]
    InvalidProbabilities,
    #[error("AUC is undefined: {0}")]
    UndefinedAuc(&'static str),
    #[error("learning curve has {len} AUC values, at least 8 are required")]
    CurveTooShort { len: usize },
    #[error("oracle has no label for instance {0:?}")]
    OracleMiss(String),
}
