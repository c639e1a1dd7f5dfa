//! Dataset loading, validation, and deterministic stratified partitioning.

mod csv_io;
mod dataset;
mod split;

pub use csv_io::{load_csv, read_feature_table, write_csv, FeatureTable};
pub use dataset::Dataset;
pub use split::{stratified_kfold, stratified_split, FoldPlan, SplitPlan};

use thiserror::Error;

/// Rows are 1-based data rows (the CSV header is row 0).
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV at row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("row {row} has {found} cells, header has {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column `{column}`: value is NaN or infinite")]
    NonFinite { row: usize, column: String },
    #[error("dataset has no rows")]
    Empty,
    #[error("feature matrix has {found} values, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),
    #[error("row {row}: label {label} outside [0, {n_classes})")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },
    #[error("class `{0}` has no samples")]
    MissingClass(String),
    #[error("row index {row} out of range for {n_rows} rows")]
    RowOutOfRange { row: usize, n_rows: usize },
    #[error("feature index {index} out of range for {n_features} features")]
    FeatureOutOfRange { index: usize, n_features: usize },
    #[error("feature index {index} at position {position} is duplicated or out of order")]
    UnsortedIndices { index: usize, position: usize },
    #[error("split ratios {0:?} must be positive and sum to 1")]
    InvalidRatios(Vec<f64>),
    #[error("class `{class}` has {count} samples, too few to appear in every partition")]
    ClassTooSmall { class: String, count: usize },
    #[error(
        "fold count {k} invalid: must be at least 2 and at most the smallest class size {smallest}"
    )]
    InvalidFoldCount { k: usize, smallest: usize },
}
