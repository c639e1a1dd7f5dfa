//! Confusion matrices, one-vs-rest rates, macro averaging and fold averaging.
//!
//! Rates with a zero denominator are `None` ("undefined") rather than 0 or
//! NaN; macro and fold averages skip undefined values and record what was
//! skipped.

mod confusion;
mod report;

pub use confusion::{
    accuracy, binary_counts, confusion, f1, precision, sensitivity, specificity, BinaryCounts,
    ConfusionMatrix,
};
pub use report::{
    fold_average, macro_report, render_text, ClassMetrics, Exclusion, MacroMetrics, Metric,
    MetricsReport,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label {label} at position {position} outside [0, {n_classes})")]
    LabelOutOfRange {
        position: usize,
        label: usize,
        n_classes: usize,
    },
    #[error("class {class} outside [0, {n_classes})")]
    ClassOutOfRange { class: usize, n_classes: usize },
    #[error("cannot average an empty list of reports")]
    NoReports,
    #[error("report {index} has classes {found:?}, expected {expected:?}")]
    StructureMismatch {
        index: usize,
        expected: Vec<String>,
        found: Vec<String>,
    },
}
