use std::fmt;

use anova_gbdt::booster::{BoosterError, ModelFormatError};
use anova_gbdt::data::DataError;
use anova_gbdt::metrics::MetricsError;
use anova_gbdt::selection::SelectionError;

/// Pipeline failure, classified by the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad configuration, flags, or missing input files. Exit code 2.
    Config(String),
    /// Unreadable or inconsistent data. Exit code 3.
    Data(String),
    /// Training or evaluation failed. Exit code 4.
    Training(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Training(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Training(m) => write!(f, "training error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SelectionError> for CliError {
    fn from(e: SelectionError) -> Self {
        match e {
            SelectionError::KOutOfRange { .. } => CliError::Config(format!("selection: {e}")),
            _ => CliError::Data(format!("selection: {e}")),
        }
    }
}

impl From<BoosterError> for CliError {
    fn from(e: BoosterError) -> Self {
        match e {
            BoosterError::InvalidConfig(_) => CliError::Config(format!("booster: {e}")),
            _ => CliError::Training(format!("booster: {e}")),
        }
    }
}

impl From<ModelFormatError> for CliError {
    fn from(e: ModelFormatError) -> Self {
        match e {
            ModelFormatError::Io { .. } => CliError::Config(format!("model: {e}")),
            _ => CliError::Data(format!("model: {e}")),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Training(format!("metrics: {e}"))
    }
}
