//! Pipeline commands for `anova-gbdt`: ANOVA feature selection, boosted-tree
//! training and evaluation on CSV feature matrices.
//!
//! Every command is deterministic in the configured seed. One seed drives
//! the stratified split, the cross-validation folds and GOSS sampling, each
//! through its own derived stream.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod predict;
pub mod report;

pub use config::{PipelineConfig, Task};
pub use error::CliError;
pub use pipeline::{cmd_cv, cmd_run, cmd_select, cmd_sweep_k, Artifacts};
pub use predict::{cmd_predict, predict_csv, PredictOptions};
pub use report::PipelineReport;

/// Renders a saved `report.json` as text.
pub fn cmd_report(path: &std::path::Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(PipelineReport::from_json(&text)?.render())
}
