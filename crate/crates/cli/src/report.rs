//! The `report.json` document written by every command and its text form.

use std::fmt::Write;

use anova_gbdt::metrics::{render_text, MetricsReport};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Metrics for one evaluation set (validation, test or a CV average).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub metrics: MetricsReport,
}

/// Validation accuracy of one candidate k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub validation_accuracy: Option<f64>,
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub command: String,
    pub task: String,
    /// Resolved configuration as `[key, value]` pairs.
    pub settings: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Section>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("malformed report: {e}")))
    }

    pub fn setting(&self, key: &str) -> Option<&str> {
        self.settings
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Plain-text form: a header line, then each section's metric tables
    /// (a fold grid for cross-validation), then the k-sweep table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        write!(out, "anova-gbdt {} ({}", self.command, self.task).unwrap();
        for key in ["seed", "k_features", "trees", "learning_rate", "max_depth"] {
            if let Some(v) = self.setting(key) {
                write!(out, ", {key} {v}").unwrap();
            }
        }
        writeln!(out, ")").unwrap();
        for s in &self.sections {
            writeln!(out, "\n== {} ==\n", s.name).unwrap();
            out.push_str(&render_text(&s.metrics));
        }
        if !self.sweep.is_empty() {
            writeln!(out, "\n== Feature count sweep ==\n").unwrap();
            writeln!(out, "{:>8}{:>22}", "k", "Validation accuracy").unwrap();
            for row in &self.sweep {
                let acc = row
                    .validation_accuracy
                    .map_or("n/a".to_string(), |a| format!("{:.2}", a * 100.0));
                let mark = if row.best { "  <- best" } else { "" };
                writeln!(out, "{:>8}{:>22}{mark}", row.k, acc).unwrap();
            }
        }
        out
    }
}
