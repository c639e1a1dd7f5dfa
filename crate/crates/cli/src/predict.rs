//! Scoring a CSV file with a saved model.

use std::path::Path;

use anova_gbdt::booster::{load_model, Ensemble};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct PredictOptions {
    /// Column ignored if present, so labelled files can be scored.
    pub label_col: String,
    /// Ignore columns the model does not use instead of failing.
    pub ignore_extra: bool,
}

impl Default for PredictOptions {
    fn default() -> Self {
        PredictOptions {
            label_col: "label".into(),
            ignore_extra: false,
        }
    }
}

/// At most ten names, then a count of the rest.
fn short_list(names: &[&str]) -> String {
    let mut s = names[..names.len().min(10)].join(", ");
    if names.len() > 10 {
        s.push_str(&format!(" and {} more", names.len() - 10));
    }
    s
}

/// Column of the input feeding each model feature.
fn match_columns(
    model: &Ensemble,
    header: &[String],
    opts: &PredictOptions,
) -> Result<Vec<usize>, CliError> {
    let position = |name: &str| header.iter().position(|h| h == name);
    let missing: Vec<&str> = model
        .feature_names
        .iter()
        .filter(|f| position(f).is_none())
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = header
        .iter()
        .filter(|h| **h != opts.label_col && !model.feature_names.contains(h))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() || (!extra.is_empty() && !opts.ignore_extra) {
        let mut msg = String::from("input columns do not match the model");
        if !missing.is_empty() {
            msg.push_str(&format!("; missing: {}", short_list(&missing)));
        }
        if !extra.is_empty() && !opts.ignore_extra {
            msg.push_str(&format!(
                "; extra: {} (pass --ignore-extra to skip them)",
                short_list(&extra)
            ));
        }
        return Err(CliError::Data(msg));
    }
    Ok(model
        .feature_names
        .iter()
        .map(|f| position(f).expect("checked above"))
        .collect())
}

/// Predictions for every row of `input` as CSV: one probability column per
/// class (`prob_<class>`) and the predicted class name. Rows are scored
/// independently and written in input order.
pub fn predict_csv(
    model: &Ensemble,
    input: &Path,
    opts: &PredictOptions,
) -> Result<String, CliError> {
    if !input.is_file() {
        return Err(CliError::Config(format!(
            "input {} does not exist",
            input.display()
        )));
    }
    let data_err = |row: usize, e: &dyn std::fmt::Display| {
        CliError::Data(format!("{}, row {row}: {e}", input.display()))
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(input)
        .map_err(|e| data_err(0, &e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| data_err(0, &e))?
        .iter()
        .map(str::to_string)
        .collect();
    let columns = match_columns(model, &header, opts)?;

    let mut out = String::new();
    let mut names: Vec<String> = model
        .class_names
        .iter()
        .map(|c| format!("prob_{c}"))
        .collect();
    names.push("predicted".into());
    out.push_str(&names.join(","));
    out.push('\n');
    let mut row = vec![0.0; columns.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_err(i + 1, &e))?;
        for (slot, &c) in row.iter_mut().zip(&columns) {
            let cell = &record[c];
            *slot = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    data_err(
                        i + 1,
                        &format!(
                            "`{}` in column `{}` is not a finite number",
                            cell, header[c]
                        ),
                    )
                })?;
        }
        let p = model.predict_row(&row)?;
        let mut cells: Vec<String> = p.probabilities.iter().map(f64::to_string).collect();
        cells.push(model.class_names[p.class].clone());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Loads the model at `model_path` and scores `input`.
pub fn cmd_predict(
    model_path: &Path,
    input: &Path,
    opts: &PredictOptions,
) -> Result<String, CliError> {
    if !model_path.is_file() {
        return Err(CliError::Config(format!(
            "model {} does not exist",
            model_path.display()
        )));
    }
    predict_csv(&load_model(model_path)?, input, opts)
}
