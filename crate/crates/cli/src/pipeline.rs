//! The select → train → evaluate commands.
//!
//! Commands return their artifacts in memory; [`Artifacts::write`] puts
//! them on disk only after everything succeeded, so a failed run leaves no
//! partial output. F-scores and bin boundaries are always fitted on the
//! training rows of the run (or fold) alone.

use std::path::Path;

use anova_gbdt::booster::{to_text, train, BoosterConfig, Ensemble};
use anova_gbdt::data::{load_csv, stratified_kfold, stratified_split, Dataset};
use anova_gbdt::metrics::{confusion, fold_average, macro_report, MetricsReport};
use anova_gbdt::selection::{anova_f_scores, project_dataset, select_top_k, FScores};

use crate::config::{PipelineConfig, Task};
use crate::error::CliError;
use crate::report::{PipelineReport, Section, SweepRow};

/// Named output files.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    /// Writes every file into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let fail =
            |e: std::io::Error| CliError::Config(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(fail)?;
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content).map_err(fail)?;
        }
        Ok(())
    }
}

/// Loads the configured dataset. A missing path is a configuration error;
/// an unreadable file is a data error.
pub fn load_dataset(cfg: &PipelineConfig) -> Result<Dataset, CliError> {
    let path = cfg
        .data
        .as_ref()
        .ok_or_else(|| CliError::Config("no dataset given (set `data` or pass --data)".into()))?;
    if !path.is_file() {
        return Err(CliError::Config(format!(
            "dataset {} does not exist",
            path.display()
        )));
    }
    Ok(load_csv(path, &cfg.label_col)?)
}

fn check_k(k: usize, n_features: usize) -> Result<usize, CliError> {
    if k == 0 || k > n_features {
        return Err(CliError::Config(format!(
            "k = {k} out of range 1..={n_features}"
        )));
    }
    Ok(k)
}

fn resolve_k(cfg: &PipelineConfig, ds: &Dataset) -> Result<usize, CliError> {
    check_k(cfg.k_features.unwrap_or(ds.n_features()), ds.n_features())
}

/// A model trained on the top-k features of a training set.
pub struct Fitted {
    pub scores: FScores,
    pub selected: Vec<usize>,
    pub model: Ensemble,
}

impl Fitted {
    /// Scores `ds` (all original columns) with the model.
    pub fn evaluate(&self, ds: &Dataset) -> Result<MetricsReport, CliError> {
        let projected = project_dataset(ds, &self.selected)?;
        let predicted: Vec<usize> = self
            .model
            .predict_dataset(&projected)?
            .into_iter()
            .map(|p| p.class)
            .collect();
        let cm = confusion(ds.labels(), &predicted, ds.n_classes())?;
        Ok(macro_report(&cm, ds.class_names()))
    }
}

/// Fits F-scores on `train_set`, keeps the top `k` and trains on them.
pub fn fit(train_set: &Dataset, k: usize, booster: &BoosterConfig) -> Result<Fitted, CliError> {
    let scores = anova_f_scores(train_set)?;
    let selected = select_top_k(&scores, k)?;
    let model = train(&project_dataset(train_set, &selected)?, booster)?;
    Ok(Fitted {
        scores,
        selected,
        model,
    })
}

/// `rank,feature_index,feature_name,f_score` for the selected features.
pub fn selected_features_csv(
    scores: &FScores,
    selected: &[usize],
    feature_names: &[String],
) -> String {
    let mut out = String::from("rank,feature_index,feature_name,f_score\n");
    for (rank, &j) in selected.iter().enumerate() {
        out.push_str(&format!(
            "{},{j},{},{}\n",
            rank + 1,
            feature_names[j],
            scores.scores[j]
        ));
    }
    out
}

/// `feature_index,feature_name,f_score,rank` for every feature.
fn f_scores_csv(scores: &FScores, feature_names: &[String]) -> String {
    let mut out = String::from("feature_index,feature_name,f_score,rank\n");
    for (j, (name, rank)) in feature_names.iter().zip(scores.ranks()).enumerate() {
        out.push_str(&format!("{j},{name},{},{rank}\n", scores.scores[j]));
    }
    out
}

fn header(cfg: &PipelineConfig, command: &str, ds: &Dataset) -> PipelineReport {
    PipelineReport {
        command: command.into(),
        task: Task::for_classes(ds.n_classes()).to_string(),
        settings: cfg.settings(),
        sections: Vec::new(),
        sweep: Vec::new(),
    }
}

fn report_files(report: &PipelineReport) -> Vec<(String, String)> {
    vec![
        ("report.json".into(), report.to_json()),
        ("report.txt".into(), report.render()),
    ]
}

struct Partitions {
    train: Dataset,
    valid: Dataset,
    test: Dataset,
}

fn partition(cfg: &PipelineConfig, ds: &Dataset) -> Result<Partitions, CliError> {
    let plan = stratified_split(ds, cfg.split_ratios, cfg.seed)?;
    Ok(Partitions {
        train: ds.subset_rows(&plan.train_idx)?,
        valid: ds.subset_rows(&plan.valid_idx)?,
        test: ds.subset_rows(&plan.test_idx)?,
    })
}

/// Stratified split, selection and training on the training part, then
/// metrics on the validation and test parts.
///
/// Writes `model.txt`, `selected_features.csv`, `report.json` and
/// `report.txt`.
pub fn cmd_run(cfg: &PipelineConfig) -> Result<Artifacts, CliError> {
    let ds = load_dataset(cfg)?;
    let booster = cfg.booster_for(ds.n_classes())?;
    let k = resolve_k(cfg, &ds)?;
    let parts = partition(cfg, &ds)?;
    let fitted = fit(&parts.train, k, &booster)?;
    let mut report = header(cfg, "run", &ds);
    for (name, set) in [("Validation", &parts.valid), ("Test", &parts.test)] {
        report.sections.push(Section {
            name: name.into(),
            metrics: fitted.evaluate(set)?,
        });
    }
    let mut files = vec![
        ("model.txt".to_string(), to_text(&fitted.model)),
        (
            "selected_features.csv".to_string(),
            selected_features_csv(&fitted.scores, &fitted.selected, ds.feature_names()),
        ),
    ];
    files.extend(report_files(&report));
    Ok(Artifacts { files })
}

/// Stratified k-fold cross-validation with selection refitted inside every
/// training fold. Writes `report.json` and `report.txt`.
pub fn cmd_cv(cfg: &PipelineConfig) -> Result<Artifacts, CliError> {
    let ds = load_dataset(cfg)?;
    let booster = cfg.booster_for(ds.n_classes())?;
    let k = resolve_k(cfg, &ds)?;
    let plan = stratified_kfold(&ds, cfg.folds, cfg.seed)?;
    let mut folds = Vec::with_capacity(cfg.folds);
    for f in 0..cfg.folds {
        let train_set = ds.subset_rows(&plan.train_indices(f))?;
        let test_set = ds.subset_rows(&plan.fold_test_sets[f])?;
        folds.push(fit(&train_set, k, &booster)?.evaluate(&test_set)?);
    }
    let mut report = header(cfg, "cv", &ds);
    report.sections.push(Section {
        name: format!("{}-fold cross-validation", cfg.folds),
        metrics: fold_average(&folds)?,
    });
    Ok(Artifacts {
        files: report_files(&report),
    })
}

/// Trains once per k in `k_list` on the training part and compares
/// validation accuracy. The best k (ties to the smaller k) is marked.
/// Writes `report.json` and `report.txt`.
pub fn cmd_sweep_k(cfg: &PipelineConfig) -> Result<Artifacts, CliError> {
    if cfg.k_list.is_empty() {
        return Err(CliError::Config(
            "sweep-k needs candidate values (set `k_list` or pass --k-list)".into(),
        ));
    }
    let ds = load_dataset(cfg)?;
    let booster = cfg.booster_for(ds.n_classes())?;
    for &k in &cfg.k_list {
        check_k(k, ds.n_features())?;
    }
    let parts = partition(cfg, &ds)?;
    let valid = &parts.valid;
    let scores = anova_f_scores(&parts.train)?;
    let mut rows = Vec::with_capacity(cfg.k_list.len());
    for &k in &cfg.k_list {
        let selected = select_top_k(&scores, k)?;
        let model = train(&project_dataset(&parts.train, &selected)?, &booster)?;
        let fitted = Fitted {
            scores: scores.clone(),
            selected,
            model,
        };
        rows.push(SweepRow {
            k,
            validation_accuracy: fitted.evaluate(valid)?.accuracy,
            best: false,
        });
    }
    let best = (0..rows.len()).reduce(|b, i| {
        let (rb, ri) = (&rows[b], &rows[i]);
        let (ab, ai) = (
            rb.validation_accuracy.unwrap_or(-1.0),
            ri.validation_accuracy.unwrap_or(-1.0),
        );
        if ai > ab || ai == ab && ri.k < rb.k {
            i
        } else {
            b
        }
    });
    if let Some(b) = best {
        rows[b].best = true;
    }
    let mut report = header(cfg, "sweep-k", &ds);
    report.sweep = rows;
    Ok(Artifacts {
        files: report_files(&report),
    })
}

/// F-scores on the training part only. Writes `f_scores.csv` (every
/// feature) and `selected_features.csv` (the top k).
pub fn cmd_select(cfg: &PipelineConfig) -> Result<Artifacts, CliError> {
    let ds = load_dataset(cfg)?;
    let k = resolve_k(cfg, &ds)?;
    let parts = partition(cfg, &ds)?;
    let scores = anova_f_scores(&parts.train)?;
    let selected = select_top_k(&scores, k)?;
    Ok(Artifacts {
        files: vec![
            (
                "f_scores.csv".into(),
                f_scores_csv(&scores, ds.feature_names()),
            ),
            (
                "selected_features.csv".into(),
                selected_features_csv(&scores, &selected, ds.feature_names()),
            ),
        ],
    })
}
