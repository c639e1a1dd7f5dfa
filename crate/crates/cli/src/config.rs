//! Pipeline configuration: a `key = value` file with command-line overrides.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Overrides are applied after the file, so flags win.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anova_gbdt::booster::{BoosterConfig, Objective};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    TwoClass,
    MultiClass,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::TwoClass => "two_class",
            Task::MultiClass => "multi_class",
        }
    }

    /// The task implied by a class count.
    pub fn for_classes(n_classes: usize) -> Task {
        if n_classes == 2 {
            Task::TwoClass
        } else {
            Task::MultiClass
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "two_class" => Ok(Task::TwoClass),
            "multi_class" => Ok(Task::MultiClass),
            other => Err(CliError::Config(format!(
                "task `{other}` is not two_class or multi_class"
            ))),
        }
    }
}

/// Everything one pipeline command needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub data: Option<PathBuf>,
    pub label_col: String,
    /// Inferred from the dataset's class count when unset.
    pub task: Option<Task>,
    /// Train, validation and test fractions.
    pub split_ratios: [f64; 3],
    /// Seeds the split, the folds and GOSS sampling.
    pub seed: u64,
    /// Number of selected features; all of them when unset.
    pub k_features: Option<usize>,
    /// Candidate k values for `sweep-k`.
    pub k_list: Vec<usize>,
    pub folds: usize,
    pub out: PathBuf,
    /// Tree settings. `objective` and `num_classes` are filled in from the
    /// dataset at run time.
    pub booster: BoosterConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data: None,
            label_col: "label".into(),
            task: None,
            split_ratios: [0.6, 0.2, 0.2],
            seed: 42,
            k_features: None,
            k_list: Vec::new(),
            folds: 5,
            out: PathBuf::from("out"),
            booster: BoosterConfig::default(),
        }
    }
}

/// Every key accepted in config files and as overrides.
pub const KEYS: &[&str] = &[
    "data",
    "label_col",
    "task",
    "split_ratios",
    "seed",
    "k_features",
    "k_list",
    "folds",
    "out",
    "trees",
    "learning_rate",
    "max_depth",
    "num_leaves",
    "min_samples_leaf",
    "min_split_gain",
    "goss_a",
    "goss_b",
    "max_bin",
    "bundling",
    "efb_conflict",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl PipelineConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let b = &mut self.booster;
        match key {
            "data" => self.data = Some(PathBuf::from(value)),
            "label_col" => self.label_col = value.to_string(),
            "task" => self.task = Some(value.parse()?),
            "split_ratios" => {
                let r: Vec<f64> = parse_list(key, value)?;
                self.split_ratios = r.try_into().map_err(|_| {
                    CliError::Config(format!("`split_ratios` needs 3 values, got `{value}`"))
                })?;
            }
            "seed" => self.seed = parse(key, value)?,
            "k_features" => {
                self.k_features = match value {
                    "all" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "k_list" => self.k_list = parse_list(key, value)?,
            "folds" => self.folds = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "trees" => b.num_trees = parse(key, value)?,
            "learning_rate" => b.learning_rate = parse(key, value)?,
            "max_depth" => b.max_depth = parse(key, value)?,
            "num_leaves" => b.num_leaves = parse(key, value)?,
            "min_samples_leaf" => b.min_samples_leaf = parse(key, value)?,
            "min_split_gain" => b.min_split_gain = parse(key, value)?,
            "goss_a" => b.goss_top_rate = parse(key, value)?,
            "goss_b" => b.goss_other_rate = parse(key, value)?,
            "max_bin" => b.max_bin = parse(key, value)?,
            "bundling" => b.bundling = parse(key, value)?,
            "efb_conflict" => b.efb_max_conflict_rate = parse(key, value)?,
            other => {
                return Err(CliError::Config(format!(
                    "unknown setting `{other}` (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies the settings of a config file's text.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{origin}:{}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{origin}:{}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Defaults, then the config file (if any), then `overrides` in order.
    pub fn resolve(
        config_file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self, CliError> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = config_file {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            cfg.apply_text(&text, &path.display().to_string())?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that does not depend on the dataset.
    pub fn validate(&self) -> Result<(), CliError> {
        let r = self.split_ratios;
        if r.iter().any(|&x| !(x > 0.0 && x < 1.0)) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(CliError::Config(format!(
                "split_ratios {r:?} must each be in (0, 1) and sum to 1"
            )));
        }
        if self.folds < 2 {
            return Err(CliError::Config(format!(
                "folds = {} but cross-validation needs at least 2",
                self.folds
            )));
        }
        if self.k_features == Some(0) || self.k_list.contains(&0) {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        self.booster.validate()?;
        Ok(())
    }

    /// Booster settings for a dataset with `n_classes` classes, checking the
    /// configured task against it.
    pub fn booster_for(&self, n_classes: usize) -> Result<BoosterConfig, CliError> {
        let implied = Task::for_classes(n_classes);
        if let Some(task) = self.task {
            if task != implied {
                return Err(CliError::Config(format!(
                    "task is {task} but the dataset has {n_classes} classes"
                )));
            }
        }
        Ok(BoosterConfig {
            objective: match implied {
                Task::TwoClass => Objective::BinaryLogistic,
                Task::MultiClass => Objective::MulticlassSoftmax,
            },
            num_classes: n_classes,
            seed: self.seed,
            ..self.booster.clone()
        })
    }

    /// The resolved settings as `key = value` pairs, in [`KEYS`] order,
    /// without the output directory.
    pub fn settings(&self) -> Vec<(String, String)> {
        let b = &self.booster;
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let pairs: Vec<(&str, String)> = vec![
            (
                "data",
                self.data
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            ),
            ("label_col", self.label_col.clone()),
            (
                "task",
                self.task.map(|t| t.to_string()).unwrap_or("auto".into()),
            ),
            (
                "split_ratios",
                self.split_ratios
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("seed", self.seed.to_string()),
            (
                "k_features",
                self.k_features
                    .map(|k| k.to_string())
                    .unwrap_or("all".into()),
            ),
            ("k_list", list(&self.k_list)),
            ("folds", self.folds.to_string()),
            ("trees", b.num_trees.to_string()),
            ("learning_rate", b.learning_rate.to_string()),
            ("max_depth", b.max_depth.to_string()),
            ("num_leaves", b.num_leaves.to_string()),
            ("min_samples_leaf", b.min_samples_leaf.to_string()),
            ("min_split_gain", b.min_split_gain.to_string()),
            ("goss_a", b.goss_top_rate.to_string()),
            ("goss_b", b.goss_other_rate.to_string()),
            ("max_bin", b.max_bin.to_string()),
            ("bundling", b.bundling.to_string()),
            ("efb_conflict", b.efb_max_conflict_rate.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}
