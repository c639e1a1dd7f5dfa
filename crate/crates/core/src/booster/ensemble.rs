use crate::data::Dataset;
use crate::rng::{stream, CounterRng};

use super::binning::{bin_features, BinMapper};
use super::bundling::{efb_bundle, singleton_bundles};
use super::config::{BoosterConfig, Objective};
use super::goss::{goss_sample, GossSample};
use super::objective::{compute_gradients, log_loss, probabilities};
use super::tree::{grow_tree_leafwise, GrowInput, Tree};
use super::BoosterError;

/// A trained additive model: `raw = base + η · Σ tree outputs`, per class.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub config: BoosterConfig,
    /// One per output dimension (1 for binary, C for multiclass).
    pub base_score: Vec<f64>,
    /// Iteration-major: tree `m * dims + k` is iteration `m`, dimension `k`.
    pub trees: Vec<Tree>,
    pub mappers: Vec<BinMapper>,
    /// Feature groups used while training (metadata only).
    pub bundles: Vec<Vec<usize>>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probabilities: Vec<f64>,
    pub class: usize,
}

/// Index of the largest value, ties to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl Ensemble {
    pub fn dims(&self) -> usize {
        self.config.trees_per_iteration()
    }

    pub fn n_features(&self) -> usize {
        self.mappers.len()
    }

    pub fn n_iterations(&self) -> usize {
        self.trees.len() / self.dims()
    }

    fn row_bins(&self, row: &[f64]) -> Vec<u32> {
        row.iter()
            .zip(&self.mappers)
            .map(|(&v, m)| m.bin(v))
            .collect()
    }

    fn raw_from_bins(&self, bins: &[u32], upto: usize) -> Vec<f64> {
        let dims = self.dims();
        let mut raw = self.base_score.clone();
        for (t, tree) in self.trees.iter().take(upto * dims).enumerate() {
            raw[t % dims] += self.config.learning_rate * tree.predict_bins(|f| bins[f]);
        }
        raw
    }

    fn check_row(&self, row: &[f64]) -> Result<(), BoosterError> {
        if row.len() != self.n_features() {
            return Err(BoosterError::DimensionMismatch {
                expected: self.n_features(),
                found: row.len(),
            });
        }
        Ok(())
    }

    /// Raw scores of one row (length `dims`).
    pub fn raw_scores(&self, row: &[f64]) -> Result<Vec<f64>, BoosterError> {
        self.check_row(row)?;
        Ok(self.raw_from_bins(&self.row_bins(row), self.n_iterations()))
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<Prediction, BoosterError> {
        let raw = self.raw_scores(row)?;
        let p = probabilities(self.config.objective, &raw);
        Ok(Prediction {
            class: argmax(&p),
            probabilities: p,
        })
    }

    /// Predictions for a row-major matrix with `n_features()` columns.
    pub fn predict(&self, features: &[f64]) -> Result<Vec<Prediction>, BoosterError> {
        let s = self.n_features();
        if s == 0 || features.len() % s != 0 {
            return Err(BoosterError::DimensionMismatch {
                expected: s,
                found: features.len(),
            });
        }
        features
            .chunks(s)
            .map(|row| self.predict_row(row))
            .collect()
    }

    pub fn predict_dataset(&self, dataset: &Dataset) -> Result<Vec<Prediction>, BoosterError> {
        if dataset.n_features() != self.n_features() {
            return Err(BoosterError::DimensionMismatch {
                expected: self.n_features(),
                found: dataset.n_features(),
            });
        }
        (0..dataset.n_rows())
            .map(|i| self.predict_row(dataset.row(i)))
            .collect()
    }
}

/// Initial raw scores from the class priors: log-odds of class 1 for binary,
/// log prior per class for multiclass.
pub fn base_scores(objective: Objective, class_counts: &[usize]) -> Vec<f64> {
    let n: usize = class_counts.iter().sum();
    match objective {
        Objective::BinaryLogistic => {
            vec![(class_counts[1] as f64 / class_counts[0] as f64).ln()]
        }
        Objective::MulticlassSoftmax => class_counts
            .iter()
            .map(|&c| (c as f64 / n as f64).ln())
            .collect(),
    }
}

/// Per-iteration trace of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    /// Training log-loss before the first tree and after each iteration.
    pub loss: Vec<f64>,
    pub samples: Vec<GossSample>,
}

/// Trains an ensemble. See [`train_with_log`].
pub fn train(dataset: &Dataset, config: &BoosterConfig) -> Result<Ensemble, BoosterError> {
    train_with_log(dataset, config).map(|(e, _)| e)
}

/// Trains an ensemble and records the per-iteration training loss.
///
/// Each iteration computes gradients at the current raw scores, draws a GOSS
/// sample from `CounterRng::new(seed).fork(GOSS).fork(iteration)`, grows one
/// tree per output dimension on that sample, and adds `η ·` tree output to
/// every training row's raw score.
pub fn train_with_log(
    dataset: &Dataset,
    config: &BoosterConfig,
) -> Result<(Ensemble, TrainingLog), BoosterError> {
    config.validate()?;
    if dataset.n_classes() != config.num_classes {
        return Err(BoosterError::ClassCountMismatch {
            config: config.num_classes,
            dataset: dataset.n_classes(),
        });
    }
    let n = dataset.n_rows();
    let dims = config.trees_per_iteration();
    let labels = dataset.labels();

    let binned = bin_features(dataset, config.max_bin)?;
    let bundled = if config.bundling {
        efb_bundle(&binned, config.efb_max_conflict_rate)
    } else {
        singleton_bundles(&binned)
    };
    let input = GrowInput {
        binned: &binned,
        bundled: &bundled,
        config,
    };

    let mut ensemble = Ensemble {
        config: config.clone(),
        base_score: base_scores(config.objective, &dataset.class_counts()),
        trees: Vec::with_capacity(config.num_trees * dims),
        mappers: binned.mappers.clone(),
        bundles: bundled.bundles.iter().map(|b| b.features.clone()).collect(),
        feature_names: dataset.feature_names().to_vec(),
        class_names: dataset.class_names().to_vec(),
    };

    let mut raw: Vec<f64> = (0..n).flat_map(|_| ensemble.base_score.clone()).collect();
    let mut log = TrainingLog {
        loss: vec![log_loss(config.objective, labels, &raw, config.num_classes)],
        samples: Vec::with_capacity(config.num_trees),
    };
    let goss_root = CounterRng::new(config.seed).fork(stream::GOSS);

    for m in 0..config.num_trees {
        let grad = compute_gradients(config.objective, labels, &raw, config.num_classes)?;
        let sample = goss_sample(
            &grad,
            config.goss_top_rate,
            config.goss_other_rate,
            &mut goss_root.fork(m as u64),
        )?;
        for k in 0..dims {
            let (g, h) = grad.column(k);
            let tree = grow_tree_leafwise(&input, &g, &h, &sample);
            for (i, r) in raw.iter_mut().skip(k).step_by(dims).enumerate() {
                *r += config.learning_rate * tree.predict_bins(|f| binned.bin(i, f));
            }
            ensemble.trees.push(tree);
        }
        log.loss
            .push(log_loss(config.objective, labels, &raw, config.num_classes));
        log.samples.push(sample);
    }
    Ok((ensemble, log))
}
