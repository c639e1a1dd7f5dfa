//! Logistic and softmax losses with their first and second derivatives
//! with respect to the raw score.

use super::{BoosterError, Objective};

/// Lower clamp on second derivatives.
pub const MIN_HESSIAN: f64 = 1e-16;

/// Per-sample gradients, row-major with `dims` values per row
/// (1 for binary, C for multiclass).
///
/// `grad` is the positive gradient of the loss (`p - y`), so a Newton leaf
/// step is `-sum(grad) / sum(hess)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    pub dims: usize,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl GradientVector {
    pub fn n_rows(&self) -> usize {
        self.grad.len() / self.dims
    }

    /// Per-sample ranking magnitude: `sum_k |g_k|`.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.grad
            .chunks(self.dims)
            .map(|row| row.iter().map(|g| g.abs()).sum())
            .collect()
    }

    /// Gradient and hessian column for one output dimension.
    pub fn column(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let pick = |v: &[f64]| v.iter().skip(k).step_by(self.dims).copied().collect();
        (pick(&self.grad), pick(&self.hess))
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn softmax(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = raw.iter().map(|r| (r - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Class probabilities for one row of raw scores.
pub fn probabilities(objective: Objective, raw: &[f64]) -> Vec<f64> {
    match objective {
        Objective::BinaryLogistic => {
            let p = sigmoid(raw[0]);
            vec![1.0 - p, p]
        }
        Objective::MulticlassSoftmax => softmax(raw),
    }
}

fn check_labels(labels: &[usize], n_classes: usize) -> Result<(), BoosterError> {
    match labels.iter().position(|&y| y >= n_classes) {
        Some(row) => Err(BoosterError::LabelOutOfRange {
            row,
            label: labels[row],
            n_classes,
        }),
        None => Ok(()),
    }
}

/// Gradients of the loss at `raw_scores` (row-major, 1 or C per row).
pub fn compute_gradients(
    objective: Objective,
    labels: &[usize],
    raw_scores: &[f64],
    n_classes: usize,
) -> Result<GradientVector, BoosterError> {
    check_labels(labels, n_classes)?;
    let dims = match objective {
        Objective::BinaryLogistic => 1,
        Objective::MulticlassSoftmax => n_classes,
    };
    if raw_scores.len() != labels.len() * dims {
        return Err(BoosterError::DimensionMismatch {
            expected: labels.len() * dims,
            found: raw_scores.len(),
        });
    }
    let mut grad = Vec::with_capacity(raw_scores.len());
    let mut hess = Vec::with_capacity(raw_scores.len());
    for (row, &y) in raw_scores.chunks(dims).zip(labels) {
        match objective {
            Objective::BinaryLogistic => {
                let p = sigmoid(row[0]);
                grad.push(p - if y == 1 { 1.0 } else { 0.0 });
                hess.push((p * (1.0 - p)).max(MIN_HESSIAN));
            }
            Objective::MulticlassSoftmax => {
                for (k, p) in softmax(row).into_iter().enumerate() {
                    grad.push(p - if y == k { 1.0 } else { 0.0 });
                    hess.push((p * (1.0 - p)).max(MIN_HESSIAN));
                }
            }
        }
    }
    Ok(GradientVector { dims, grad, hess })
}

/// Mean negative log-likelihood of the labels under `raw_scores`.
pub fn log_loss(
    objective: Objective,
    labels: &[usize],
    raw_scores: &[f64],
    n_classes: usize,
) -> f64 {
    let dims = match objective {
        Objective::BinaryLogistic => 1,
        Objective::MulticlassSoftmax => n_classes,
    };
    let total: f64 = raw_scores
        .chunks(dims)
        .zip(labels)
        .map(|(row, &y)| match objective {
            // log(1 + e^-z) for the signed margin z
            Objective::BinaryLogistic => {
                let z = if y == 1 { row[0] } else { -row[0] };
                softplus(-z)
            }
            Objective::MulticlassSoftmax => {
                let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + row.iter().map(|r| (r - max).exp()).sum::<f64>().ln();
                lse - row[y]
            }
        })
        .sum();
    total / labels.len() as f64
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
