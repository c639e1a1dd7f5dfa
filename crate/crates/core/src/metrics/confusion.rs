use serde::{Deserialize, Serialize};

use super::MetricsError;

/// `counts[t][p]`: samples of true class `t` predicted as `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(n_classes: usize) -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|c| self.counts[c][c]).sum()
    }

    /// Element-wise sum; both matrices must have the same size.
    pub fn add(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinaryCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl BinaryCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(
    truth: &[usize],
    predicted: &[usize],
    n_classes: usize,
) -> Result<ConfusionMatrix, MetricsError> {
    if truth.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let mut cm = ConfusionMatrix::zeros(n_classes);
    for (position, (&t, &p)) in truth.iter().zip(predicted).enumerate() {
        for label in [t, p] {
            if label >= n_classes {
                return Err(MetricsError::LabelOutOfRange {
                    position,
                    label,
                    n_classes,
                });
            }
        }
        cm.counts[t][p] += 1;
    }
    Ok(cm)
}

/// One-vs-rest reduction with `positive` as the positive class.
pub fn binary_counts(cm: &ConfusionMatrix, positive: usize) -> Result<BinaryCounts, MetricsError> {
    let n_classes = cm.n_classes();
    if positive >= n_classes {
        return Err(MetricsError::ClassOutOfRange {
            class: positive,
            n_classes,
        });
    }
    let tp = cm.counts[positive][positive];
    let row: u64 = cm.counts[positive].iter().sum();
    let col: u64 = cm.counts.iter().map(|r| r[positive]).sum();
    let fn_ = row - tp;
    let fp = col - tp;
    Ok(BinaryCounts {
        tp,
        fn_,
        fp,
        tn: cm.total() - tp - fn_ - fp,
    })
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// TP / (TP + FN)
pub fn sensitivity(c: &BinaryCounts) -> Option<f64> {
    ratio(c.tp, c.tp + c.fn_)
}

/// TN / (TN + FP)
pub fn specificity(c: &BinaryCounts) -> Option<f64> {
    ratio(c.tn, c.tn + c.fp)
}

/// TP / (TP + FP)
pub fn precision(c: &BinaryCounts) -> Option<f64> {
    ratio(c.tp, c.tp + c.fp)
}

/// Correct predictions over all predictions, from the full matrix.
pub fn accuracy(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.trace(), cm.total())
}

/// 2·P·S / (P + S); undefined when either input is, or both are zero.
pub fn f1(c: &BinaryCounts) -> Option<f64> {
    let p = precision(c)?;
    let s = sensitivity(c)?;
    (p + s > 0.0).then(|| 2.0 * p * s / (p + s))
}
