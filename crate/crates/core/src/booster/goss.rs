//! Gradient-based one-side sampling.

use crate::rng::CounterRng;

use super::objective::GradientVector;
use super::BoosterError;

/// Rows kept for one boosting iteration.
///
/// `top` holds the rows with the largest gradient magnitude and enters
/// training with weight 1; `rest` is a uniform draw from the remaining rows
/// and enters with weight `weight = (1 - a) / b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GossSample {
    pub top: Vec<usize>,
    pub rest: Vec<usize>,
    pub weight: f64,
}

impl GossSample {
    /// Every row, weight 1.
    pub fn full(n: usize) -> Self {
        GossSample {
            top: (0..n).collect(),
            rest: Vec::new(),
            weight: 1.0,
        }
    }

    /// Sampling weight of each row (0 for rows left out).
    pub fn row_weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for &i in &self.top {
            w[i] = 1.0;
        }
        for &i in &self.rest {
            w[i] = self.weight;
        }
        w
    }

    /// `top ∪ rest`, ascending.
    pub fn rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self.top.iter().chain(&self.rest).copied().collect();
        rows.sort_unstable();
        rows
    }
}

/// `ceil(x)` that ignores representation noise just above an integer.
fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Draws a GOSS sample from per-row gradient magnitudes.
///
/// `|top| = ceil(a·n)`, picked by descending magnitude with ties to the lower
/// row index. `|rest| = ceil(b·n)` (capped at the number of remaining rows),
/// drawn without replacement by a partial Fisher-Yates shuffle of the
/// remaining rows in ascending order. With these sizes `weight·|rest|`
/// equals the number of remaining rows, so `weight · Σ_rest g` is an
/// unbiased estimate of the remaining rows' gradient sum.
pub fn goss_sample_magnitudes(
    magnitudes: &[f64],
    a: f64,
    b: f64,
    rng: &mut CounterRng,
) -> Result<GossSample, BoosterError> {
    if !(a > 0.0 && a <= 1.0) || !(b >= 0.0 && b < 1.0) || a + b > 1.0 + 1e-12 {
        return Err(BoosterError::InvalidConfig(format!(
            "GOSS rates a = {a}, b = {b} out of domain"
        )));
    }
    if a == 1.0 && b != 0.0 || a < 1.0 && b == 0.0 {
        return Err(BoosterError::InvalidConfig(format!(
            "GOSS rates a = {a}, b = {b}: b must be 0 exactly when a = 1"
        )));
    }
    let n = magnitudes.len();
    if a == 1.0 {
        return Ok(GossSample::full(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| magnitudes[j].total_cmp(&magnitudes[i]).then(i.cmp(&j)));
    let n_top = ceil_count(a * n as f64).min(n);
    let mut top = order[..n_top].to_vec();
    let mut remaining = order[n_top..].to_vec();
    remaining.sort_unstable();
    let n_rest = ceil_count(b * n as f64).min(remaining.len());
    for i in 0..n_rest {
        let j = i + rng.below((remaining.len() - i) as u64) as usize;
        remaining.swap(i, j);
    }
    let mut rest = remaining[..n_rest].to_vec();
    top.sort_unstable();
    rest.sort_unstable();
    Ok(GossSample {
        top,
        rest,
        weight: (1.0 - a) / b,
    })
}

/// GOSS sample ranked by `sum_k |g_k|` per row.
pub fn goss_sample(
    grad: &GradientVector,
    a: f64,
    b: f64,
    rng: &mut CounterRng,
) -> Result<GossSample, BoosterError> {
    goss_sample_magnitudes(&grad.magnitudes(), a, b, rng)
}
