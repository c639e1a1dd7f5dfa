//! Split scoring with the GOSS estimated variance gain.

use super::histogram::{BinStats, FeatureBins};

/// Relative slack under which a gain improvement counts as zero. Keeps
/// rounding noise from splitting nodes whose gradients are all equal.
pub const GAIN_REL_EPS: f64 = 1e-10;

/// Relative width inside which two gains are treated as tied. Gains are
/// differences of nearly equal sums, so the last few bits are noise and
/// must not decide between candidates.
pub const GAIN_TIE_EPS: f64 = 1e-12;

/// Whether `gain` ties or beats `max`, the best gain seen, with `scale`
/// the magnitude of the terms both were computed from.
pub fn ties_max(gain: f64, max: f64, scale: f64) -> bool {
    gain >= max - GAIN_TIE_EPS * (max.abs() + scale)
}

/// Estimated variance gain of a split:
/// `(1/n) · (G_l² / n_l + G_r² / n_r)`, where `G` are GOSS-weighted gradient
/// sums and `n_l`, `n_r` the weighted counts `|A| + w·|B|` on each side.
pub fn estimated_variance_gain(
    left_gsum: f64,
    right_gsum: f64,
    left_count: f64,
    right_count: f64,
    n: f64,
) -> f64 {
    (left_gsum * left_gsum / left_count + right_gsum * right_gsum / right_count) / n
}

/// The same score for an unsplit node: `(1/n) · G² / n_p`.
pub fn parent_gain(gsum: f64, count: f64, n: f64) -> f64 {
    gsum * gsum / count / n
}

/// Settings shared by every split search in one tree.
#[derive(Debug, Clone, Copy)]
pub struct SplitContext {
    /// Weight `(1 - a) / b` of the GOSS remainder rows.
    pub rest_weight: f64,
    /// Training set size `n` in the gain normaliser.
    pub n_total: f64,
    pub min_samples_leaf: usize,
    pub min_split_gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitInfo {
    pub feature: usize,
    /// Rows with feature bin `<= bin` go left.
    pub bin: u32,
    /// Variance gain minus the parent's term.
    pub gain: f64,
    pub left: BinStats,
    pub right: BinStats,
}

/// Whether `improvement` clears `min_split_gain` plus rounding slack.
pub fn admissible(improvement: f64, parent_term: f64, min_split_gain: f64) -> bool {
    improvement > min_split_gain + GAIN_REL_EPS * parent_term.abs()
}

/// Best split over every feature histogram and threshold.
///
/// Thresholds are scanned by ascending feature, then ascending bin. The
/// result is the first candidate in that order whose gain ties the maximum
/// (see [`GAIN_TIE_EPS`]), so ties resolve to the lowest (feature, bin).
/// Returns `None` when no
/// candidate keeps `min_samples_leaf` rows on both sides and beats the
/// parent term by more than `min_split_gain`.
pub fn find_best_split<H: FeatureBins>(
    feature_hists: &[H],
    parent: &BinStats,
    ctx: &SplitContext,
) -> Option<SplitInfo> {
    let w = ctx.rest_weight;
    let parent_term = parent_gain(parent.sum_g(), parent.weighted_count(w), ctx.n_total);
    let min_leaf = ctx.min_samples_leaf as u32;
    let mut max = f64::NEG_INFINITY;
    // Candidates still tying the running maximum, in scan order.
    let mut near: Vec<SplitInfo> = Vec::new();
    for (feature, hist) in feature_hists.iter().enumerate() {
        let mut left = BinStats::default();
        let last = hist.n_bins().saturating_sub(1) as u32;
        // Empty bins repeat the previous threshold's partition, so only
        // non-empty ones are visited.
        hist.visit(&mut |bin, s| {
            if bin >= last {
                return false;
            }
            left += s;
            let right = *parent - left;
            if right.count() < min_leaf {
                return false;
            }
            if left.count() < min_leaf {
                return true;
            }
            let gain = estimated_variance_gain(
                left.sum_g(),
                right.sum_g(),
                left.weighted_count(w),
                right.weighted_count(w),
                ctx.n_total,
            ) - parent_term;
            if gain > max {
                max = gain;
                near.retain(|c| ties_max(c.gain, max, parent_term));
            }
            if ties_max(gain, max, parent_term) {
                near.push(SplitInfo {
                    feature,
                    bin,
                    gain,
                    left,
                    right,
                });
            }
            true
        });
    }
    near.into_iter()
        .next()
        .filter(|b| admissible(b.gain, parent_term, ctx.min_split_gain))
}
