//! Gradient histograms.
//!
//! Gradient and hessian sums are accumulated in 2^-64 fixed point on `i128`,
//! so sums are exact and independent of accumulation order. Histograms built
//! through a bundle and directly per feature are therefore identical.

use std::ops::{AddAssign, Sub};

use super::bundling::{BundledMatrix, FeatureSlot};

const FIXED_SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

pub fn to_fixed(x: f64) -> i128 {
    (x * FIXED_SCALE).round() as i128
}

pub fn from_fixed(v: i128) -> f64 {
    v as f64 / FIXED_SCALE
}

/// Sums over a set of sampled rows. `n_top` and `n_rest` count rows from
/// the GOSS top set and the reweighted remainder set respectively; `g` and
/// `h` already include the sample weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinStats {
    pub n_top: u32,
    pub n_rest: u32,
    pub g: i128,
    pub h: i128,
}

impl BinStats {
    pub fn count(&self) -> u32 {
        self.n_top + self.n_rest
    }

    /// `|top| + weight·|rest|`
    pub fn weighted_count(&self, weight: f64) -> f64 {
        self.n_top as f64 + weight * self.n_rest as f64
    }

    pub fn sum_g(&self) -> f64 {
        from_fixed(self.g)
    }

    pub fn sum_h(&self) -> f64 {
        from_fixed(self.h)
    }
}

impl AddAssign for BinStats {
    fn add_assign(&mut self, o: BinStats) {
        self.n_top += o.n_top;
        self.n_rest += o.n_rest;
        self.g += o.g;
        self.h += o.h;
    }
}

impl Sub for BinStats {
    type Output = BinStats;

    fn sub(self, o: BinStats) -> BinStats {
        BinStats {
            n_top: self.n_top - o.n_top,
            n_rest: self.n_rest - o.n_rest,
            g: self.g - o.g,
            h: self.h - o.h,
        }
    }
}

/// Contribution of one sampled row.
pub fn row_stats(g: f64, h: f64, weight: f64, in_rest: bool) -> BinStats {
    BinStats {
        n_top: u32::from(!in_rest),
        n_rest: u32::from(in_rest),
        g: to_fixed(weight * g),
        h: to_fixed(weight * h),
    }
}

/// Histograms of every bundle for one node, laid out back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleHistogram {
    pub offsets: Vec<usize>,
    pub bins: Vec<BinStats>,
    pub total: BinStats,
}

impl BundleHistogram {
    pub fn build(bundled: &BundledMatrix, rows: &[usize], stats: &[BinStats]) -> Self {
        let mut offsets = Vec::with_capacity(bundled.n_bundles() + 1);
        let mut acc = 0;
        for b in &bundled.bundles {
            offsets.push(acc);
            acc += b.n_bins as usize;
        }
        offsets.push(acc);
        let mut bins = vec![BinStats::default(); acc];
        let mut total = BinStats::default();
        for &r in rows {
            let s = stats[r];
            total += s;
            for (b, &v) in bundled.row(r).iter().enumerate() {
                bins[offsets[b] + v as usize] += s;
            }
        }
        BundleHistogram {
            offsets,
            bins,
            total,
        }
    }

    /// Histogram of one original feature. Non-default bins are read from the
    /// bundle; the default bin is the node total minus everything else.
    pub fn feature(&self, slot: &FeatureSlot) -> Vec<BinStats> {
        let base = self.offsets[slot.bundle];
        let mut out = vec![BinStats::default(); slot.n_bins as usize];
        let mut others = BinStats::default();
        for bin in 0..slot.n_bins {
            if bin != slot.default_bin {
                let s = self.bins[base + slot.encode(bin) as usize];
                out[bin as usize] = s;
                others += s;
            }
        }
        out[slot.default_bin as usize] = self.total - others;
        out
    }

    pub fn features(&self, bundled: &BundledMatrix) -> Vec<Vec<BinStats>> {
        bundled.slots.iter().map(|s| self.feature(s)).collect()
    }

    /// Borrowed per-feature views, without copying bins.
    pub fn views<'a>(&'a self, bundled: &'a BundledMatrix) -> Vec<FeatureView<'a>> {
        bundled
            .slots
            .iter()
            .map(|slot| {
                let base = self.offsets[slot.bundle] + slot.start as usize;
                let own = &self.bins[base..base + slot.n_bins as usize - 1];
                FeatureView::new(Own::Dense(own), slot, self.total)
            })
            .collect()
    }
}

/// Node histogram holding only the non-empty bundle bins, sorted by bin.
/// Cheaper than [`BundleHistogram`] when a node has fewer rows than a
/// bundle has bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHistogram {
    /// Entries of bundle `b` are `entries[starts[b]..starts[b + 1]]`.
    pub starts: Vec<usize>,
    pub entries: Vec<(u32, BinStats)>,
    pub total: BinStats,
}

impl SparseHistogram {
    pub fn build(bundled: &BundledMatrix, rows: &[usize], stats: &[BinStats]) -> Self {
        let n_bundles = bundled.n_bundles();
        let mut starts = Vec::with_capacity(n_bundles + 1);
        let mut entries = Vec::new();
        let mut total = BinStats::default();
        for &r in rows {
            total += stats[r];
        }
        let mut scratch: Vec<(u32, usize)> = Vec::with_capacity(rows.len());
        for b in 0..n_bundles {
            starts.push(entries.len());
            scratch.clear();
            scratch.extend(rows.iter().map(|&r| (bundled.row(r)[b], r)));
            scratch.sort_unstable_by_key(|&(v, _)| v);
            let first = entries.len();
            for &(v, r) in &scratch {
                let fresh = entries.len() == first;
                match entries.last_mut() {
                    Some((last, acc)) if !fresh && *last == v => *acc += stats[r],
                    _ => entries.push((v, stats[r])),
                }
            }
        }
        starts.push(entries.len());
        SparseHistogram {
            starts,
            entries,
            total,
        }
    }

    pub fn views<'a>(&'a self, bundled: &'a BundledMatrix) -> Vec<FeatureView<'a>> {
        bundled
            .slots
            .iter()
            .map(|slot| {
                let all = &self.entries[self.starts[slot.bundle]..self.starts[slot.bundle + 1]];
                let end = slot.start + slot.n_bins - 1;
                let lo = all.partition_point(|&(v, _)| v < slot.start);
                let hi = all.partition_point(|&(v, _)| v < end);
                let own = Own::Sparse {
                    entries: &all[lo..hi],
                    start: slot.start,
                };
                FeatureView::new(own, slot, self.total)
            })
            .collect()
    }
}

/// Dense or sparse histogram of one node, whichever is cheaper to build.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeHistogram {
    Dense(BundleHistogram),
    Sparse(SparseHistogram),
}

impl NodeHistogram {
    pub fn build(bundled: &BundledMatrix, rows: &[usize], stats: &[BinStats]) -> Self {
        let total_bins: usize = bundled.bundles.iter().map(|b| b.n_bins as usize).sum();
        if rows.len() * bundled.n_bundles().max(1) * 2 < total_bins {
            NodeHistogram::Sparse(SparseHistogram::build(bundled, rows, stats))
        } else {
            NodeHistogram::Dense(BundleHistogram::build(bundled, rows, stats))
        }
    }

    pub fn views<'a>(&'a self, bundled: &'a BundledMatrix) -> Vec<FeatureView<'a>> {
        match self {
            NodeHistogram::Dense(h) => h.views(bundled),
            NodeHistogram::Sparse(h) => h.views(bundled),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Own<'a> {
    /// Non-default bins in feature order, default bin skipped.
    Dense(&'a [BinStats]),
    /// Non-empty bundle bins of the feature's slot range, ascending.
    Sparse {
        entries: &'a [(u32, BinStats)],
        start: u32,
    },
}

/// One feature's histogram read in place from its bundle.
#[derive(Debug, Clone, Copy)]
pub struct FeatureView<'a> {
    own: Own<'a>,
    n_bins: u32,
    default_bin: u32,
    default_stats: BinStats,
}

impl<'a> FeatureView<'a> {
    fn new(own: Own<'a>, slot: &FeatureSlot, total: BinStats) -> Self {
        let mut others = BinStats::default();
        match own {
            Own::Dense(bins) => {
                for s in bins.iter().filter(|s| s.count() > 0) {
                    others += *s;
                }
            }
            Own::Sparse { entries, .. } => {
                for (_, s) in entries {
                    others += *s;
                }
            }
        }
        FeatureView {
            own,
            n_bins: slot.n_bins,
            default_bin: slot.default_bin,
            default_stats: total - others,
        }
    }

    /// Feature bin of the `local`-th non-default slot.
    fn feature_bin(&self, local: u32) -> u32 {
        if local < self.default_bin {
            local
        } else {
            local + 1
        }
    }
}

/// Anything the split finder can scan bin by bin.
pub trait FeatureBins {
    fn n_bins(&self) -> usize;

    /// Calls `f` on every non-empty bin in ascending order until it
    /// returns `false`.
    fn visit(&self, f: &mut dyn FnMut(u32, BinStats) -> bool);
}

impl FeatureBins for Vec<BinStats> {
    fn n_bins(&self) -> usize {
        self.len()
    }

    fn visit(&self, f: &mut dyn FnMut(u32, BinStats) -> bool) {
        for (bin, s) in self.iter().enumerate() {
            if s.count() > 0 && !f(bin as u32, *s) {
                return;
            }
        }
    }
}

impl FeatureBins for FeatureView<'_> {
    fn n_bins(&self) -> usize {
        self.n_bins as usize
    }

    fn visit(&self, f: &mut dyn FnMut(u32, BinStats) -> bool) {
        let mut default_done = self.default_stats.count() == 0;
        let mut emit = |bin: u32, s: BinStats| -> bool {
            if !default_done && bin > self.default_bin {
                default_done = true;
                if !f(self.default_bin, self.default_stats) {
                    return false;
                }
            }
            f(bin, s)
        };
        let go_on = match self.own {
            Own::Dense(bins) => bins
                .iter()
                .enumerate()
                .filter(|(_, s)| s.count() > 0)
                .all(|(local, s)| emit(self.feature_bin(local as u32), *s)),
            Own::Sparse { entries, start } => entries
                .iter()
                .all(|&(v, s)| emit(self.feature_bin(v - start), s)),
        };
        if go_on && !default_done {
            f(self.default_bin, self.default_stats);
        }
    }
}

/// Direct per-feature histogram from per-feature bins, bypassing bundles.
pub fn direct_feature_histogram(
    bins_of_feature: impl Fn(usize) -> u32,
    n_bins: u32,
    rows: &[usize],
    stats: &[BinStats],
) -> Vec<BinStats> {
    let mut out = vec![BinStats::default(); n_bins as usize];
    for &r in rows {
        out[bins_of_feature(r) as usize] += stats[r];
    }
    out
}
