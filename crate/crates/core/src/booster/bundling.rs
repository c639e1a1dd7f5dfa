//! Exclusive feature bundling.
//!
//! Features that are rarely non-default on the same row share one bundle
//! column. Bundle bin 0 means "every member is in its default bin"; member
//! `f` owns the contiguous range `start .. start + n_bins(f) - 1`, holding its
//! non-default bins in order with the default bin skipped.
//!
//! A feature's default bin is the bin of the value 0.

use super::binning::BinnedMatrix;

/// Where an original feature lives inside the bundled matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSlot {
    pub bundle: usize,
    /// First bundle bin used by this feature.
    pub start: u32,
    pub n_bins: u32,
    pub default_bin: u32,
}

impl FeatureSlot {
    /// Bundle bin for feature bin `bin`, or 0 for the default bin.
    pub fn encode(&self, bin: u32) -> u32 {
        if bin == self.default_bin {
            0
        } else if bin < self.default_bin {
            self.start + bin
        } else {
            self.start + bin - 1
        }
    }

    /// Feature bin for a bundle bin, if that bundle bin belongs to this
    /// feature.
    pub fn decode(&self, value: u32) -> Option<u32> {
        let end = self.start + self.n_bins - 1;
        if value < self.start || value >= end {
            return None;
        }
        let r = value - self.start;
        Some(if r < self.default_bin { r } else { r + 1 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    /// Member features in encoding order.
    pub features: Vec<usize>,
    pub n_bins: u32,
}

/// Row-major `n_rows × bundles` matrix of bundle bins.
#[derive(Debug, Clone)]
pub struct BundledMatrix {
    pub n_rows: usize,
    pub bins: Vec<u32>,
    pub bundles: Vec<Bundle>,
    /// Indexed by original feature.
    pub slots: Vec<FeatureSlot>,
}

impl BundledMatrix {
    pub fn n_bundles(&self) -> usize {
        self.bundles.len()
    }

    pub fn row(&self, row: usize) -> &[u32] {
        let b = self.bundles.len();
        &self.bins[row * b..(row + 1) * b]
    }

    /// The member of `bundle` that is non-default on `row`, with its bin.
    pub fn decode(&self, row: usize, bundle: usize) -> Option<(usize, u32)> {
        let value = self.row(row)[bundle];
        if value == 0 {
            return None;
        }
        self.bundles[bundle]
            .features
            .iter()
            .find_map(|&f| self.slots[f].decode(value).map(|bin| (f, bin)))
    }

    /// Bin of `feature` on `row` as recovered from its bundle.
    pub fn feature_bin(&self, row: usize, feature: usize) -> u32 {
        let slot = &self.slots[feature];
        slot.decode(self.row(row)[slot.bundle])
            .unwrap_or(slot.default_bin)
    }
}

/// Builds bundles from a grouping and encodes every row.
///
/// When two members of a bundle are both non-default on a row, the later
/// member wins that cell.
pub fn assemble(binned: &BinnedMatrix, groups: Vec<Vec<usize>>) -> BundledMatrix {
    let mut slots = vec![
        FeatureSlot {
            bundle: 0,
            start: 0,
            n_bins: 1,
            default_bin: 0
        };
        binned.n_features
    ];
    let mut bundles = Vec::with_capacity(groups.len());
    for (b, features) in groups.into_iter().enumerate() {
        let mut next = 1;
        for &f in &features {
            let mapper = &binned.mappers[f];
            slots[f] = FeatureSlot {
                bundle: b,
                start: next,
                n_bins: mapper.n_bins(),
                default_bin: mapper.default_bin(),
            };
            next += mapper.n_bins() - 1;
        }
        bundles.push(Bundle {
            features,
            n_bins: next,
        });
    }
    let n_bundles = bundles.len();
    let mut bins = vec![0u32; binned.n_rows * n_bundles];
    for row in 0..binned.n_rows {
        let out = &mut bins[row * n_bundles..(row + 1) * n_bundles];
        for (b, bundle) in bundles.iter().enumerate() {
            for &f in &bundle.features {
                let bin = binned.bin(row, f);
                if bin != slots[f].default_bin {
                    out[b] = slots[f].encode(bin);
                }
            }
        }
    }
    BundledMatrix {
        n_rows: binned.n_rows,
        bins,
        bundles,
        slots,
    }
}

/// One bundle per feature, in feature order.
pub fn singleton_bundles(binned: &BinnedMatrix) -> BundledMatrix {
    assemble(binned, (0..binned.n_features).map(|f| vec![f]).collect())
}

/// Greedy bundling.
///
/// Features are visited by descending non-default count (ties by index).
/// Each joins the first bundle whose accumulated conflict count stays within
/// `floor(max_conflict_rate * n_rows)` after adding the rows where both the
/// feature and the bundle are non-default, and whose bin count stays within
/// `max_bin`; otherwise it opens a new bundle.
pub fn efb_bundle(binned: &BinnedMatrix, max_conflict_rate: f64) -> BundledMatrix {
    let n = binned.n_rows;
    let limit = (max_conflict_rate * n as f64).floor() as usize;
    let nonzero: Vec<Vec<usize>> = (0..binned.n_features)
        .map(|f| {
            let default = binned.mappers[f].default_bin();
            (0..n).filter(|&r| binned.bin(r, f) != default).collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..binned.n_features).collect();
    order.sort_by(|&a, &b| nonzero[b].len().cmp(&nonzero[a].len()).then(a.cmp(&b)));

    struct Open {
        features: Vec<usize>,
        occupied: Vec<bool>,
        n_occupied: usize,
        conflicts: usize,
        n_bins: usize,
    }
    let mut open: Vec<Open> = Vec::new();
    for f in order {
        let rows = &nonzero[f];
        let extra_bins = binned.mappers[f].n_bins() as usize - 1;
        let mut placed = false;
        for bundle in open.iter_mut() {
            if bundle.n_bins + extra_bins > binned.max_bin {
                continue;
            }
            let budget = limit - bundle.conflicts;
            // Pigeonhole lower bound on the overlap.
            if (rows.len() + bundle.n_occupied).saturating_sub(n) > budget {
                continue;
            }
            let mut conflicts = 0;
            for &r in rows {
                if bundle.occupied[r] {
                    conflicts += 1;
                    if conflicts > budget {
                        break;
                    }
                }
            }
            if conflicts <= budget {
                bundle.conflicts += conflicts;
                for &r in rows {
                    if !bundle.occupied[r] {
                        bundle.occupied[r] = true;
                        bundle.n_occupied += 1;
                    }
                }
                bundle.features.push(f);
                bundle.n_bins += extra_bins;
                placed = true;
                break;
            }
        }
        if !placed {
            let mut occupied = vec![false; n];
            for &r in rows {
                occupied[r] = true;
            }
            open.push(Open {
                features: vec![f],
                occupied,
                n_occupied: rows.len(),
                conflicts: 0,
                n_bins: 1 + extra_bins,
            });
        }
    }
    assemble(binned, open.into_iter().map(|b| b.features).collect())
}
