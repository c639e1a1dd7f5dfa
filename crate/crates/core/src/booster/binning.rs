//! Per-feature quantile histogram binning.

use crate::data::Dataset;

use super::BoosterError;

/// Maps raw values of one feature to bins.
///
/// `upper_bounds` is strictly increasing and ends with `+inf`; a value goes
/// to the first bin whose upper bound is `>=` the value.
#[derive(Debug, Clone, PartialEq)]
pub struct BinMapper {
    upper_bounds: Vec<f64>,
}

impl BinMapper {
    pub fn from_upper_bounds(upper_bounds: Vec<f64>) -> Result<Self, BoosterError> {
        let ok = upper_bounds.last() == Some(&f64::INFINITY)
            && upper_bounds.windows(2).all(|w| w[0] < w[1])
            && upper_bounds.iter().all(|b| !b.is_nan());
        if !ok {
            return Err(BoosterError::InvalidBins(format!("{upper_bounds:?}")));
        }
        Ok(BinMapper { upper_bounds })
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper_bounds
    }

    pub fn n_bins(&self) -> u32 {
        self.upper_bounds.len() as u32
    }

    pub fn bin(&self, value: f64) -> u32 {
        self.upper_bounds.partition_point(|&ub| ub < value) as u32
    }

    /// Bin holding the value 0; rows in this bin count as "zero" for
    /// feature bundling.
    pub fn default_bin(&self) -> u32 {
        self.bin(0.0)
    }
}

/// A split point strictly between `a < b`, falling back to `a` when the two
/// are adjacent floats.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if a <= m && m < b {
        m
    } else {
        a
    }
}

/// Splits `len` sorted distinct values into at most `groups` contiguous runs
/// cut at equally spaced positions. Returns run end indices (exclusive).
fn equal_runs(len: usize, groups: usize) -> Vec<usize> {
    let groups = groups.min(len);
    (1..=groups).map(|g| g * len / groups).collect()
}

/// Builds the mapper for one column.
pub fn fit_mapper(values: &[f64], max_bin: usize) -> Result<BinMapper, BoosterError> {
    if max_bin < 2 {
        return Err(BoosterError::InvalidConfig(
            "max_bin must be at least 2".into(),
        ));
    }
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| a == b);
    if distinct.len() <= 1 {
        return BinMapper::from_upper_bounds(vec![f64::INFINITY]);
    }

    // Runs of distinct values, each becoming one bin: (first, last) value.
    let mut runs: Vec<(f64, f64)> = Vec::new();
    let push_runs = |vals: &[f64], groups: usize, runs: &mut Vec<(f64, f64)>| {
        let mut start = 0;
        for end in equal_runs(vals.len(), groups) {
            runs.push((vals[start], vals[end - 1]));
            start = end;
        }
    };
    if distinct.len() <= max_bin {
        push_runs(&distinct, distinct.len(), &mut runs);
    } else if let Some(zero) = distinct.iter().position(|&v| v == 0.0) {
        // Zero keeps a bin of its own; the rest share max_bin - 1 bins in
        // proportion to their distinct counts.
        let neg = &distinct[..zero];
        let pos = &distinct[zero + 1..];
        let budget = max_bin - 1;
        if budget < 2 && !neg.is_empty() && !pos.is_empty() {
            // Two bins cannot isolate zero between two signs.
            let bounds = vec![midpoint(0.0, pos[0]), f64::INFINITY];
            return BinMapper::from_upper_bounds(bounds);
        }
        let mut neg_bins = if neg.is_empty() {
            0
        } else {
            ((budget * neg.len()) as f64 / (neg.len() + pos.len()) as f64).round() as usize
        };
        if !neg.is_empty() {
            neg_bins = neg_bins.max(1);
        }
        if !pos.is_empty() {
            neg_bins = neg_bins.min(budget - 1);
        }
        let pos_bins = budget - neg_bins;
        if !neg.is_empty() {
            push_runs(neg, neg_bins, &mut runs);
        }
        runs.push((0.0, 0.0));
        if !pos.is_empty() {
            push_runs(pos, pos_bins, &mut runs);
        }
    } else {
        push_runs(&distinct, max_bin, &mut runs);
    }

    let mut bounds: Vec<f64> = runs.windows(2).map(|w| midpoint(w[0].1, w[1].0)).collect();
    bounds.push(f64::INFINITY);
    BinMapper::from_upper_bounds(bounds)
}

/// Per-feature bins of a dataset, row-major.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    pub n_rows: usize,
    pub n_features: usize,
    pub max_bin: usize,
    pub bins: Vec<u32>,
    pub mappers: Vec<BinMapper>,
}

impl BinnedMatrix {
    pub fn bin(&self, row: usize, feature: usize) -> u32 {
        self.bins[row * self.n_features + feature]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.bins[row * self.n_features..(row + 1) * self.n_features]
    }
}

/// Quantile-bins every feature of `dataset`.
pub fn bin_features(dataset: &Dataset, max_bin: usize) -> Result<BinnedMatrix, BoosterError> {
    let mappers = (0..dataset.n_features())
        .map(|j| fit_mapper(&dataset.column(j), max_bin))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(apply_mappers(
        dataset.features(),
        dataset.n_rows(),
        mappers,
        max_bin,
    ))
}

/// Bins a row-major matrix with existing mappers.
pub fn apply_mappers(
    features: &[f64],
    n_rows: usize,
    mappers: Vec<BinMapper>,
    max_bin: usize,
) -> BinnedMatrix {
    let n_features = mappers.len();
    let bins = features
        .chunks(n_features.max(1))
        .take(n_rows)
        .flat_map(|row| row.iter().zip(&mappers).map(|(&v, m)| m.bin(v)))
        .collect();
    BinnedMatrix {
        n_rows,
        n_features,
        max_bin,
        bins,
        mappers,
    }
}
