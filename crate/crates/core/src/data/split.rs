use crate::rng::{stream, CounterRng};

use super::{DataError, Dataset};

/// Train/validation/test partition of row indices. Each set is ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub train_idx: Vec<usize>,
    pub valid_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub seed: u64,
}

/// Stratified k-fold plan; `fold_test_sets[f]` is ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub fold_test_sets: Vec<Vec<usize>>,
    pub seed: u64,
}

impl FoldPlan {
    /// Every row index not held out in `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut held_out: Vec<usize> = self.fold_test_sets[fold].clone();
        held_out.sort_unstable();
        let n: usize = self.fold_test_sets.iter().map(Vec::len).sum();
        (0..n)
            .filter(|i| held_out.binary_search(i).is_err())
            .collect()
    }
}

/// Per-class shuffled row indices. Class `c` is shuffled by
/// `CounterRng::new(seed).fork(stage).fork(c)`.
fn shuffled_classes(dataset: &Dataset, seed: u64, stage: u64) -> Vec<Vec<usize>> {
    let root = CounterRng::new(seed).fork(stage);
    dataset
        .class_indices()
        .into_iter()
        .enumerate()
        .map(|(c, mut idx)| {
            root.fork(c as u64).shuffle(&mut idx);
            idx
        })
        .collect()
}

/// Largest-remainder apportionment of `total` items over `ratios`.
/// Remainder ties go to the earlier partition.
pub(crate) fn largest_remainder(total: usize, ratios: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = ratios.iter().map(|r| r * total as f64).collect();
    // The small epsilon keeps quotas such as 0.6 * 125 = 74.999... at 75.
    let mut counts: Vec<usize> = quotas.iter().map(|q| (q + 1e-9).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut left = total.saturating_sub(assigned);
    let frac: Vec<f64> = quotas
        .iter()
        .zip(&counts)
        .map(|(q, &c)| q - c as f64)
        .collect();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| frac[b].total_cmp(&frac[a]).then(a.cmp(&b)));
    for &p in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[p] += 1;
        left -= 1;
    }
    counts
}

/// Stratified train/validation/test split.
///
/// Within each class, row indices are shuffled by the seeded generator and
/// cut at the ratio boundaries (train first, then validation, then test),
/// with per-class counts from largest-remainder rounding.
pub fn stratified_split(
    dataset: &Dataset,
    ratios: [f64; 3],
    seed: u64,
) -> Result<SplitPlan, DataError> {
    if ratios.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(DataError::InvalidRatios(ratios.to_vec()));
    }
    if (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(DataError::InvalidRatios(ratios.to_vec()));
    }
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (c, idx) in shuffled_classes(dataset, seed, stream::SPLIT)
        .into_iter()
        .enumerate()
    {
        let mut counts = largest_remainder(idx.len(), &ratios);
        // Every partition must see every class. An empty cut borrows one row
        // from the cut with the largest surplus over its quota, provided
        // that cut stays non-empty and within one row of its quota.
        let quotas: Vec<f64> = ratios.iter().map(|r| r * idx.len() as f64).collect();
        while let Some(empty) = counts.iter().position(|&c| c == 0) {
            let donor = (0..3)
                .filter(|&p| counts[p] >= 2 && counts[p] as f64 + 1e-9 >= quotas[p])
                .max_by(|&a, &b| {
                    let surplus = |p: usize| counts[p] as f64 - quotas[p];
                    surplus(a).total_cmp(&surplus(b)).then(b.cmp(&a))
                });
            let Some(donor) = donor else { break };
            counts[donor] -= 1;
            counts[empty] += 1;
        }
        if counts.contains(&0) {
            return Err(DataError::ClassTooSmall {
                class: dataset.class_names()[c].clone(),
                count: idx.len(),
            });
        }
        let mut start = 0;
        for (part, &count) in parts.iter_mut().zip(&counts) {
            part.extend_from_slice(&idx[start..start + count]);
            start += count;
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    let [train_idx, valid_idx, test_idx] = parts;
    Ok(SplitPlan {
        train_idx,
        valid_idx,
        test_idx,
        seed,
    })
}

/// Stratified k-fold plan.
///
/// Each class is shuffled by the seeded generator, then dealt round-robin
/// over the folds. The dealing position carries over from one class to the
/// next so total fold sizes stay within one of each other.
pub fn stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    let smallest = dataset.class_counts().into_iter().min().unwrap_or(0);
    if k < 2 || k > smallest {
        return Err(DataError::InvalidFoldCount { k, smallest });
    }
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for idx in shuffled_classes(dataset, seed, stream::FOLD) {
        for i in idx {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(FoldPlan {
        k,
        fold_test_sets: folds,
        seed,
    })
}
