//! One-way ANOVA F-test feature scoring and top-k selection.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::data::{DataError, Dataset};

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("ANOVA needs at least 2 classes, found {0}")]
    TooFewClasses(usize),
    #[error("class `{class}` has {count} samples; ANOVA needs at least 2 per class")]
    ClassTooSmall { class: String, count: usize },
    #[error("k = {k} out of range 1..={n_features}")]
    KOutOfRange { k: usize, n_features: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Per-feature F statistics and the induced ranking.
///
/// A perfectly separating feature (zero within-class variance, nonzero
/// between-class variance) scores `f64::INFINITY`, which orders above every
/// finite score.
#[derive(Debug, Clone, PartialEq)]
pub struct FScores {
    pub scores: Vec<f64>,
    /// Feature indices by descending score, ties by ascending index.
    pub ranking: Vec<usize>,
}

impl FScores {
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut ranking: Vec<usize> = (0..scores.len()).collect();
        ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        FScores { scores, ranking }
    }

    /// 1-based rank of every feature.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.scores.len()];
        for (pos, &j) in self.ranking.iter().enumerate() {
            ranks[j] = pos + 1;
        }
        ranks
    }

    /// Writes `feature_name,f_score,rank` rows in feature order.
    pub fn write_csv(
        &self,
        feature_names: &[String],
        path: impl AsRef<Path>,
    ) -> Result<(), SelectionError> {
        let path = path.as_ref();
        let io = |source| SelectionError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut out = String::from("feature_name,f_score,rank\n");
        for ((name, score), rank) in feature_names.iter().zip(&self.scores).zip(self.ranks()) {
            out.push_str(&format!("{name},{score},{rank}\n"));
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(io)
    }
}

/// Mean that is exact when every value is equal, so constant groups have
/// zero deviation rather than rounding noise.
fn mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut it = values.clone();
    let first = it.next().unwrap_or(0.0);
    if it.all(|v| v == first) {
        return first;
    }
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

/// F statistic of one feature given per-class row groups.
///
/// Two passes: class and grand means first, then squared deviations. Every
/// sum runs over values in sorted order, so the result does not depend on
/// row order.
fn f_statistic(values: &[f64], groups: &[Vec<usize>]) -> f64 {
    let n = values.len() as f64;
    let n_classes = groups.len() as f64;
    let sorted = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v
    };
    let grand_mean = mean(sorted(values.to_vec()).into_iter());
    let mut between = 0.0;
    let mut within = 0.0;
    for group in groups {
        let count = group.len() as f64;
        let class_values = sorted(group.iter().map(|&i| values[i]).collect());
        let mean = mean(class_values.iter().copied());
        between += count * (mean - grand_mean) * (mean - grand_mean);
        within += class_values
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<f64>();
    }
    let msb = between / (n_classes - 1.0);
    let msw = within / (n - n_classes);
    if msw > 0.0 {
        msb / msw
    } else if msb > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// One-way ANOVA F statistic of every feature against the class labels:
/// mean square between classes over mean square within classes.
pub fn anova_f_scores(dataset: &Dataset) -> Result<FScores, SelectionError> {
    let n_classes = dataset.n_classes();
    if n_classes < 2 {
        return Err(SelectionError::TooFewClasses(n_classes));
    }
    let groups = dataset.class_indices();
    if let Some((c, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(SelectionError::ClassTooSmall {
            class: dataset.class_names()[c].clone(),
            count: g.len(),
        });
    }
    let scores = (0..dataset.n_features())
        .map(|j| f_statistic(&dataset.column(j), &groups))
        .collect();
    Ok(FScores::from_scores(scores))
}

/// Indices of the `k` best-ranked features, ascending.
pub fn select_top_k(fscores: &FScores, k: usize) -> Result<Vec<usize>, SelectionError> {
    let n_features = fscores.scores.len();
    if k == 0 || k > n_features {
        return Err(SelectionError::KOutOfRange { k, n_features });
    }
    let mut chosen = fscores.ranking[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Dataset restricted to the listed feature columns.
pub fn project_dataset(dataset: &Dataset, indices: &[usize]) -> Result<Dataset, SelectionError> {
    Ok(dataset.project(indices)?)
}
