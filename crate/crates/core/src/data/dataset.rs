use std::collections::HashSet;

use super::DataError;

/// Dense row-major feature matrix with dense integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_rows: usize,
    n_features: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking every invariant.
    ///
    /// `features` is row-major with `labels.len()` rows of
    /// `feature_names.len()` values each.
    pub fn new(
        features: Vec<f64>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self, DataError> {
        let n_rows = labels.len();
        let n_features = feature_names.len();
        if n_rows == 0 {
            return Err(DataError::Empty);
        }
        if features.len() != n_rows * n_features {
            return Err(DataError::Shape {
                expected: n_rows * n_features,
                found: features.len(),
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFinite {
                row: pos / n_features.max(1) + 1,
                column: feature_names[pos % n_features].clone(),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateFeature(name.clone()));
            }
        }
        let n_classes = class_names.len();
        let mut present = vec![false; n_classes];
        for (i, &y) in labels.iter().enumerate() {
            if y >= n_classes {
                return Err(DataError::LabelOutOfRange {
                    row: i + 1,
                    label: y,
                    n_classes,
                });
            }
            present[y] = true;
        }
        if let Some(c) = present.iter().position(|p| !p) {
            return Err(DataError::MissingClass(class_names[c].clone()));
        }
        Ok(Dataset {
            features,
            n_rows,
            n_features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Row-major backing storage.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.value(i, feature)).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Row indices of each class, ascending.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes()];
        for (i, &y) in self.labels.iter().enumerate() {
            out[y].push(i);
        }
        out
    }

    /// Dataset restricted to `rows` (in the given order). Fails if a class
    /// would disappear.
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset, DataError> {
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            if r >= self.n_rows {
                return Err(DataError::RowOutOfRange {
                    row: r,
                    n_rows: self.n_rows,
                });
            }
            features.extend_from_slice(self.row(r));
            labels.push(self.labels[r]);
        }
        Dataset::new(
            features,
            labels,
            self.feature_names.clone(),
            self.class_names.clone(),
        )
    }

    /// Copy of the listed feature columns, labels unchanged. Indices must be
    /// strictly increasing and in range.
    pub fn project(&self, indices: &[usize]) -> Result<Dataset, DataError> {
        for (pos, &j) in indices.iter().enumerate() {
            if j >= self.n_features {
                return Err(DataError::FeatureOutOfRange {
                    index: j,
                    n_features: self.n_features,
                });
            }
            if pos > 0 && indices[pos - 1] >= j {
                return Err(DataError::UnsortedIndices {
                    index: j,
                    position: pos,
                });
            }
        }
        let mut features = Vec::with_capacity(self.n_rows * indices.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            features.extend(indices.iter().map(|&j| row[j]));
        }
        Ok(Dataset {
            features,
            n_rows: self.n_rows,
            n_features: indices.len(),
            labels: self.labels.clone(),
            feature_names: indices
                .iter()
                .map(|&j| self.feature_names[j].clone())
                .collect(),
            class_names: self.class_names.clone(),
        })
    }
}
