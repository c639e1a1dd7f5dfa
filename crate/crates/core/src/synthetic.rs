//! Seeded synthetic feature matrices for tests, benchmarks and demos.
//!
//! Rows mimic pooled CNN activations: non-negative and partly sparse. The
//! first `informative` columns have class-dependent means; the rest are
//! noise. Generation is deterministic in the seed.

use crate::data::Dataset;
use crate::rng::{stream, CounterRng};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub class_counts: Vec<usize>,
    pub class_names: Vec<String>,
    pub n_features: usize,
    pub informative: usize,
    /// Shift of the informative means between classes, in noise units.
    pub separation: f64,
    /// Fraction of noise cells forced to zero.
    pub sparsity: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 1125 rows split 125/500/500 over three classes with 1664 columns.
    pub fn three_class() -> Self {
        SyntheticSpec {
            class_counts: vec![125, 500, 500],
            class_names: vec!["covid".into(), "pneumonia".into(), "no_findings".into()],
            n_features: 1664,
            informative: 64,
            separation: 1.5,
            sparsity: 0.5,
            seed: 2021,
        }
    }

    /// 625 rows split 125/500 over two classes with 1664 columns.
    pub fn two_class() -> Self {
        SyntheticSpec {
            class_counts: vec![125, 500],
            class_names: vec!["covid".into(), "no_findings".into()],
            ..Self::three_class()
        }
    }
}

/// Generates a dataset. Rows are grouped by class in the order given.
pub fn generate(spec: &SyntheticSpec) -> Dataset {
    let root = CounterRng::new(spec.seed).fork(stream::SYNTHETIC);
    let n_classes = spec.class_counts.len();
    // Each informative column gets a random class pattern of mean shifts.
    let mut pattern_rng = root.fork(0);
    let centres: Vec<Vec<f64>> = (0..spec.informative)
        .map(|_| {
            (0..n_classes)
                .map(|_| spec.separation * pattern_rng.below(3) as f64)
                .collect()
        })
        .collect();
    let mut rng = root.fork(1);
    let n: usize = spec.class_counts.iter().sum();
    let mut features = Vec::with_capacity(n * spec.n_features);
    let mut labels = Vec::with_capacity(n);
    for (c, &count) in spec.class_counts.iter().enumerate() {
        for _ in 0..count {
            for j in 0..spec.n_features {
                let v = if j < spec.informative {
                    (1.0 + centres[j][c] + rng.next_gaussian()).max(0.0)
                } else if rng.next_f64() < spec.sparsity {
                    0.0
                } else {
                    rng.next_gaussian().abs()
                };
                features.push(v);
            }
            labels.push(c);
        }
    }
    let feature_names = (0..spec.n_features).map(|j| format!("f{j}")).collect();
    Dataset::new(features, labels, feature_names, spec.class_names.clone())
        .expect("synthetic dataset is valid")
}
