//! Gradient-boosted decision trees: histogram binning, exclusive feature
//! bundling, gradient-based one-side sampling and leaf-wise growth.

mod binning;
mod bundling;
mod config;
mod ensemble;
mod goss;
mod histogram;
mod model_io;
mod objective;
mod split;
mod tree;

pub use binning::{apply_mappers, bin_features, fit_mapper, BinMapper, BinnedMatrix};
pub use bundling::{assemble, efb_bundle, singleton_bundles, Bundle, BundledMatrix, FeatureSlot};
pub use config::{BoosterConfig, Objective};
pub use ensemble::{argmax, base_scores, train, train_with_log, Ensemble, Prediction, TrainingLog};
pub use goss::{goss_sample, goss_sample_magnitudes, GossSample};
pub use histogram::{
    direct_feature_histogram, from_fixed, row_stats, to_fixed, BinStats, BundleHistogram,
    FeatureBins, FeatureView, NodeHistogram, SparseHistogram,
};
pub use model_io::{from_text, load_model, save_model, to_text, ModelFormatError, FORMAT_VERSION};
pub use objective::{
    compute_gradients, log_loss, probabilities, sigmoid, softmax, GradientVector, MIN_HESSIAN,
};
pub use split::{
    admissible, estimated_variance_gain, find_best_split, parent_gain, ties_max, SplitContext,
    SplitInfo, GAIN_REL_EPS, GAIN_TIE_EPS,
};
pub use tree::{grow_tree_leafwise, leaf_value, GrowInput, Node, Tree, LEAF_LAMBDA};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoosterError {
    #[error("invalid booster configuration: {0}")]
    InvalidConfig(String),
    #[error("config expects {config} classes, dataset has {dataset}")]
    ClassCountMismatch { config: usize, dataset: usize },
    #[error("row {row}: label {label} outside [0, {n_classes})")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid bin boundaries {0}")]
    InvalidBins(String),
    #[error(transparent)]
    Model(#[from] ModelFormatError),
}
