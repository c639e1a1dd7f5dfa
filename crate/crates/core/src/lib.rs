//! Gradient-boosted decision trees with gradient-based one-side sampling
//! (GOSS), exclusive feature bundling (EFB) and leaf-wise growth, together
//! with one-way ANOVA F-test feature selection, stratified partitioning and
//! classification metrics.
//!
//! The typical flow is [`data::load_csv`] → [`data::stratified_split`] →
//! [`selection::anova_f_scores`] → [`selection::select_top_k`] →
//! [`booster::train`] → [`booster::Ensemble::predict`] →
//! [`metrics::macro_report`].

pub mod booster;
pub mod data;
pub mod metrics;
pub mod rng;
pub mod selection;
pub mod synthetic;
