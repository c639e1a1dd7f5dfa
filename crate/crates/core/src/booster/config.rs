use std::fmt;
use std::str::FromStr;

use super::BoosterError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    BinaryLogistic,
    MulticlassSoftmax,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::BinaryLogistic => "binary_logistic",
            Objective::MulticlassSoftmax => "multiclass_softmax",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = BoosterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary_logistic" => Ok(Objective::BinaryLogistic),
            "multiclass_softmax" => Ok(Objective::MulticlassSoftmax),
            other => Err(BoosterError::InvalidConfig(format!(
                "unknown objective `{other}`"
            ))),
        }
    }
}

/// Training configuration.
///
/// `goss_top_rate = 1` (with `goss_other_rate = 0`) trains on every sample;
/// `max_depth <= 0` leaves depth unbounded so growth stops at `num_leaves`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoosterConfig {
    pub num_trees: usize,
    pub learning_rate: f64,
    pub max_depth: i32,
    pub num_leaves: usize,
    pub min_samples_leaf: usize,
    pub min_split_gain: f64,
    pub goss_top_rate: f64,
    pub goss_other_rate: f64,
    pub max_bin: usize,
    /// Turns exclusive feature bundling on or off.
    pub bundling: bool,
    pub efb_max_conflict_rate: f64,
    pub objective: Objective,
    pub num_classes: usize,
    pub seed: u64,
}

impl Default for BoosterConfig {
    fn default() -> Self {
        BoosterConfig {
            num_trees: 100,
            learning_rate: 0.1,
            max_depth: 0,
            num_leaves: 31,
            min_samples_leaf: 1,
            min_split_gain: 0.0,
            goss_top_rate: 1.0,
            goss_other_rate: 0.0,
            max_bin: 255,
            bundling: true,
            efb_max_conflict_rate: 0.0,
            objective: Objective::BinaryLogistic,
            num_classes: 2,
            seed: 0,
        }
    }
}

impl BoosterConfig {
    /// GOSS rates used when sampling is switched on without explicit rates.
    pub const DEFAULT_GOSS: (f64, f64) = (0.2, 0.1);

    /// Trees grown per boosting iteration (raw score dimensions).
    pub fn trees_per_iteration(&self) -> usize {
        match self.objective {
            Objective::BinaryLogistic => 1,
            Objective::MulticlassSoftmax => self.num_classes,
        }
    }

    pub fn depth_limit(&self) -> Option<usize> {
        (self.max_depth > 0).then_some(self.max_depth as usize)
    }

    pub fn validate(&self) -> Result<(), BoosterError> {
        let bad = |msg: String| Err(BoosterError::InvalidConfig(msg));
        if self.num_trees == 0 {
            return bad("num_trees must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!(
                "learning_rate {} outside (0, 1]",
                self.learning_rate
            ));
        }
        if self.num_leaves < 2 {
            return bad("num_leaves must be at least 2".into());
        }
        if let Some(depth) = self.depth_limit() {
            if depth < usize::BITS as usize && self.num_leaves > 1usize << depth {
                return bad(format!(
                    "num_leaves {} exceeds 2^max_depth = {}",
                    self.num_leaves,
                    1usize << depth
                ));
            }
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be positive".into());
        }
        if !(self.min_split_gain >= 0.0) {
            return bad("min_split_gain must be non-negative".into());
        }
        let (a, b) = (self.goss_top_rate, self.goss_other_rate);
        if !(a > 0.0 && a <= 1.0) {
            return bad(format!("goss_top_rate {a} outside (0, 1]"));
        }
        if !(b >= 0.0 && b < 1.0) {
            return bad(format!("goss_other_rate {b} outside [0, 1)"));
        }
        if a + b > 1.0 + 1e-12 {
            return bad(format!("goss rates a = {a}, b = {b} sum above 1"));
        }
        if a == 1.0 && b != 0.0 {
            return bad("goss_top_rate = 1 requires goss_other_rate = 0".into());
        }
        if a < 1.0 && b == 0.0 {
            return bad("goss_other_rate must be positive when goss_top_rate < 1".into());
        }
        if self.max_bin < 2 {
            return bad("max_bin must be at least 2".into());
        }
        if !(0.0..=1.0).contains(&self.efb_max_conflict_rate) {
            return bad("efb_max_conflict_rate outside [0, 1]".into());
        }
        match self.objective {
            Objective::BinaryLogistic if self.num_classes != 2 => {
                bad("binary_logistic needs num_classes = 2".into())
            }
            Objective::MulticlassSoftmax if self.num_classes < 2 => {
                bad("multiclass_softmax needs num_classes >= 2".into())
            }
            _ => Ok(()),
        }
    }
}
