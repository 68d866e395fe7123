//! Base learners: CART regression trees and bagged forests, built from
//! scratch with explicit seeding.
//!
//! A forest is fitted in one of two modes. *Mean* mode is the ordinary
//! bagged regression forest: a prediction averages the leaf means of all
//! trees. *Quantile* mode keeps the same tree construction (split on mean
//! squared error) but predicts weighted empirical quantiles of the training
//! responses retained in the leaves, in the style of quantile regression
//! forests. Trees grow greedily on sum-of-squared-error reduction with
//! midpoint thresholds; ties in gain break deterministically toward the
//! lowest feature index and smallest threshold.
//!
//! Every source of randomness (bootstrap resampling, per-node feature
//! subsampling) flows from one `u64` master seed through
//! [`crate::seeding::derive_seed`], so fitting is reproducible and
//! independent of tree scheduling.

mod forest;
mod tree;

pub use forest::{fit_forest, ForestMode, ForestModel, ForestParams};
pub use tree::TreeNode;

use thiserror::Error;

/// Errors raised while fitting or querying forests.
#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid forest parameters: {reason}")]
    InvalidParams { reason: String },
    #[error("input has {got} features but the model expects {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("quantile level {level} is outside (0, 1)")]
    BadQuantileLevel { level: f64 },
    #[error("{requested} prediction requested from a forest fitted in {fitted} mode")]
    WrongMode {
        requested: &'static str,
        fitted: &'static str,
    },
    #[error("failed to encode or decode a forest model: {0}")]
    Json(#[from] serde_json::Error),
}
