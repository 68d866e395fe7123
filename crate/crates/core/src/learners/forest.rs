//! Bagged forests: fitting, mean prediction, weighted-quantile prediction,
//! and JSON serialization.

use ndarray::ArrayView1;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree, TreeNode};
use super::LearnerError;
use crate::data::Dataset;
use crate::seeding::{derive_seed, uniform_below};

/// Hyperparameters for fitting a forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` resolves to `ceil(d / 3)`.
    pub mtry: Option<usize>,
    /// Minimum rows (bootstrap occurrences) in each child of a split.
    pub min_leaf: usize,
    /// Maximum root-to-leaf depth in edges; `None` grows until other stops.
    pub max_depth: Option<usize>,
    /// Resample rows with replacement per tree.
    pub bootstrap: bool,
    pub seed: u64,
}

impl ForestParams {
    /// Standard regression-forest defaults: 200 bootstrapped trees, a third
    /// of the features per split, at least 5 rows per leaf, unbounded depth.
    pub fn defaults(seed: u64) -> Self {
        Self {
            n_trees: 200,
            mtry: None,
            min_leaf: 5,
            max_depth: None,
            bootstrap: true,
            seed,
        }
    }

    pub fn resolved_mtry(&self, n_features: usize) -> usize {
        self.mtry.unwrap_or(n_features.div_ceil(3))
    }
}

/// What a fitted forest predicts. Trees are grown identically in both modes;
/// the mode only selects which prediction operations are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestMode {
    Mean,
    Quantile,
}

impl ForestMode {
    fn name(self) -> &'static str {
        match self {
            ForestMode::Mean => "mean",
            ForestMode::Quantile => "quantile",
        }
    }
}

/// A fitted forest. Immutable; prediction methods take `&self` and are safe
/// to call concurrently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<TreeNode>,
    params: ForestParams,
    mode: ForestMode,
    n_features: usize,
    tree_seeds: Vec<u64>,
    /// Training responses indexed by the row numbers stored in leaves.
    train_responses: Vec<f64>,
}

/// Fits a forest of [`ForestParams::n_trees`] CART trees on `train`.
///
/// Tree `i` gets its own seed `derive_seed(params.seed, i)`, from which it
/// derives one stream for the bootstrap draw and one for per-node feature
/// subsampling, so the fit is identical however trees are scheduled.
pub fn fit_forest(
    train: &Dataset,
    params: ForestParams,
    mode: ForestMode,
) -> Result<ForestModel, LearnerError> {
    let n = train.n_rows();
    let d = train.n_features();
    if n == 0 {
        return Err(LearnerError::EmptyTrainingSet);
    }
    if params.n_trees == 0 {
        return Err(LearnerError::InvalidParams {
            reason: "n_trees must be at least 1".to_string(),
        });
    }
    if params.min_leaf == 0 {
        return Err(LearnerError::InvalidParams {
            reason: "min_leaf must be at least 1".to_string(),
        });
    }
    let mtry = params.resolved_mtry(d);
    if mtry == 0 || mtry > d {
        return Err(LearnerError::InvalidParams {
            reason: format!("mtry {mtry} is outside 1..={d}"),
        });
    }

    let tree_seeds: Vec<u64> = (0..params.n_trees)
        .map(|i| derive_seed(params.seed, i as u64))
        .collect();
    let features = train.features();
    let responses = train.response();
    let trees: Vec<TreeNode> = tree_seeds
        .par_iter()
        .map(|&tree_seed| {
            let rows: Vec<usize> = if params.bootstrap {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(tree_seed, 0));
                (0..n)
                    .map(|_| uniform_below(&mut rng, n as u64) as usize)
                    .collect()
            } else {
                (0..n).collect()
            };
            fit_tree(
                features,
                responses,
                rows,
                mtry,
                params.min_leaf,
                params.max_depth,
                derive_seed(tree_seed, 1),
            )
        })
        .collect();

    Ok(ForestModel {
        trees,
        params,
        mode,
        n_features: d,
        tree_seeds,
        train_responses: responses.to_vec(),
    })
}

impl ForestModel {
    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn mode(&self) -> ForestMode {
        self.mode
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn check_input(&self, x: ArrayView1<'_, f64>) -> Result<(), LearnerError> {
        if x.len() != self.n_features {
            return Err(LearnerError::DimensionMismatch {
                got: x.len(),
                expected: self.n_features,
            });
        }
        Ok(())
    }

    /// Average of the per-tree leaf means at `x`. Mean mode only.
    pub fn predict_mean(&self, x: ArrayView1<'_, f64>) -> Result<f64, LearnerError> {
        if self.mode != ForestMode::Mean {
            return Err(LearnerError::WrongMode {
                requested: "mean",
                fitted: self.mode.name(),
            });
        }
        self.check_input(x)?;
        let sum: f64 = self.trees.iter().map(|t| t.leaf_for(x).1).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// Weighted empirical quantile of the training responses at `x`.
    /// Quantile mode only.
    ///
    /// Each occurrence of a training row in the leaf that `x` reaches in
    /// tree `t` contributes weight `1 / (n_trees * leaf_size)`; rows drawn
    /// several times by the bootstrap count with their multiplicity, so the
    /// weights of every tree sum to one. The quantile is left-continuous:
    /// the smallest response whose cumulative weight reaches `level`. The
    /// result is always an observed training response.
    pub fn predict_quantile(
        &self,
        x: ArrayView1<'_, f64>,
        level: f64,
    ) -> Result<f64, LearnerError> {
        Ok(self.weighted_quantiles(x, &[level])?[0])
    }

    /// Both quantiles from a single weight computation; equals two
    /// [`ForestModel::predict_quantile`] calls exactly.
    pub fn predict_quantile_pair(
        &self,
        x: ArrayView1<'_, f64>,
        lo_level: f64,
        hi_level: f64,
    ) -> Result<(f64, f64), LearnerError> {
        let q = self.weighted_quantiles(x, &[lo_level, hi_level])?;
        Ok((q[0], q[1]))
    }

    fn weighted_quantiles(
        &self,
        x: ArrayView1<'_, f64>,
        levels: &[f64],
    ) -> Result<Vec<f64>, LearnerError> {
        if self.mode != ForestMode::Quantile {
            return Err(LearnerError::WrongMode {
                requested: "quantile",
                fitted: self.mode.name(),
            });
        }
        self.check_input(x)?;
        for &level in levels {
            if !(level > 0.0 && level < 1.0) {
                return Err(LearnerError::BadQuantileLevel { level });
            }
        }

        let n_trees = self.trees.len() as f64;
        let mut weights = vec![0.0f64; self.train_responses.len()];
        for tree in &self.trees {
            let (rows, _) = tree.leaf_for(x);
            let per_occurrence = 1.0 / (n_trees * rows.len() as f64);
            for &row in rows {
                weights[row] += per_occurrence;
            }
        }

        let mut entries: Vec<(f64, f64)> = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(row, w)| (self.train_responses[row], *w))
            .collect();
        entries.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = entries.iter().map(|(_, w)| w).sum();

        let quantiles = levels
            .iter()
            .map(|&level| {
                let target = level * total;
                let mut cum = 0.0;
                for &(y, w) in &entries {
                    cum += w;
                    if cum >= target {
                        return y;
                    }
                }
                entries.last().expect("leaves are never empty").0
            })
            .collect();
        Ok(quantiles)
    }

    /// Serializes the full model as JSON: an object with fields `trees`
    /// (nested `internal` / `leaf` nodes), `params`, `mode`, `n_features`,
    /// `tree_seeds`, and `train_responses`. [`ForestModel::from_json`]
    /// restores an identical model.
    pub fn to_json(&self) -> Result<String, LearnerError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self, LearnerError> {
        Ok(serde_json::from_str(json)?)
    }
}
