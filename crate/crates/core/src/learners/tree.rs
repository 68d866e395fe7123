//! Greedy CART regression trees grown on sum-of-squared-error reduction.

use ndarray::{Array2, ArrayView1};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seeding::uniform_below;

/// Gains below `node_sse * GAIN_GUARD` are treated as zero, so numerically
/// constant nodes do not split on floating-point dust.
const GAIN_GUARD: f64 = 1e-12;

/// A node of a fitted regression tree. Leaves retain the training rows that
/// reached them (with bootstrap multiplicity), which is what quantile-mode
/// prediction aggregates over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// Row indices into the fitting set, repeats included.
        training_rows: Vec<usize>,
        /// Mean response over `training_rows`.
        mean: f64,
    },
}

impl TreeNode {
    /// Routes a feature row to its leaf: `x[feature] <= threshold` goes left.
    pub fn leaf_for(&self, x: ArrayView1<'_, f64>) -> (&[usize], f64) {
        match self {
            TreeNode::Leaf {
                training_rows,
                mean,
            } => (training_rows, *mean),
            TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                if x[*feature_index] <= *threshold {
                    left.leaf_for(x)
                } else {
                    right.leaf_for(x)
                }
            }
        }
    }

    /// Length of the longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    #[cfg(test)]
    pub(crate) fn for_each_leaf(&self, f: &mut impl FnMut(&[usize], f64)) {
        match self {
            TreeNode::Leaf {
                training_rows,
                mean,
            } => f(training_rows, *mean),
            TreeNode::Internal { left, right, .. } => {
                left.for_each_leaf(f);
                right.for_each_leaf(f);
            }
        }
    }
}

struct TreeBuilder<'a> {
    features: &'a Array2<f64>,
    responses: &'a [f64],
    mtry: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    rng: ChaCha8Rng,
}

/// Grows one tree on the given rows (a bootstrap sample or the full index
/// range). `seed` drives only the per-node feature subsampling; the caller
/// draws the bootstrap rows from its own stream.
pub(crate) fn fit_tree(
    features: &Array2<f64>,
    responses: &[f64],
    rows: Vec<usize>,
    mtry: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    seed: u64,
) -> TreeNode {
    debug_assert!(!rows.is_empty());
    debug_assert!(mtry >= 1 && mtry <= features.ncols());
    debug_assert!(min_leaf >= 1);
    let mut builder = TreeBuilder {
        features,
        responses,
        mtry,
        min_leaf,
        max_depth,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    builder.build(rows, 0)
}

struct Split {
    feature_index: usize,
    threshold: f64,
    proxy: f64,
}

impl TreeBuilder<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> TreeNode {
        let n = rows.len();
        let sum: f64 = rows.iter().map(|&r| self.responses[r]).sum();
        let mean = sum / n as f64;

        let at_depth_limit = self.max_depth.is_some_and(|d| depth >= d);
        if n < 2 * self.min_leaf || at_depth_limit || self.is_constant(&rows) {
            return TreeNode::Leaf {
                training_rows: rows,
                mean,
            };
        }

        let node_sse: f64 = rows
            .iter()
            .map(|&r| {
                let d = self.responses[r] - mean;
                d * d
            })
            .sum();
        if node_sse <= 0.0 {
            return TreeNode::Leaf {
                training_rows: rows,
                mean,
            };
        }

        let split = match self.best_split(&rows, sum, node_sse) {
            Some(split) => split,
            None => {
                return TreeNode::Leaf {
                    training_rows: rows,
                    mean,
                }
            }
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&r| {
            self.features[(r, split.feature_index)] <= split.threshold
        });
        debug_assert!(left_rows.len() >= self.min_leaf && right_rows.len() >= self.min_leaf);

        let left = Box::new(self.build(left_rows, depth + 1));
        let right = Box::new(self.build(right_rows, depth + 1));
        TreeNode::Internal {
            feature_index: split.feature_index,
            threshold: split.threshold,
            left,
            right,
        }
    }

    fn is_constant(&self, rows: &[usize]) -> bool {
        let first = self.responses[rows[0]];
        rows.iter().all(|&r| self.responses[r] == first)
    }

    /// Sorted `mtry`-subset of the feature indices. Candidates are evaluated
    /// in ascending index order so gain ties resolve to the lowest feature.
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.features.ncols();
        if self.mtry == d {
            return (0..d).collect();
        }
        let mut idx: Vec<usize> = (0..d).collect();
        for i in 0..self.mtry {
            let j = i + uniform_below(&mut self.rng, (d - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(self.mtry);
        idx.sort_unstable();
        idx
    }

    /// Best split by the sum-of-squares proxy `S_L^2/n_L + S_R^2/n_R`
    /// (maximizing it minimizes the post-split SSE). Thresholds sit midway
    /// between consecutive distinct values; the strict `>` keeps the first
    /// optimum in (feature, threshold) order, and splits whose gain is
    /// indistinguishable from zero are rejected.
    fn best_split(&mut self, rows: &[usize], sum: f64, node_sse: f64) -> Option<Split> {
        let n = rows.len();
        let base_proxy = sum * sum / n as f64;
        let mut best: Option<Split> = None;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        for feature_index in self.candidate_features() {
            pairs.clear();
            pairs.extend(
                rows.iter()
                    .map(|&r| (self.features[(r, feature_index)], self.responses[r])),
            );
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

            let mut left_sum = 0.0;
            for i in 1..n {
                left_sum += pairs[i - 1].1;
                if i < self.min_leaf || n - i < self.min_leaf {
                    continue;
                }
                let (v_prev, v_next) = (pairs[i - 1].0, pairs[i].0);
                if v_prev >= v_next {
                    continue;
                }
                let right_sum = sum - left_sum;
                let proxy =
                    left_sum * left_sum / i as f64 + right_sum * right_sum / (n - i) as f64;
                let gain_ok = proxy - base_proxy > GAIN_GUARD * node_sse;
                if gain_ok && best.as_ref().is_none_or(|b| proxy > b.proxy) {
                    // The midpoint can round up to v_next when the two values
                    // are adjacent floats; fall back to v_prev so rows at
                    // v_next still route right under `x <= threshold`.
                    let mut threshold = v_prev + (v_next - v_prev) / 2.0;
                    if threshold >= v_next {
                        threshold = v_prev;
                    }
                    best = Some(Split {
                        feature_index,
                        threshold,
                        proxy,
                    });
                }
            }
        }
        best
    }
}
