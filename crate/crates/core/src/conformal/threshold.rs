//! The calibration order statistic: index arithmetic and threshold
//! selection.

use serde::{Deserialize, Serialize};

use super::ConformalError;
use crate::exact::ceil_one_minus_times;

/// A calibrated expansion threshold.
///
/// `r_hat` is the `k_index`-th smallest of the `n_calib` calibration scores,
/// with `k_index = ceil((1 - alpha) * (n_calib + 1))`. For continuous score
/// distributions the induced intervals cover a fresh point with probability
/// exactly `k_index / (n_calib + 1)`, which lies in
/// `[1 - alpha, 1 - alpha + 1/(n_calib + 1))`. `r_hat` is nonnegative for
/// the scaled and skew scores; conformalized quantile scores can make it
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalThreshold {
    pub r_hat: f64,
    pub alpha: f64,
    pub n_calib: usize,
    pub k_index: usize,
}

/// The 1-based order statistic index `ceil((1 - alpha) * (n_calib + 1))`.
///
/// Evaluated in exact rational arithmetic so integer-valued products are not
/// over-ceiled by floating-point drift (with `alpha = 0.10` and
/// `n_calib = 99`, the index is exactly 90, not 91). Errors when the index
/// exceeds `n_calib`: the calibration set is too small to support the
/// requested level.
pub fn ceil_index(n_calib: usize, alpha: f64) -> Result<usize, ConformalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ConformalError::BadAlpha { alpha });
    }
    let k = (ceil_one_minus_times(alpha, n_calib as u64 + 1) as usize).max(1);
    if k > n_calib {
        return Err(ConformalError::NotAdmissible {
            n_calib,
            alpha,
            k_index: k,
        });
    }
    Ok(k)
}

/// Sorts the calibration scores ascending (duplicates kept) and returns the
/// [`ceil_index`]-th smallest as the threshold.
pub fn calibrate_threshold(
    scores: &[f64],
    alpha: f64,
) -> Result<ConformalThreshold, ConformalError> {
    if scores.is_empty() {
        return Err(ConformalError::EmptyCalibration);
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(ConformalError::NonFiniteScore);
    }
    let n_calib = scores.len();
    let k_index = ceil_index(n_calib, alpha)?;
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    Ok(ConformalThreshold {
        r_hat: sorted[k_index - 1],
        alpha,
        n_calib,
        k_index,
    })
}
