//! Width-efficiency diagnostics comparing the skew method to the scaled
//! baseline.
//!
//! At a point `x` the two calibrated intervals have widths
//! `2 * r_skew * sigma(x) * cosh(gamma(x))` and `2 * r_scaled * sigma(x)`,
//! so their ratio is `(r_skew / r_scaled) * cosh(gamma(x))` — the scale
//! cancels. Averaging the factor `cosh(gamma(X))` over the calibration
//! features gives a width-ratio estimate that needs no test set:
//!
//! ```text
//! phi_hat = (r_skew / r_scaled) * mean_i cosh(gamma(X_i))
//! ```
//!
//! `phi_hat < 1` predicts that the tilted intervals are narrower on
//! average. [`test_width_ratio`] measures the same quantity directly on
//! held-out rows (a mean of per-row ratios), and [`convergence_probe`]
//! tracks how fast the two agree as the calibration set grows.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{
    calibrate, fit_scaled, fit_skew, ConformalError, ConformalThreshold, IntervalModel,
    PredictionInterval, SkewModel,
};
use crate::learners::ForestParams;
use crate::seeding::derive_seed;
use crate::synth::{generate, SynthError, SynthSpec};

#[derive(Debug, Error)]
pub enum EfficiencyError {
    /// A zero scaled threshold makes every width ratio 0/0.
    #[error("the scaled threshold is zero, so width ratios are undefined")]
    ZeroScaledThreshold,
    /// A zero-width scaled interval makes that row's ratio undefined.
    #[error("the scaled interval at row {row} has zero width")]
    ZeroScaledWidth { row: usize },
    /// The two thresholds were calibrated at different levels.
    #[error("threshold levels differ: skew at alpha={skew}, scaled at alpha={scaled}")]
    AlphaMismatch { skew: f64, scaled: f64 },
    /// The interval lists are not paired row by row.
    #[error("got {skew} skew intervals but {scaled} scaled intervals")]
    LengthMismatch { skew: usize, scaled: usize },
    /// No feature rows to average over.
    #[error("no rows to average over")]
    NoRows,
    /// The convergence probe needs a non-empty calibration-size grid.
    #[error("the calibration-size grid is empty")]
    EmptyGrid,
    /// The convergence probe needs at least two replications for a
    /// standard error.
    #[error("need at least 2 replications, got {got}")]
    TooFewReplications { got: usize },
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Per-point width-inflation factor of the tilted interval relative to the
/// symmetric one at the same threshold: `(e^g + e^{-g}) / 2 = cosh(g)`.
pub fn cosh_tilt(gamma: f64) -> f64 {
    gamma.cosh()
}

/// `(r_skew / r_scaled) * mean(cosh(tilt))` from already-extracted parts.
fn phi_from_parts(r_skew: f64, r_scaled: f64, tilts: &[f64]) -> f64 {
    let mean_factor = tilts.iter().map(|&g| cosh_tilt(g)).sum::<f64>() / tilts.len() as f64;
    (r_skew / r_scaled) * mean_factor
}

fn check_thresholds(
    skew: &ConformalThreshold,
    scaled: &ConformalThreshold,
) -> Result<(), EfficiencyError> {
    if skew.alpha != scaled.alpha {
        return Err(EfficiencyError::AlphaMismatch {
            skew: skew.alpha,
            scaled: scaled.alpha,
        });
    }
    if scaled.r_hat == 0.0 {
        return Err(EfficiencyError::ZeroScaledThreshold);
    }
    Ok(())
}

/// The calibration-side width-ratio estimate `phi_hat`: the threshold
/// ratio times the average `cosh` of the model's tilt over the given
/// feature rows. Since `cosh >= 1`, the result is never below
/// `r_skew / r_scaled`, with equality exactly when the tilt vanishes at
/// every row.
pub fn estimate_phi(
    model: &SkewModel,
    skew: &ConformalThreshold,
    scaled: &ConformalThreshold,
    calib_features: ArrayView2<'_, f64>,
) -> Result<f64, EfficiencyError> {
    check_thresholds(skew, scaled)?;
    if calib_features.nrows() == 0 {
        return Err(EfficiencyError::NoRows);
    }
    let mut tilts = Vec::with_capacity(calib_features.nrows());
    for row in calib_features.rows() {
        tilts.push(model.tilt(row)?);
    }
    Ok(phi_from_parts(skew.r_hat, scaled.r_hat, &tilts))
}

/// The achieved width ratio on held-out rows: the mean over rows of
/// `width_skew / width_scaled`, one paired interval per row. This is the
/// mean of per-row ratios, not the ratio of total widths.
pub fn test_width_ratio(
    intervals_skew: &[PredictionInterval],
    intervals_scaled: &[PredictionInterval],
) -> Result<f64, EfficiencyError> {
    if intervals_skew.len() != intervals_scaled.len() {
        return Err(EfficiencyError::LengthMismatch {
            skew: intervals_skew.len(),
            scaled: intervals_scaled.len(),
        });
    }
    if intervals_skew.is_empty() {
        return Err(EfficiencyError::NoRows);
    }
    let mut total = 0.0;
    for (row, (a, b)) in intervals_skew.iter().zip(intervals_scaled).enumerate() {
        if b.width() == 0.0 {
            return Err(EfficiencyError::ZeroScaledWidth { row });
        }
        total += a.width() / b.width();
    }
    Ok(total / intervals_skew.len() as f64)
}

/// [`estimate_phi`] and [`test_width_ratio`] for one calibrated pair,
/// bundled for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub alpha: f64,
    pub phi_hat: f64,
    pub test_avg_ratio: f64,
    /// `|phi_hat - test_avg_ratio|`.
    pub abs_difference: f64,
    pub r_hat_skew: f64,
    pub r_hat_scaled: f64,
    pub n_calib: usize,
    pub n_test: usize,
}

pub fn efficiency_report(
    model: &SkewModel,
    skew: &ConformalThreshold,
    scaled: &ConformalThreshold,
    calib_features: ArrayView2<'_, f64>,
    test_features: ArrayView2<'_, f64>,
) -> Result<EfficiencyReport, EfficiencyError> {
    let phi_hat = estimate_phi(model, skew, scaled, calib_features)?;
    let scaled_model = model.as_scaled();
    let mut intervals_skew = Vec::with_capacity(test_features.nrows());
    let mut intervals_scaled = Vec::with_capacity(test_features.nrows());
    for row in test_features.rows() {
        intervals_skew.push(model.interval(row, skew)?);
        intervals_scaled.push(scaled_model.interval(row, scaled)?);
    }
    let test_avg_ratio = test_width_ratio(&intervals_skew, &intervals_scaled)?;
    Ok(EfficiencyReport {
        alpha: skew.alpha,
        phi_hat,
        test_avg_ratio,
        abs_difference: (phi_hat - test_avg_ratio).abs(),
        r_hat_skew: skew.r_hat,
        r_hat_scaled: scaled.r_hat,
        n_calib: calib_features.nrows(),
        n_test: test_features.nrows(),
    })
}

/// Sizes and level for [`convergence_probe`], shared across the grid.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub alpha: f64,
    pub forest: ForestParams,
    pub train_size: usize,
    pub test_size: usize,
}

/// One grid point of the probe: the gap `|phi_hat - test_avg_ratio|`
/// averaged over replications, with its Monte Carlo standard error and the
/// average estimate itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_calib: usize,
    pub mean_abs_gap: f64,
    pub std_error: f64,
    pub mean_phi: f64,
    pub replications: usize,
}

/// Measures how the gap between the calibration-side estimate and the
/// achieved test ratio shrinks as the calibration set grows.
///
/// The model is fitted once on a training draw from `population` (whose
/// `n` field is ignored; sizes come from `config` and the grid). For each
/// grid size and replication, fresh calibration and test sets are drawn
/// with seeds derived from `population.seed`, both methods are
/// recalibrated, and the absolute gap is recorded.
pub fn convergence_probe(
    population: &SynthSpec,
    n_calib_grid: &[usize],
    replications: usize,
    config: &ProbeConfig,
) -> Result<Vec<ConvergenceRow>, EfficiencyError> {
    if n_calib_grid.is_empty() {
        return Err(EfficiencyError::EmptyGrid);
    }
    if replications < 2 {
        return Err(EfficiencyError::TooFewReplications { got: replications });
    }
    let master = population.seed;
    let train = generate(&SynthSpec {
        n: config.train_size,
        seed: derive_seed(master, 0),
        ..population.clone()
    })?;
    let model = fit_skew(&train, &config.forest)?;
    let scaled_model = fit_scaled(&train, &config.forest)?;

    let mut rows = Vec::with_capacity(n_calib_grid.len());
    for (grid_idx, &n_calib) in n_calib_grid.iter().enumerate() {
        let stream = derive_seed(master, grid_idx as u64 + 1);
        let mut gaps = Vec::with_capacity(replications);
        let mut phis = Vec::with_capacity(replications);
        for rep in 0..replications {
            let calib = generate(&SynthSpec {
                n: n_calib,
                seed: derive_seed(stream, 2 * rep as u64),
                ..population.clone()
            })?;
            let test = generate(&SynthSpec {
                n: config.test_size,
                seed: derive_seed(stream, 2 * rep as u64 + 1),
                ..population.clone()
            })?;
            let thr_skew = calibrate(&model, &calib, config.alpha)?;
            let thr_scaled = calibrate(&scaled_model, &calib, config.alpha)?;
            let report = efficiency_report(
                &model,
                &thr_skew,
                &thr_scaled,
                calib.features().view(),
                test.features().view(),
            )?;
            gaps.push(report.abs_difference);
            phis.push(report.phi_hat);
        }
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (gaps.len() - 1) as f64;
        rows.push(ConvergenceRow {
            n_calib,
            mean_abs_gap: mean,
            std_error: (var / gaps.len() as f64).sqrt(),
            mean_phi: phis.iter().sum::<f64>() / phis.len() as f64,
            replications,
        });
    }
    Ok(rows)
}
