//! Replication-based statistical checks: marginal coverage bands and the
//! convergence trend of the width-efficiency estimate.
//!
//! The coverage suite fixes one fitted model per method, then repeatedly
//! draws fresh calibration and test sets, recalibrates, and scores. With
//! calibration size `n`, each replication's expected coverage is
//! `k / (n + 1)`, which lies in `[1 - alpha, 1 - alpha + 1/(n + 1))`; the
//! suite checks that the replication mean lands in that band widened by
//! three Monte Carlo standard errors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{
    calibrate, ceil_index, fit_cqr, fit_skew, ConformalError, IntervalModel, Method,
};
use crate::efficiency::ConvergenceRow;
use crate::eval::{empirical_coverage, EvalError};
use crate::learners::ForestParams;
use crate::seeding::derive_seed;
use crate::synth::{generate, SynthError, SynthSpec};

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("no methods requested")]
    NoMethods,
    #[error("need at least 2 replications, got {got}")]
    TooFewReplications { got: usize },
    #[error("need at least 2 probe rows to check a trend, got {got}")]
    TooFewRows { got: usize },
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Sizes, level, and methods for [`coverage_suite`].
#[derive(Debug, Clone)]
pub struct CoverageProtocol {
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub forest: ForestParams,
    pub train_size: usize,
    pub n_calib: usize,
    pub test_size: usize,
    pub replications: usize,
}

/// One method's replication summary against its theoretical band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageCheck {
    pub method: Method,
    pub alpha: f64,
    pub mean_coverage: f64,
    pub mc_std_error: f64,
    /// `1 - alpha`.
    pub band_lo: f64,
    /// `1 - alpha + 1/(n_calib + 1)`.
    pub band_hi: f64,
    pub replications: usize,
    /// Whether `mean_coverage` lies in `[band_lo, band_hi]` widened by
    /// three standard errors on each side.
    pub pass: bool,
}

/// Runs the marginal-coverage replication protocol on one synthetic
/// population and returns a check per requested method, in canonical
/// method order.
///
/// The model for each method is fitted once on a training draw from
/// `population` (whose `n` field is ignored). Every replication then draws
/// a fresh calibration set and a fresh test set with seeds derived from
/// `population.seed`, recalibrates each method, and records the empirical
/// test coverage.
pub fn coverage_suite(
    population: &SynthSpec,
    protocol: &CoverageProtocol,
) -> Result<Vec<CoverageCheck>, ValidateError> {
    if protocol.methods.is_empty() {
        return Err(ValidateError::NoMethods);
    }
    if protocol.replications < 2 {
        return Err(ValidateError::TooFewReplications {
            got: protocol.replications,
        });
    }
    ceil_index(protocol.n_calib, protocol.alpha)?;
    let wanted: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| protocol.methods.contains(m))
        .collect();

    let master = population.seed;
    let train = generate(&SynthSpec {
        n: protocol.train_size,
        seed: derive_seed(master, 0),
        ..population.clone()
    })?;
    let skew_model = if wanted.contains(&Method::Skew) || wanted.contains(&Method::Scaled) {
        Some(fit_skew(&train, &protocol.forest)?)
    } else {
        None
    };
    let cqr_model = if wanted.contains(&Method::Cqr) {
        Some(fit_cqr(&train, &protocol.forest, protocol.alpha)?)
    } else {
        None
    };

    let stream = derive_seed(master, 1);
    let mut coverages: Vec<Vec<f64>> = vec![Vec::with_capacity(protocol.replications); wanted.len()];
    for rep in 0..protocol.replications {
        let calib = generate(&SynthSpec {
            n: protocol.n_calib,
            seed: derive_seed(stream, 2 * rep as u64),
            ..population.clone()
        })?;
        let test = generate(&SynthSpec {
            n: protocol.test_size,
            seed: derive_seed(stream, 2 * rep as u64 + 1),
            ..population.clone()
        })?;
        for (slot, method) in wanted.iter().enumerate() {
            let coverage = match method {
                Method::Skew => replicate(
                    skew_model.as_ref().expect("fitted above"),
                    &calib,
                    &test,
                    protocol.alpha,
                )?,
                Method::Scaled => replicate(
                    &skew_model.as_ref().expect("fitted above").as_scaled(),
                    &calib,
                    &test,
                    protocol.alpha,
                )?,
                Method::Cqr => replicate(
                    cqr_model.as_ref().expect("fitted above"),
                    &calib,
                    &test,
                    protocol.alpha,
                )?,
            };
            coverages[slot].push(coverage);
        }
    }

    let band_lo = 1.0 - protocol.alpha;
    let band_hi = band_lo + 1.0 / (protocol.n_calib as f64 + 1.0);
    Ok(wanted
        .iter()
        .zip(&coverages)
        .map(|(&method, covs)| {
            let mean = covs.iter().sum::<f64>() / covs.len() as f64;
            let var =
                covs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (covs.len() - 1) as f64;
            let se = (var / covs.len() as f64).sqrt();
            CoverageCheck {
                method,
                alpha: protocol.alpha,
                mean_coverage: mean,
                mc_std_error: se,
                band_lo,
                band_hi,
                replications: covs.len(),
                pass: mean >= band_lo - 3.0 * se && mean <= band_hi + 3.0 * se,
            }
        })
        .collect())
}

fn replicate<M: IntervalModel>(
    model: &M,
    calib: &crate::data::Dataset,
    test: &crate::data::Dataset,
    alpha: f64,
) -> Result<f64, ValidateError> {
    let threshold = calibrate(model, calib, alpha)?;
    let mut intervals = Vec::with_capacity(test.n_rows());
    for i in 0..test.n_rows() {
        intervals.push(model.interval(test.feature_row(i), &threshold)?);
    }
    Ok(empirical_coverage(&intervals, test.response())?)
}

/// Trend verdict over a [`convergence_probe`](crate::efficiency::convergence_probe)
/// table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCheck {
    /// The last row's mean gap is strictly below the first row's.
    pub final_below_first: bool,
    /// Every step is non-increasing up to three combined standard errors.
    pub monotone_within_noise: bool,
    pub pass: bool,
}

/// Checks that the estimate-vs-achieved gap shrinks along the grid: each
/// consecutive step may only grow by Monte Carlo noise (three combined
/// standard errors), and the final mean gap must be strictly below the
/// first.
pub fn convergence_check(rows: &[ConvergenceRow]) -> Result<ConvergenceCheck, ValidateError> {
    if rows.len() < 2 {
        return Err(ValidateError::TooFewRows { got: rows.len() });
    }
    let monotone_within_noise = rows.windows(2).all(|pair| {
        let slack = 3.0 * (pair[0].std_error.powi(2) + pair[1].std_error.powi(2)).sqrt();
        pair[1].mean_abs_gap <= pair[0].mean_abs_gap + slack
    });
    let final_below_first = rows[rows.len() - 1].mean_abs_gap < rows[0].mean_abs_gap;
    Ok(ConvergenceCheck {
        final_below_first,
        monotone_within_noise,
        pass: final_below_first && monotone_within_noise,
    })
}
