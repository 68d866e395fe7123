//! Benchmark harness: fit, calibrate, and score every requested method at
//! every requested level on one train/calibration/test split.
//!
//! Fits are shared wherever the methods allow it: the skew and scaled
//! methods reuse one location/scale fit, and the quantile-band method
//! fits one forest and re-targets its band per level. Output rows are
//! ordered canonically (method in [`Method::ALL`] order, then level
//! ascending), so the report is independent of the order in which methods
//! and levels were requested.

mod report;

pub use report::{efficiency_csv, markdown_tables, plot_points_csv, results_csv, results_json};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{
    calibrate, ceil_index, fit_cqr, fit_skew, ConformalError, IntervalModel, Method,
    PredictionInterval,
};
use crate::data::{split_three_way, DataError, Dataset, SplitSpec};
use crate::efficiency::{efficiency_report, EfficiencyError, EfficiencyReport};
use crate::learners::ForestParams;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("got {intervals} intervals but {responses} responses")]
    LengthMismatch { intervals: usize, responses: usize },
    #[error("no intervals to aggregate")]
    Empty,
    #[error("no methods requested")]
    NoMethods,
    #[error("no levels requested")]
    NoAlphas,
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Efficiency(#[from] EfficiencyError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("could not render a csv report: {0}")]
    Csv(#[from] csv::Error),
    #[error("could not render a json report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Fraction of responses inside their interval, endpoints included.
pub fn empirical_coverage(
    intervals: &[PredictionInterval],
    responses: &[f64],
) -> Result<f64, EvalError> {
    if intervals.len() != responses.len() {
        return Err(EvalError::LengthMismatch {
            intervals: intervals.len(),
            responses: responses.len(),
        });
    }
    if intervals.is_empty() {
        return Err(EvalError::Empty);
    }
    let hits = intervals
        .iter()
        .zip(responses)
        .filter(|(interval, &y)| interval.contains(y))
        .count();
    Ok(hits as f64 / intervals.len() as f64)
}

/// Mean interval width.
pub fn average_length(intervals: &[PredictionInterval]) -> Result<f64, EvalError> {
    if intervals.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(intervals.iter().map(|i| i.width()).sum::<f64>() / intervals.len() as f64)
}

/// What to run: which methods at which levels, with which forests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Label echoed into every output row (a synthetic spec id or file name).
    pub dataset_id: String,
    pub alphas: Vec<f64>,
    pub methods: Vec<Method>,
    pub forest: ForestParams,
    /// Run the skew method with its tilt forced to zero (diagnostic; makes
    /// it coincide with the scaled method exactly).
    pub zero_tilt: bool,
}

/// One (method, level) result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub dataset_id: String,
    pub method: Method,
    pub alpha: f64,
    pub empirical_coverage: f64,
    pub avg_length: f64,
    pub r_hat: f64,
    pub n_calib: usize,
    pub k_index: usize,
    pub n_test: usize,
    pub seed: u64,
}

/// One test-row interval, for plotting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub row: usize,
    pub method: Method,
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
    pub center: Option<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub results: Vec<BenchResult>,
    pub efficiency: Vec<EfficiencyReport>,
    pub plot_points: Vec<PlotPoint>,
}

fn sorted_unique_alphas(alphas: &[f64]) -> Result<Vec<f64>, EvalError> {
    if alphas.is_empty() {
        return Err(EvalError::NoAlphas);
    }
    let mut sorted = alphas.to_vec();
    for &alpha in &sorted {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(EvalError::Conformal(ConformalError::BadAlpha { alpha }));
        }
    }
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    Ok(sorted)
}

fn evaluate_method<M: IntervalModel>(
    model: &M,
    alpha: f64,
    config: &BenchConfig,
    calib: &Dataset,
    test: &Dataset,
    output: &mut BenchOutput,
) -> Result<(), EvalError> {
    let threshold = calibrate(model, calib, alpha)?;
    let mut intervals = Vec::with_capacity(test.n_rows());
    for i in 0..test.n_rows() {
        let interval = model.interval(test.feature_row(i), &threshold)?;
        output.plot_points.push(PlotPoint {
            row: i,
            method: model.method(),
            alpha,
            lo: interval.lo,
            hi: interval.hi,
            center: interval.center,
            y: test.response()[i],
        });
        intervals.push(interval);
    }
    output.results.push(BenchResult {
        dataset_id: config.dataset_id.clone(),
        method: model.method(),
        alpha,
        empirical_coverage: empirical_coverage(&intervals, test.response())?,
        avg_length: average_length(&intervals)?,
        r_hat: threshold.r_hat,
        n_calib: threshold.n_calib,
        k_index: threshold.k_index,
        n_test: test.n_rows(),
        seed: config.forest.seed,
    });
    Ok(())
}

/// Splits `data` three ways per the split spec (which carries its own
/// seed), then runs every requested (method, level) pair on that split
/// via [`run_benchmark_on_split`].
pub fn run_benchmark(
    config: &BenchConfig,
    data: &Dataset,
    split: &SplitSpec,
) -> Result<BenchOutput, EvalError> {
    let parts = split_three_way(data, split)?;
    run_benchmark_on_split(config, &parts.train, &parts.calibration, &parts.test)
}

/// Runs every requested (method, level) pair on an already-made split.
///
/// Admissibility of every level is checked against the calibration size
/// before any forest is fitted, so an infeasible request fails fast. When
/// both the skew and scaled methods are requested, an efficiency report
/// comparing them is produced per level.
pub fn run_benchmark_on_split(
    config: &BenchConfig,
    train: &Dataset,
    calib: &Dataset,
    test: &Dataset,
) -> Result<BenchOutput, EvalError> {
    if config.methods.is_empty() {
        return Err(EvalError::NoMethods);
    }
    let alphas = sorted_unique_alphas(&config.alphas)?;
    for &alpha in &alphas {
        ceil_index(calib.n_rows(), alpha)?;
    }
    let want = |m: Method| config.methods.contains(&m);

    let mut output = BenchOutput {
        results: Vec::new(),
        efficiency: Vec::new(),
        plot_points: Vec::new(),
    };

    let skew_model = if want(Method::Skew) || want(Method::Scaled) {
        Some(fit_skew(train, &config.forest)?.force_zero_tilt(config.zero_tilt))
    } else {
        None
    };
    let cqr_base = if want(Method::Cqr) {
        Some(fit_cqr(train, &config.forest, alphas[0])?)
    } else {
        None
    };

    for method in Method::ALL {
        if !want(method) {
            continue;
        }
        for &alpha in &alphas {
            match method {
                Method::Skew => {
                    let model = skew_model.as_ref().expect("fitted above");
                    evaluate_method(model, alpha, config, calib, test, &mut output)?;
                }
                Method::Scaled => {
                    let model = skew_model.as_ref().expect("fitted above").as_scaled();
                    evaluate_method(&model, alpha, config, calib, test, &mut output)?;
                }
                Method::Cqr => {
                    let model = cqr_base.as_ref().expect("fitted above").with_alpha(alpha)?;
                    evaluate_method(&model, alpha, config, calib, test, &mut output)?;
                }
            }
        }
    }

    if want(Method::Skew) && want(Method::Scaled) {
        let model = skew_model.as_ref().expect("fitted above");
        let scaled_model = model.as_scaled();
        for &alpha in &alphas {
            let thr_skew = calibrate(model, calib, alpha)?;
            let thr_scaled = calibrate(&scaled_model, calib, alpha)?;
            output.efficiency.push(efficiency_report(
                model,
                &thr_skew,
                &thr_scaled,
                calib.features().view(),
                test.features().view(),
            )?);
        }
    }

    Ok(output)
}
