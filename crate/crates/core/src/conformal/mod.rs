//! The conformal engine: conformity scores, the calibration threshold, and
//! the fit/calibrate/predict pipelines for the three interval methods.
//!
//! All three methods follow the same split protocol. Models are fitted on
//! the training part only. On the calibration part each method computes one
//! nonconformity score per row; the threshold `r_hat` is the k-th smallest
//! calibration score with `k = ceil((1 - alpha) * (n + 1))`, which makes the
//! closed interval `{y : score(x, y) <= r_hat}` cover a fresh exchangeable
//! point with probability at least `1 - alpha`.
//!
//! The methods differ in their score geometry:
//!
//! * [`ScaledModel`] uses `|y - mu(x)| / sigma(x)`: symmetric intervals
//!   `mu ± r_hat * sigma`.
//! * [`SkewModel`] adds a learned tilt `gamma(x)` that stretches one arm and
//!   shrinks the other: `[mu - r*sigma*e^{-gamma}, mu + r*sigma*e^{gamma}]`.
//!   The tilt is trained on `arcsinh(z/2)` of the standardized signed
//!   residual `z`, whose sign tracks which arm needs more room.
//! * [`CqrModel`] calibrates an additive correction to a quantile forest's
//!   `[alpha/2, 1-alpha/2]` band; its scores may be negative, letting the
//!   band shrink when it is conservative.

mod gauge;
mod pipeline;
mod threshold;

pub use gauge::{
    arcsinh_target, arms_to_scale_tilt, cqr_interval, cqr_score, scale_tilt_to_arms,
    scaled_interval, scaled_score, skew_gauge, skew_interval,
};
pub use pipeline::{
    calibrate, fit_cqr, fit_scaled, fit_skew, predict_interval, CqrModel, IntervalModel,
    PredictionInterval, ScaledModel, SkewModel,
};
pub use threshold::{calibrate_threshold, ceil_index, ConformalThreshold};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::learners::LearnerError;

/// The three interval constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Scaled,
    Skew,
    Cqr,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Skew, Method::Scaled, Method::Cqr];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = match self {
            Method::Scaled => "scaled",
            Method::Skew => "skew",
            Method::Cqr => "cqr",
        };
        write!(f, "{id}")
    }
}

impl FromStr for Method {
    type Err = ConformalError;
    fn from_str(s: &str) -> Result<Self, ConformalError> {
        match s {
            "scaled" => Ok(Method::Scaled),
            "skew" => Ok(Method::Skew),
            "cqr" => Ok(Method::Cqr),
            other => Err(ConformalError::UnknownMethod {
                id: other.to_string(),
            }),
        }
    }
}

/// Errors raised by calibration and interval prediction.
#[derive(Debug, Error)]
pub enum ConformalError {
    #[error("alpha {alpha} is outside (0, 1)")]
    BadAlpha { alpha: f64 },
    #[error(
        "calibration set of size {n_calib} is too small for alpha = {alpha}: \
         the required order statistic index {k_index} exceeds {n_calib}"
    )]
    NotAdmissible {
        n_calib: usize,
        alpha: f64,
        k_index: usize,
    },
    #[error("no calibration scores")]
    EmptyCalibration,
    #[error("calibration scores contain a non-finite value")]
    NonFiniteScore,
    #[error("quantile band is crossed: lower {q_lo} exceeds upper {q_hi}")]
    CrossedBand { q_lo: f64, q_hi: f64 },
    #[error("scale must be positive, got {value}")]
    NonPositiveScale { value: f64 },
    #[error("negative threshold {r_hat} is invalid for the {method} method")]
    NegativeThreshold { r_hat: f64, method: Method },
    #[error("unknown method id {id:?}")]
    UnknownMethod { id: String },
    #[error(transparent)]
    Learner(#[from] LearnerError),
}
