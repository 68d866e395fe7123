//! Fitted interval models and the calibrate/predict entry points.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::gauge::{
    arcsinh_target, cqr_interval, cqr_score, scaled_interval, scaled_score, skew_gauge,
    skew_interval,
};
use super::threshold::{calibrate_threshold, ConformalThreshold};
use super::{ConformalError, Method};
use crate::data::Dataset;
use crate::learners::{fit_forest, ForestMode, ForestModel, ForestParams};
use crate::seeding::derive_seed;

/// The effective scale is `max(sigma_hat(x), floor)` with
/// `floor = 1e-8 * sd(training response)`, guarding against a zero scale at
/// points the scale forest interpolates exactly.
const SIGMA_FLOOR_REL: f64 = 1e-8;

/// Tilt predictions are clamped to `[-5, 5]`: one-sided inflation is capped
/// at `e^5` (about 148x), preventing pathological intervals when the tilt
/// forest extrapolates.
const GAMMA_CLIP: f64 = 5.0;

/// Seed streams for the forests inside the fitted models, derived from the
/// caller's master seed. Location and scale use the same streams in both
/// the skew and scaled pipelines, so the two methods share those fits
/// exactly whenever they are given the same parameters.
const MU_STREAM: u64 = 1;
const SIGMA_STREAM: u64 = 2;
const GAMMA_STREAM: u64 = 3;
const QUANTILE_STREAM: u64 = 4;

/// One prediction interval `[lo, hi]`, closed on both ends. `center` is the
/// location estimate for the scaled and skew methods and absent for the
/// quantile-band method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionInterval {
    pub lo: f64,
    pub hi: f64,
    pub method: Method,
    pub center: Option<f64>,
}

impl PredictionInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Closed-interval membership.
    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }
}

/// Common surface of the three fitted methods: a nonconformity score and an
/// interval builder, linked by `interval(x, r).contains(y) <=> score(x, y) <= r`.
pub trait IntervalModel {
    fn method(&self) -> Method;
    fn n_features(&self) -> usize;
    fn score(&self, x: ArrayView1<'_, f64>, y: f64) -> Result<f64, ConformalError>;
    fn interval(
        &self,
        x: ArrayView1<'_, f64>,
        threshold: &ConformalThreshold,
    ) -> Result<PredictionInterval, ConformalError>;
}

fn sigma_floor_for(train: &Dataset) -> f64 {
    let sd = train.response_std();
    if sd > 0.0 {
        SIGMA_FLOOR_REL * sd
    } else {
        SIGMA_FLOOR_REL
    }
}

fn with_seed(params: &ForestParams, stream: u64) -> ForestParams {
    ForestParams {
        seed: derive_seed(params.seed, stream),
        ..*params
    }
}

/// Fits the location forest and the scale forest (on in-sample absolute
/// residuals), returning the fits plus the per-row location predictions.
fn fit_location_scale(
    train: &Dataset,
    params: &ForestParams,
) -> Result<(Arc<ForestModel>, Arc<ForestModel>, Vec<f64>), ConformalError> {
    let mu = fit_forest(train, with_seed(params, MU_STREAM), ForestMode::Mean)?;
    let n = train.n_rows();
    let mut mu_hat = Vec::with_capacity(n);
    for i in 0..n {
        mu_hat.push(mu.predict_mean(train.feature_row(i))?);
    }
    let deltas: Vec<f64> = (0..n)
        .map(|i| (train.response()[i] - mu_hat[i]).abs())
        .collect();
    let sigma_train = Dataset::new(
        train.features().clone(),
        deltas,
        train.feature_names().to_vec(),
    )
    .expect("absolute residuals are finite");
    let sigma = fit_forest(&sigma_train, with_seed(params, SIGMA_STREAM), ForestMode::Mean)?;
    Ok((Arc::new(mu), Arc::new(sigma), mu_hat))
}

/// Location/scale/tilt model producing tilted intervals
/// `[mu - r*sigma*e^{-gamma}, mu + r*sigma*e^{gamma}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewModel {
    mu: Arc<ForestModel>,
    sigma: Arc<ForestModel>,
    gamma: Arc<ForestModel>,
    sigma_floor: f64,
    gamma_clip: f64,
    zero_tilt: bool,
}

/// Fits the three forests of the skew method on the training set:
///
/// 1. a location forest for `mu` on the responses;
/// 2. a scale forest for `sigma` on the in-sample absolute residuals
///    `|y_i - mu(x_i)|`;
/// 3. a tilt forest for `gamma` on `arcsinh(z_i / 2)`, where
///    `z_i = (y_i - mu(x_i)) / max(sigma(x_i), floor)` is the standardized
///    signed residual.
///
/// The three forests draw independent seeds derived from `params.seed`, so
/// a single master seed reproduces the whole model.
pub fn fit_skew(train: &Dataset, params: &ForestParams) -> Result<SkewModel, ConformalError> {
    let (mu, sigma, mu_hat) = fit_location_scale(train, params)?;
    let sigma_floor = sigma_floor_for(train);
    let n = train.n_rows();
    let mut taus = Vec::with_capacity(n);
    for i in 0..n {
        let scale = sigma.predict_mean(train.feature_row(i))?.max(sigma_floor);
        let z = (train.response()[i] - mu_hat[i]) / scale;
        taus.push(arcsinh_target(z));
    }
    let gamma_train = Dataset::new(
        train.features().clone(),
        taus,
        train.feature_names().to_vec(),
    )
    .expect("tilt targets are finite");
    let gamma = fit_forest(
        &gamma_train,
        with_seed(params, GAMMA_STREAM),
        ForestMode::Mean,
    )?;
    Ok(SkewModel {
        mu,
        sigma,
        gamma: Arc::new(gamma),
        sigma_floor,
        gamma_clip: GAMMA_CLIP,
        zero_tilt: false,
    })
}

impl SkewModel {
    /// Location estimate `mu(x)`.
    pub fn location(&self, x: ArrayView1<'_, f64>) -> Result<f64, ConformalError> {
        Ok(self.mu.predict_mean(x)?)
    }

    /// Floored scale estimate `max(sigma(x), floor)`.
    pub fn scale(&self, x: ArrayView1<'_, f64>) -> Result<f64, ConformalError> {
        Ok(self.sigma.predict_mean(x)?.max(self.sigma_floor))
    }

    /// Effective tilt: the clamped forest prediction, or exactly zero when
    /// the zero-tilt debug flag is set.
    pub fn tilt(&self, x: ArrayView1<'_, f64>) -> Result<f64, ConformalError> {
        if self.zero_tilt {
            return Ok(0.0);
        }
        let raw = self.gamma.predict_mean(x)?;
        Ok(raw.clamp(-self.gamma_clip, self.gamma_clip))
    }

    /// Debug switch forcing `gamma == 0` everywhere, which reduces this
    /// model to the scaled method exactly.
    pub fn force_zero_tilt(mut self, on: bool) -> Self {
        self.zero_tilt = on;
        self
    }

    /// The scaled-method model sharing this model's location and scale fits.
    pub fn as_scaled(&self) -> ScaledModel {
        ScaledModel {
            mu: Arc::clone(&self.mu),
            sigma: Arc::clone(&self.sigma),
            sigma_floor: self.sigma_floor,
        }
    }

    pub fn mu_forest(&self) -> &ForestModel {
        &self.mu
    }

    pub fn sigma_forest(&self) -> &ForestModel {
        &self.sigma
    }

    pub fn gamma_forest(&self) -> &ForestModel {
        &self.gamma
    }

    pub fn sigma_floor(&self) -> f64 {
        self.sigma_floor
    }

    pub fn gamma_clip(&self) -> f64 {
        self.gamma_clip
    }
}

impl IntervalModel for SkewModel {
    fn method(&self) -> Method {
        Method::Skew
    }

    fn n_features(&self) -> usize {
        self.mu.n_features()
    }

    fn score(&self, x: ArrayView1<'_, f64>, y: f64) -> Result<f64, ConformalError> {
        let mu = self.location(x)?;
        let sigma = self.scale(x)?;
        let gamma = self.tilt(x)?;
        Ok(skew_gauge(mu, sigma, gamma, y))
    }

    fn interval(
        &self,
        x: ArrayView1<'_, f64>,
        threshold: &ConformalThreshold,
    ) -> Result<PredictionInterval, ConformalError> {
        if threshold.r_hat < 0.0 {
            return Err(ConformalError::NegativeThreshold {
                r_hat: threshold.r_hat,
                method: Method::Skew,
            });
        }
        let mu = self.location(x)?;
        let sigma = self.scale(x)?;
        let gamma = self.tilt(x)?;
        let (lo, hi) = skew_interval(mu, sigma, gamma, threshold.r_hat);
        Ok(PredictionInterval {
            lo,
            hi,
            method: Method::Skew,
            center: Some(mu),
        })
    }
}

/// Location/scale model producing symmetric intervals `mu ± r*sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledModel {
    mu: Arc<ForestModel>,
    sigma: Arc<ForestModel>,
    sigma_floor: f64,
}

/// Fits the location and scale forests only — the first two steps of
/// [`fit_skew`], with the same derived seeds, so the fits coincide with the
/// skew method's when given the same parameters.
pub fn fit_scaled(train: &Dataset, params: &ForestParams) -> Result<ScaledModel, ConformalError> {
    let (mu, sigma, _) = fit_location_scale(train, params)?;
    Ok(ScaledModel {
        mu,
        sigma,
        sigma_floor: sigma_floor_for(train),
    })
}

impl ScaledModel {
    pub fn location(&self, x: ArrayView1<'_, f64>) -> Result<f64, ConformalError> {
        Ok(self.mu.predict_mean(x)?)
    }

    pub fn scale(&self, x: ArrayView1<'_, f64>) -> Result<f64, ConformalError> {
        Ok(self.sigma.predict_mean(x)?.max(self.sigma_floor))
    }

    pub fn mu_forest(&self) -> &ForestModel {
        &self.mu
    }

    pub fn sigma_forest(&self) -> &ForestModel {
        &self.sigma
    }

    pub fn sigma_floor(&self) -> f64 {
        self.sigma_floor
    }
}

impl IntervalModel for ScaledModel {
    fn method(&self) -> Method {
        Method::Scaled
    }

    fn n_features(&self) -> usize {
        self.mu.n_features()
    }

    fn score(&self, x: ArrayView1<'_, f64>, y: f64) -> Result<f64, ConformalError> {
        Ok(scaled_score(self.location(x)?, self.scale(x)?, y))
    }

    fn interval(
        &self,
        x: ArrayView1<'_, f64>,
        threshold: &ConformalThreshold,
    ) -> Result<PredictionInterval, ConformalError> {
        if threshold.r_hat < 0.0 {
            return Err(ConformalError::NegativeThreshold {
                r_hat: threshold.r_hat,
                method: Method::Scaled,
            });
        }
        let mu = self.location(x)?;
        let sigma = self.scale(x)?;
        let (lo, hi) = scaled_interval(mu, sigma, threshold.r_hat);
        Ok(PredictionInterval {
            lo,
            hi,
            method: Method::Scaled,
            center: Some(mu),
        })
    }
}

/// Quantile-band model producing intervals `[q_lo - r, q_hi + r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CqrModel {
    qforest: Arc<ForestModel>,
    lo_level: f64,
    hi_level: f64,
}

/// Fits one quantile-mode forest; the band levels are fixed to `alpha/2`
/// and `1 - alpha/2`.
pub fn fit_cqr(
    train: &Dataset,
    params: &ForestParams,
    alpha: f64,
) -> Result<CqrModel, ConformalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ConformalError::BadAlpha { alpha });
    }
    let qforest = fit_forest(
        train,
        with_seed(params, QUANTILE_STREAM),
        ForestMode::Quantile,
    )?;
    Ok(CqrModel {
        qforest: Arc::new(qforest),
        lo_level: alpha / 2.0,
        hi_level: 1.0 - alpha / 2.0,
    })
}

impl CqrModel {
    /// The same fitted forest re-targeted at another level's band; the
    /// expensive fit is shared, only the levels change.
    pub fn with_alpha(&self, alpha: f64) -> Result<CqrModel, ConformalError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ConformalError::BadAlpha { alpha });
        }
        Ok(CqrModel {
            qforest: Arc::clone(&self.qforest),
            lo_level: alpha / 2.0,
            hi_level: 1.0 - alpha / 2.0,
        })
    }

    /// The uncalibrated quantile band `(q_lo(x), q_hi(x))`.
    pub fn band(&self, x: ArrayView1<'_, f64>) -> Result<(f64, f64), ConformalError> {
        Ok(self
            .qforest
            .predict_quantile_pair(x, self.lo_level, self.hi_level)?)
    }

    pub fn qforest(&self) -> &ForestModel {
        &self.qforest
    }

    pub fn shares_forest_with(&self, other: &CqrModel) -> bool {
        Arc::ptr_eq(&self.qforest, &other.qforest)
    }

    pub fn lo_level(&self) -> f64 {
        self.lo_level
    }

    pub fn hi_level(&self) -> f64 {
        self.hi_level
    }
}

impl IntervalModel for CqrModel {
    fn method(&self) -> Method {
        Method::Cqr
    }

    fn n_features(&self) -> usize {
        self.qforest.n_features()
    }

    fn score(&self, x: ArrayView1<'_, f64>, y: f64) -> Result<f64, ConformalError> {
        let (q_lo, q_hi) = self.band(x)?;
        cqr_score(q_lo, q_hi, y)
    }

    fn interval(
        &self,
        x: ArrayView1<'_, f64>,
        threshold: &ConformalThreshold,
    ) -> Result<PredictionInterval, ConformalError> {
        let (q_lo, q_hi) = self.band(x)?;
        let (lo, hi) = cqr_interval(q_lo, q_hi, threshold.r_hat);
        Ok(PredictionInterval {
            lo,
            hi,
            method: Method::Cqr,
            center: None,
        })
    }
}

/// Scores every calibration row with the model's own score and returns the
/// calibrated threshold at level `alpha`.
pub fn calibrate<M: IntervalModel + ?Sized>(
    model: &M,
    calib: &Dataset,
    alpha: f64,
) -> Result<ConformalThreshold, ConformalError> {
    let mut scores = Vec::with_capacity(calib.n_rows());
    for i in 0..calib.n_rows() {
        scores.push(model.score(calib.feature_row(i), calib.response()[i])?);
    }
    calibrate_threshold(&scores, alpha)
}

/// Builds the model's interval at `x` for a calibrated threshold. The
/// threshold must come from the same method at the same level.
pub fn predict_interval<M: IntervalModel + ?Sized>(
    model: &M,
    threshold: &ConformalThreshold,
    x: ArrayView1<'_, f64>,
) -> Result<PredictionInterval, ConformalError> {
    model.interval(x, threshold)
}
