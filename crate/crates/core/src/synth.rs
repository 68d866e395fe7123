//! Synthetic regression data with known conditional location, scale, and
//! noise shape.
//!
//! A [`SynthSpec`] names a mean function, a scale function, a standardized
//! noise distribution, a dimension, a size, and a seed. Features are drawn
//! uniformly on `[0,1)^d`; responses follow
//! `Y = mean_fn(X) + scale_fn(X) * E` with `E` IID standardized noise
//! (mean 0, variance 1), so `scale_fn` is the exact conditional standard
//! deviation and [`true_quantile`] gives exact conditional quantiles. All
//! functions of `X` depend on the coordinate average `x_bar`, keeping the
//! closed forms dimension-independent.
//!
//! Mean functions: `linear` is `3*x_bar`, `sine` is `2*sin(2*pi*x_bar)`,
//! `step` jumps from 0 to 2 at `x_bar = 0.5`. Scale functions: `constant:c`
//! is the constant `c` (plain `constant` means 1), `linear` is
//! `0.5 + x_bar`, `bump` is a Gaussian bump `0.5 + 1.5*exp(-((x_bar-0.5)/0.15)^2/2)`.
//! Noise: `gaussian`, `uniform`, `lognormal_std` (log-scale 0.75),
//! `exp_std` (unit exponential minus one), and the sign-flipped
//! `mirror_lognormal_std` / `mirror_exp_std`; the skewed families are
//! standardized with their analytic mean and standard deviation.
//!
//! Sampling is hand-rolled on a ChaCha8 stream (Box-Muller for normals,
//! inversion elsewhere), so generated data depends only on the seed and not
//! on any external sampler's internals.

use ndarray::{Array2, ArrayView1};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::data::Dataset;

/// Log-scale of the skewed lognormal noise family.
const LOGNORMAL_SHAPE: f64 = 0.75;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {reason}")]
    BadSpec { reason: String },
    #[error("quantile level {level} is outside (0, 1)")]
    BadLevel { level: f64 },
    #[error("feature row has {got} coordinates but the spec has d = {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("unknown {kind} id {id:?}")]
    UnknownId { kind: &'static str, id: String },
}

/// Conditional mean as a function of the coordinate average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanFn {
    Linear,
    Sine,
    Step,
}

impl MeanFn {
    pub fn value(self, x_bar: f64) -> f64 {
        match self {
            MeanFn::Linear => 3.0 * x_bar,
            MeanFn::Sine => 2.0 * (2.0 * std::f64::consts::PI * x_bar).sin(),
            MeanFn::Step => {
                if x_bar < 0.5 {
                    0.0
                } else {
                    2.0
                }
            }
        }
    }
}

impl FromStr for MeanFn {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "linear" => Ok(MeanFn::Linear),
            "sine" => Ok(MeanFn::Sine),
            "step" => Ok(MeanFn::Step),
            other => Err(SynthError::UnknownId {
                kind: "mean function",
                id: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for MeanFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = match self {
            MeanFn::Linear => "linear",
            MeanFn::Sine => "sine",
            MeanFn::Step => "step",
        };
        write!(f, "{id}")
    }
}

/// Conditional standard deviation as a function of the coordinate average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleFn {
    /// Constant scale; zero is allowed and produces noise-free responses.
    Constant(f64),
    Linear,
    Bump,
}

impl ScaleFn {
    pub fn value(self, x_bar: f64) -> f64 {
        match self {
            ScaleFn::Constant(c) => c,
            ScaleFn::Linear => 0.5 + x_bar,
            ScaleFn::Bump => {
                let t = (x_bar - 0.5) / 0.15;
                0.5 + 1.5 * (-0.5 * t * t).exp()
            }
        }
    }
}

impl FromStr for ScaleFn {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        if s == "constant" {
            return Ok(ScaleFn::Constant(1.0));
        }
        if let Some(value) = s.strip_prefix("constant:") {
            let c: f64 = value.parse().map_err(|_| SynthError::UnknownId {
                kind: "scale function",
                id: s.to_string(),
            })?;
            if !(c.is_finite() && c >= 0.0) {
                return Err(SynthError::UnknownId {
                    kind: "scale function",
                    id: s.to_string(),
                });
            }
            return Ok(ScaleFn::Constant(c));
        }
        match s {
            "linear" => Ok(ScaleFn::Linear),
            "bump" => Ok(ScaleFn::Bump),
            other => Err(SynthError::UnknownId {
                kind: "scale function",
                id: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for ScaleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleFn::Constant(c) => write!(f, "constant:{c}"),
            ScaleFn::Linear => write!(f, "linear"),
            ScaleFn::Bump => write!(f, "bump"),
        }
    }
}

/// Standardized noise distribution (mean 0, variance 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    Gaussian,
    /// Uniform on `(-sqrt(3), sqrt(3))`.
    Uniform,
    /// Right-skewed: lognormal with log-scale 0.75, shifted and scaled to
    /// mean 0 and variance 1.
    LognormalStd,
    /// Right-skewed: unit exponential minus one.
    ExpStd,
    /// Left-skewed: negated `lognormal_std`.
    MirrorLognormalStd,
    /// Left-skewed: negated `exp_std`.
    MirrorExpStd,
}

impl Noise {
    /// Mean of the raw lognormal before standardization.
    pub(crate) fn lognormal_mean() -> f64 {
        (0.5 * LOGNORMAL_SHAPE * LOGNORMAL_SHAPE).exp()
    }

    /// Standard deviation of the raw lognormal before standardization.
    pub(crate) fn lognormal_sd() -> f64 {
        let s2 = LOGNORMAL_SHAPE * LOGNORMAL_SHAPE;
        (s2.exp_m1() * s2.exp()).sqrt()
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Noise::Gaussian => standard_normal(rng),
            Noise::Uniform => (2.0 * unit_uniform(rng) - 1.0) * 3.0f64.sqrt(),
            Noise::LognormalStd => {
                let raw = (LOGNORMAL_SHAPE * standard_normal(rng)).exp();
                (raw - Self::lognormal_mean()) / Self::lognormal_sd()
            }
            Noise::ExpStd => -positive_uniform(rng).ln() - 1.0,
            Noise::MirrorLognormalStd => -Noise::LognormalStd.draw(rng),
            Noise::MirrorExpStd => -Noise::ExpStd.draw(rng),
        }
    }

    /// Analytic quantile function of the standardized noise.
    pub fn quantile(self, level: f64) -> Result<f64, SynthError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(SynthError::BadLevel { level });
        }
        let value = match self {
            Noise::Gaussian => standard_normal_quantile(level),
            Noise::Uniform => 3.0f64.sqrt() * (2.0 * level - 1.0),
            Noise::LognormalStd => {
                let z = standard_normal_quantile(level);
                ((LOGNORMAL_SHAPE * z).exp() - Self::lognormal_mean()) / Self::lognormal_sd()
            }
            Noise::ExpStd => -(-level).ln_1p() - 1.0,
            Noise::MirrorLognormalStd => -Noise::LognormalStd.quantile(1.0 - level)?,
            Noise::MirrorExpStd => -Noise::ExpStd.quantile(1.0 - level)?,
        };
        Ok(value)
    }
}

impl FromStr for Noise {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "gaussian" => Ok(Noise::Gaussian),
            "uniform" => Ok(Noise::Uniform),
            "lognormal_std" => Ok(Noise::LognormalStd),
            "exp_std" => Ok(Noise::ExpStd),
            "mirror_lognormal_std" => Ok(Noise::MirrorLognormalStd),
            "mirror_exp_std" => Ok(Noise::MirrorExpStd),
            other => Err(SynthError::UnknownId {
                kind: "noise distribution",
                id: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Noise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = match self {
            Noise::Gaussian => "gaussian",
            Noise::Uniform => "uniform",
            Noise::LognormalStd => "lognormal_std",
            Noise::ExpStd => "exp_std",
            Noise::MirrorLognormalStd => "mirror_lognormal_std",
            Noise::MirrorExpStd => "mirror_exp_std",
        };
        write!(f, "{id}")
    }
}

/// Full description of one synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub mean_fn: MeanFn,
    pub scale_fn: ScaleFn,
    pub noise: Noise,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
}

fn x_bar(x: ArrayView1<'_, f64>) -> f64 {
    x.sum() / x.len() as f64
}

/// Uniform draw from `[0, 1)` with 53 random bits.
fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw from `(0, 1]`, safe to pass to `ln`.
fn positive_uniform(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - unit_uniform(rng)
}

/// One standard normal draw via Box-Muller.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = positive_uniform(rng);
    let u2 = unit_uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn standard_normal_quantile(level: f64) -> f64 {
    statrs::distribution::Normal::standard().inverse_cdf(level)
}

/// Generates the dataset described by `spec`; identical specs produce
/// bit-identical datasets. Feature columns are named `x1..xd`.
pub fn generate(spec: &SynthSpec) -> Result<Dataset, SynthError> {
    if spec.d == 0 {
        return Err(SynthError::BadSpec {
            reason: "d must be at least 1".to_string(),
        });
    }
    if spec.n == 0 {
        return Err(SynthError::BadSpec {
            reason: "n must be at least 1".to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut features = Array2::<f64>::zeros((spec.n, spec.d));
    let mut response = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let mut coord_sum = 0.0;
        for j in 0..spec.d {
            let u = unit_uniform(&mut rng);
            features[(i, j)] = u;
            coord_sum += u;
        }
        let xb = coord_sum / spec.d as f64;
        let e = spec.noise.draw(&mut rng);
        response.push(spec.mean_fn.value(xb) + spec.scale_fn.value(xb) * e);
    }
    let names = (1..=spec.d).map(|j| format!("x{j}")).collect();
    Ok(Dataset::new(features, response, names).expect("synthetic values are finite"))
}

/// Exact conditional mean of `Y` given the feature row.
pub fn true_mean(spec: &SynthSpec, x: ArrayView1<'_, f64>) -> Result<f64, SynthError> {
    if x.len() != spec.d {
        return Err(SynthError::DimensionMismatch {
            got: x.len(),
            expected: spec.d,
        });
    }
    Ok(spec.mean_fn.value(x_bar(x)))
}

/// Exact conditional `level`-quantile of `Y` given the feature row.
pub fn true_quantile(
    spec: &SynthSpec,
    x: ArrayView1<'_, f64>,
    level: f64,
) -> Result<f64, SynthError> {
    if x.len() != spec.d {
        return Err(SynthError::DimensionMismatch {
            got: x.len(),
            expected: spec.d,
        });
    }
    let xb = x_bar(x);
    Ok(spec.mean_fn.value(xb) + spec.scale_fn.value(xb) * spec.noise.quantile(level)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn spec(noise: Noise, n: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            mean_fn: MeanFn::Linear,
            scale_fn: ScaleFn::Constant(1.0),
            noise,
            d: 2,
            n,
            seed,
        }
    }

    fn noise_sample(noise: Noise, n: usize, seed: u64) -> Vec<f64> {
        // Mean zero, scale one, so the response equals mean_fn + raw noise.
        let s = SynthSpec {
            mean_fn: MeanFn::Linear,
            scale_fn: ScaleFn::Constant(1.0),
            noise,
            d: 1,
            n,
            seed,
        };
        let data = generate(&s).unwrap();
        (0..n)
            .map(|i| data.response()[i] - MeanFn::Linear.value(data.features()[(i, 0)]))
            .collect()
    }

    fn mean_and_var(sample: &[f64]) -> (f64, f64) {
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let var = sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (mean, var)
    }

    #[test]
    fn mean_functions_match_their_formulas() {
        assert_eq!(MeanFn::Linear.value(0.5), 1.5);
        assert_abs_diff_eq!(MeanFn::Sine.value(0.25), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(MeanFn::Sine.value(0.75), -2.0, epsilon = 1e-12);
        assert_eq!(MeanFn::Step.value(0.49), 0.0);
        assert_eq!(MeanFn::Step.value(0.5), 2.0);
    }

    #[test]
    fn scale_functions_match_their_formulas() {
        assert_eq!(ScaleFn::Constant(0.25).value(0.9), 0.25);
        assert_eq!(ScaleFn::Linear.value(0.25), 0.75);
        assert_eq!(ScaleFn::Bump.value(0.5), 2.0);
        assert!(ScaleFn::Bump.value(0.0) < 0.51);
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate(&spec(Noise::Gaussian, 100, 7)).unwrap();
        let b = generate(&spec(Noise::Gaussian, 100, 7)).unwrap();
        let c = generate(&spec(Noise::Gaussian, 100, 8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn features_live_in_the_unit_cube() {
        let data = generate(&spec(Noise::Uniform, 500, 3)).unwrap();
        for v in data.features() {
            assert!(*v >= 0.0 && *v < 1.0);
        }
    }

    #[test]
    fn zero_scale_produces_exact_mean_responses() {
        let s = SynthSpec {
            mean_fn: MeanFn::Sine,
            scale_fn: ScaleFn::Constant(0.0),
            noise: Noise::LognormalStd,
            d: 3,
            n: 200,
            seed: 5,
        };
        let data = generate(&s).unwrap();
        for i in 0..s.n {
            let expected = true_mean(&s, data.feature_row(i)).unwrap();
            assert_eq!(data.response()[i], expected);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(
            generate(&SynthSpec { d: 0, ..spec(Noise::Gaussian, 10, 0) }),
            Err(SynthError::BadSpec { .. })
        ));
        assert!(matches!(
            generate(&SynthSpec { n: 0, ..spec(Noise::Gaussian, 10, 0) }),
            Err(SynthError::BadSpec { .. })
        ));
    }

    #[test]
    fn lognormal_standardization_constants_are_exact() {
        // Independently computed: for log-scale s, the raw lognormal has
        // mean e^{s^2/2} and variance (e^{s^2}-1)e^{s^2}; at s = 0.75 these
        // give the frozen decimals below.
        assert_abs_diff_eq!(
            Noise::lognormal_mean(),
            1.3247847587288656,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(Noise::lognormal_sd(), 1.1511568928507238, epsilon = 1e-12);
    }

    #[test]
    fn every_noise_family_is_standardized() {
        for noise in [
            Noise::Gaussian,
            Noise::Uniform,
            Noise::LognormalStd,
            Noise::ExpStd,
            Noise::MirrorLognormalStd,
            Noise::MirrorExpStd,
        ] {
            let sample = noise_sample(noise, 100_000, 42);
            let (mean, var) = mean_and_var(&sample);
            assert!(mean.abs() < 0.02, "{noise}: sample mean {mean}");
            assert!((var - 1.0).abs() < 0.05, "{noise}: sample variance {var}");
        }
    }

    #[test]
    fn skewness_signs_match_the_families() {
        let skewness = |sample: &[f64]| {
            let (mean, var) = mean_and_var(sample);
            let n = sample.len() as f64;
            let m3 = sample.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
            m3 / var.powf(1.5)
        };
        for noise in [Noise::Gaussian, Noise::Uniform] {
            let g = skewness(&noise_sample(noise, 100_000, 9));
            assert!(g.abs() < 0.05, "{noise}: skewness {g}");
        }
        for noise in [Noise::LognormalStd, Noise::ExpStd] {
            let g = skewness(&noise_sample(noise, 100_000, 9));
            assert!(g > 0.5, "{noise}: skewness {g}");
        }
        for noise in [Noise::MirrorLognormalStd, Noise::MirrorExpStd] {
            let g = skewness(&noise_sample(noise, 100_000, 9));
            assert!(g < -0.5, "{noise}: skewness {g}");
        }
    }

    #[test]
    fn quantiles_match_hand_computed_values() {
        assert_abs_diff_eq!(
            Noise::Uniform.quantile(0.95).unwrap(),
            1.5588457268119896,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(Noise::Gaussian.quantile(0.5).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            Noise::ExpStd.quantile(0.9).unwrap(),
            1.3025850929940457,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            Noise::LognormalStd.quantile(0.9).unwrap(),
            1.1205706671137488,
            epsilon = 1e-9
        );
    }

    #[test]
    fn symmetric_noise_quantiles_mirror_around_zero() {
        for noise in [Noise::Gaussian, Noise::Uniform] {
            for level in [0.05, 0.2, 0.41] {
                let lo = noise.quantile(level).unwrap();
                let hi = noise.quantile(1.0 - level).unwrap();
                assert_abs_diff_eq!(lo + hi, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn mirrored_quantiles_negate_and_flip_the_level() {
        for level in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(
                Noise::MirrorExpStd.quantile(level).unwrap(),
                -Noise::ExpStd.quantile(1.0 - level).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn draws_and_quantiles_agree_through_the_empirical_cdf() {
        for noise in [
            Noise::Gaussian,
            Noise::Uniform,
            Noise::LognormalStd,
            Noise::ExpStd,
            Noise::MirrorLognormalStd,
            Noise::MirrorExpStd,
        ] {
            let sample = noise_sample(noise, 100_000, 17);
            for level in [0.1, 0.5, 0.9] {
                let q = noise.quantile(level).unwrap();
                let below = sample.iter().filter(|v| **v <= q).count() as f64;
                let fraction = below / sample.len() as f64;
                assert!(
                    (fraction - level).abs() < 0.006,
                    "{noise}: level {level}, empirical {fraction}"
                );
            }
        }
    }

    #[test]
    fn quantile_levels_must_be_interior() {
        for level in [0.0, 1.0, -1.0, f64::NAN] {
            assert!(matches!(
                Noise::Gaussian.quantile(level),
                Err(SynthError::BadLevel { .. })
            ));
        }
    }

    #[test]
    fn true_quantile_combines_mean_scale_and_noise() {
        let s = SynthSpec {
            mean_fn: MeanFn::Linear,
            scale_fn: ScaleFn::Linear,
            noise: Noise::Uniform,
            d: 1,
            n: 1,
            seed: 0,
        };
        // x_bar = 0.25: mean 0.75, scale 0.75, uniform q(0.95) = 0.9*sqrt(3).
        let x = array![0.25];
        let expected = 0.75 + 0.75 * 0.9 * 3.0f64.sqrt();
        assert_abs_diff_eq!(
            true_quantile(&s, x.view(), 0.95).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert_eq!(true_mean(&s, x.view()).unwrap(), 0.75);
        assert!(matches!(
            true_quantile(&s, array![0.1, 0.2].view(), 0.5),
            Err(SynthError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ids_round_trip_through_strings() {
        for id in ["linear", "sine", "step"] {
            assert_eq!(MeanFn::from_str(id).unwrap().to_string(), id);
        }
        for id in ["linear", "bump", "constant:0.25", "constant:1"] {
            let parsed = ScaleFn::from_str(id).unwrap();
            assert_eq!(ScaleFn::from_str(&parsed.to_string()).unwrap(), parsed);
        }
        assert_eq!(ScaleFn::from_str("constant").unwrap(), ScaleFn::Constant(1.0));
        for id in [
            "gaussian",
            "uniform",
            "lognormal_std",
            "exp_std",
            "mirror_lognormal_std",
            "mirror_exp_std",
        ] {
            assert_eq!(Noise::from_str(id).unwrap().to_string(), id);
        }
        assert!(MeanFn::from_str("cubic").is_err());
        assert!(ScaleFn::from_str("constant:-1").is_err());
        assert!(ScaleFn::from_str("wedge").is_err());
        assert!(Noise::from_str("cauchy").is_err());
    }
}
