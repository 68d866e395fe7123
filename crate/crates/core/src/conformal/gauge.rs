//! Score and interval formulas: scaled residual, tilted gauge, quantile-band
//! score, the arcsinh training target, and the arm/scale-tilt bijection.

use super::ConformalError;

/// Scaled absolute residual `|y - mu_x| / sigma_x`. The scale must already
/// be floored to a positive value.
pub fn scaled_score(mu_x: f64, sigma_x: f64, y: f64) -> f64 {
    debug_assert!(sigma_x > 0.0);
    (y - mu_x).abs() / sigma_x
}

/// Tilted nonconformity gauge
/// `max{ (mu_x - y)+ / (sigma_x e^{-gamma_x}), (y - mu_x)+ / (sigma_x e^{gamma_x}) }`:
/// the smallest `r` whose tilted interval [`skew_interval`] contains `y`.
/// At `gamma_x = 0` it equals [`scaled_score`] bit for bit.
pub fn skew_gauge(mu_x: f64, sigma_x: f64, gamma_x: f64, y: f64) -> f64 {
    debug_assert!(sigma_x > 0.0);
    let below = (mu_x - y).max(0.0) / (sigma_x * (-gamma_x).exp());
    let above = (y - mu_x).max(0.0) / (sigma_x * gamma_x.exp());
    below.max(above)
}

/// Quantile-band score `max(q_lo - y, y - q_hi)`; negative when `y` lies
/// strictly inside the band.
pub fn cqr_score(q_lo: f64, q_hi: f64, y: f64) -> Result<f64, ConformalError> {
    if q_lo > q_hi {
        return Err(ConformalError::CrossedBand { q_lo, q_hi });
    }
    Ok((q_lo - y).max(y - q_hi))
}

/// Training target for the tilt regression: `arcsinh(z / 2)`, an odd,
/// slowly growing transform of the standardized signed residual.
pub fn arcsinh_target(z: f64) -> f64 {
    (z / 2.0).asinh()
}

/// Converts per-arm scales `(a, b)` to `(sigma, gamma)` with
/// `sigma = sqrt(a*b)` and `gamma = log(b/a) / 2`.
pub fn arms_to_scale_tilt(a: f64, b: f64) -> Result<(f64, f64), ConformalError> {
    if !(a > 0.0) {
        return Err(ConformalError::NonPositiveScale { value: a });
    }
    if !(b > 0.0) {
        return Err(ConformalError::NonPositiveScale { value: b });
    }
    Ok(((a * b).sqrt(), 0.5 * (b / a).ln()))
}

/// Inverse of [`arms_to_scale_tilt`]: `a = sigma e^{-gamma}`,
/// `b = sigma e^{gamma}`.
pub fn scale_tilt_to_arms(sigma: f64, gamma: f64) -> Result<(f64, f64), ConformalError> {
    if !(sigma > 0.0) {
        return Err(ConformalError::NonPositiveScale { value: sigma });
    }
    Ok((sigma * (-gamma).exp(), sigma * gamma.exp()))
}

/// Endpoints `[mu - r*sigma*e^{-gamma}, mu + r*sigma*e^{gamma}]`.
pub fn skew_interval(mu_x: f64, sigma_x: f64, gamma_x: f64, r_hat: f64) -> (f64, f64) {
    (
        mu_x - r_hat * sigma_x * (-gamma_x).exp(),
        mu_x + r_hat * sigma_x * gamma_x.exp(),
    )
}

/// Endpoints `mu ± r*sigma`.
pub fn scaled_interval(mu_x: f64, sigma_x: f64, r_hat: f64) -> (f64, f64) {
    (mu_x - r_hat * sigma_x, mu_x + r_hat * sigma_x)
}

/// Endpoints `[q_lo - r, q_hi + r]`. A strongly negative `r_hat` would cross
/// the endpoints; the interval then collapses to the band midpoint, keeping
/// the family nested in `r_hat`.
pub fn cqr_interval(q_lo: f64, q_hi: f64, r_hat: f64) -> (f64, f64) {
    let lo = q_lo - r_hat;
    let hi = q_hi + r_hat;
    if lo > hi {
        let mid = 0.5 * (q_lo + q_hi);
        (mid, mid)
    } else {
        (lo, hi)
    }
}
