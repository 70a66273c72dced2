//! Scalar special functions: the multivariate gamma function, Whittaker's
//! `W` function through its Laplace-type integral representation, and the
//! three Whittaker integral identities used to assemble the Kotz-Wishart
//! density, its eigenvalue cdf coefficients and its moment generating
//! function.

pub mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma as sg;

use crate::error::{domain, Result};
pub use quadrature::{
    integrate, integrate_power_weighted, integrate_semi_infinite, integrate_semi_infinite_scaled, Integral,
    QuadratureConfig,
};

/// Scalar gamma function.
pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// `ln |Gamma(x)|` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// Scalar rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}

fn check_mvgamma(p: usize, a: f64) -> Result<()> {
    if p == 0 {
        return domain("multivariate gamma needs p >= 1");
    }
    if !(a > (p as f64 - 1.0) / 2.0) {
        return domain(format!("multivariate gamma needs a > (p-1)/2, got p={p}, a={a}"));
    }
    Ok(())
}

/// Natural log of the multivariate gamma function `Gamma_p(a)`.
pub fn ln_multivariate_gamma(p: usize, a: f64) -> Result<f64> {
    check_mvgamma(p, a)?;
    let pf = p as f64;
    let mut acc = pf * (pf - 1.0) / 4.0 * PI.ln();
    for i in 0..p {
        acc += ln_gamma(a - i as f64 / 2.0);
    }
    Ok(acc)
}

/// `Gamma_p(a) = pi^{p(p-1)/4} prod_{i=1}^p Gamma(a - (i-1)/2)`.
pub fn multivariate_gamma(p: usize, a: f64) -> Result<f64> {
    check_mvgamma(p, a)?;
    let pf = p as f64;
    let mut acc = PI.powf(pf * (pf - 1.0) / 4.0);
    for i in 0..p {
        acc *= gamma(a - i as f64 / 2.0);
    }
    Ok(acc)
}

/// The index pair `(alpha, beta)` of `W_{alpha, beta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhittakerIndex {
    pub alpha: f64,
    pub beta: f64,
}

impl WhittakerIndex {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// Indices attached to the Kotz generator with shape `q` in dimension `p`:
    /// `alpha = (2q - p)/4`, `beta = (2q + p - 2)/4`.
    pub fn kotz(q: f64, p: usize) -> Self {
        let p = p as f64;
        Self {
            alpha: (2.0 * q - p) / 4.0,
            beta: (2.0 * q + p - 2.0) / 4.0,
        }
    }

    /// True when `alpha + beta = 1/2`, where `W(z) = z^alpha e^{-z/2}`.
    pub fn is_exponential(&self) -> bool {
        (self.alpha + self.beta - 0.5).abs() < 1e-15
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta - self.alpha > -0.5) || !self.alpha.is_finite() || !self.beta.is_finite() {
            return domain(format!(
                "integral representation needs beta - alpha > -1/2, got alpha={}, beta={}",
                self.alpha, self.beta
            ));
        }
        Ok(())
    }
}

/// Whittaker's `W_{alpha,beta}(z)` with the default quadrature settings.
pub fn whittaker_w(idx: WhittakerIndex, z: f64) -> Result<f64> {
    whittaker_w_with(idx, z, &QuadratureConfig::default())
}

/// `W_{k,m}(z) = z^k e^{-z/2} / Gamma(m - k + 1/2) * int_0^inf t^{m-k-1/2} e^{-t} (1 + t/z)^{m+k-1/2} dt`.
pub fn whittaker_w_with(idx: WhittakerIndex, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_whittaker_w_with(idx, z, cfg)?.exp())
}

/// `ln W_{alpha,beta}(z)`; stays finite where `W` itself underflows.
pub fn ln_whittaker_w(idx: WhittakerIndex, z: f64) -> Result<f64> {
    ln_whittaker_w_with(idx, z, &QuadratureConfig::default())
}

pub fn ln_whittaker_w_with(idx: WhittakerIndex, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("Whittaker W needs z > 0, got {z}"));
    }
    idx.validate()?;
    let power = idx.beta - idx.alpha - 0.5;
    let bend = idx.beta + idx.alpha - 0.5;
    let integral = integrate_power_weighted(power, |t| (bend * (t / z).ln_1p() - t).exp(), 1.0, cfg)?;
    Ok(idx.alpha * z.ln() - 0.5 * z - ln_gamma(power + 1.0) + integral.value.ln())
}

/// Closed form of `int_0^inf (b + x)^nu e^{-a x} x^{y-1} dx`:
/// `b^{(y+nu-1)/2} a^{-(y+nu+1)/2} e^{ab/2} Gamma(y) W_{(nu-y+1)/2, (nu+y)/2}(ab)`.
pub fn mellin_whittaker(b: f64, a: f64, nu: f64, y: f64) -> Result<f64> {
    mellin_whittaker_with(b, a, nu, y, &QuadratureConfig::default())
}

pub fn mellin_whittaker_with(b: f64, a: f64, nu: f64, y: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(b > 0.0 && a > 0.0 && y > 0.0) {
        return domain(format!("mellin_whittaker needs b, a, y > 0, got b={b}, a={a}, y={y}"));
    }
    let idx = WhittakerIndex::new((nu - y + 1.0) / 2.0, (nu + y) / 2.0);
    let w = whittaker_w_with(idx, a * b, cfg)?;
    let log_pre = (y + nu - 1.0) / 2.0 * b.ln() - (y + nu + 1.0) / 2.0 * a.ln() + a * b / 2.0 + ln_gamma(y);
    Ok(log_pre.exp() * w)
}

/// `G^{30}_{23}(c | 0, 1-alpha-sigma ; -rho, 1/2+beta-sigma, 1/2-beta-sigma)`,
/// evaluated from the integral it labels:
/// `e^{-c/2} c^{-rho} / Gamma(rho) * int_0^inf x^{rho-1} (c+x)^{-sigma} e^{-x/2} W_{alpha,beta}(c+x) dx`.
pub fn meijer_g3023(c: f64, rho: f64, sigma: f64, idx: WhittakerIndex) -> Result<f64> {
    meijer_g3023_with(c, rho, sigma, idx, &QuadratureConfig::default())
}

pub fn meijer_g3023_with(c: f64, rho: f64, sigma: f64, idx: WhittakerIndex, cfg: &QuadratureConfig) -> Result<f64> {
    let integral = meijer_integral(c, rho, sigma, idx, cfg)?;
    let log_pre = -0.5 * c - rho * c.ln() - ln_gamma(rho);
    Ok(log_pre.exp() * integral)
}

/// The raw integral `int_0^inf x^{rho-1} (c+x)^{-sigma} e^{-x/2} W_{alpha,beta}(c+x) dx`.
pub(crate) fn meijer_integral(c: f64, rho: f64, sigma: f64, idx: WhittakerIndex, cfg: &QuadratureConfig) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return domain(format!("Meijer G needs c > 0, got {c}"));
    }
    if !(rho > 0.0) {
        return domain(format!("Meijer G needs rho > 0, got {rho}"));
    }
    idx.validate()?;
    // W inside the outer integrand is held to a tighter tolerance than the outer rule.
    let inner = cfg.with_rel_tol((cfg.rel_tol * 1e-2).max(1e-14));
    let failure = std::cell::Cell::new(None);
    let integrand = |x: f64| {
        let y = c + x;
        match whittaker_w_with(idx, y, &inner) {
            Ok(w) => (-sigma * y.ln() - 0.5 * x).exp() * w,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let scale = rho.max(1.0);
    let result = integrate_power_weighted(rho - 1.0, integrand, scale, cfg);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(result?.value)
}

/// `int_0^inf e^{-x/2} x^{eps-1} W_{alpha,beta}(x) dx
///   = Gamma(eps + 1/2 - beta) Gamma(eps + 1/2 + beta) / Gamma(eps - alpha + 1)`.
pub fn whittaker_moment(eps: f64, idx: WhittakerIndex) -> Result<f64> {
    if !(eps + 0.5 - idx.beta > 0.0 && eps + 0.5 + idx.beta > 0.0) {
        return domain(format!(
            "whittaker_moment needs eps + 1/2 +- beta > 0, got eps={eps}, beta={}",
            idx.beta
        ));
    }
    let denom_arg = eps - idx.alpha + 1.0;
    let num = ln_gamma(eps + 0.5 - idx.beta) + ln_gamma(eps + 0.5 + idx.beta);
    if denom_arg > 0.0 {
        return Ok((num - ln_gamma(denom_arg)).exp());
    }
    let denom = gamma(denom_arg);
    if !denom.is_finite() {
        // pole of Gamma in the denominator
        return Ok(0.0);
    }
    Ok(num.exp() / denom)
}
