//! Estimating `Sigma^{-1}` by constant multiples `alpha A^{-1}` under the
//! Efron-Morris loss `tr[(Delta - Sigma^{-1})^2 A] / (nu tr Sigma^{-1})`.
//!
//! Since `E A^{-1} = Sigma^{-1}/c_0` and `E A = c_1 Sigma`, the risk of
//! `alpha A^{-1}` is `g(alpha)/nu` with `g(alpha) = alpha^2/c_0 - 2 alpha + c_1`,
//! free of `Sigma` and minimized at `alpha = c_0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kw::{c1, KWDist, KwSampler};
use crate::matops::SpdMatrix;
use crate::mc::{run_parallel, McConfig, Moments};
use crate::specfun::ln_gamma;

/// Samples of `A` whose condition number exceeds this are redrawn.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub alpha: f64,
    pub closed_risk: f64,
    pub mc_risk: f64,
    pub mc_stderr: f64,
    pub n_samples: usize,
    /// Draws discarded for exceeding [`MAX_CONDITION`].
    pub rejected: usize,
}

fn require_n(dist: &KWDist) -> Result<()> {
    if dist.n() <= dist.p() + 2 {
        return Err(Error::Domain(format!(
            "estimator needs n > p + 2, got n={}, p={}",
            dist.n(),
            dist.p()
        )));
    }
    Ok(())
}

/// `c_0 = (n-p-2) Gamma((2q+np-2)/(2s)) / [theta^{1/s} (np-2) Gamma((2q+np-4)/(2s))]`,
/// the multiplier making `c_0 A^{-1}` unbiased for `Sigma^{-1}`.
pub fn unbiased_constant(dist: &KWDist) -> Result<f64> {
    require_n(dist)?;
    let np = (dist.n() * dist.p()) as f64;
    let (q, theta, s) = (dist.params().q, dist.params().theta, dist.params().s);
    let shape = (2.0 * q + np - 4.0) / (2.0 * s);
    if !(shape > 0.0) {
        return Err(Error::Domain(format!("c_0 needs 2q + np > 4, got {}", 2.0 * q + np)));
    }
    let ln = ln_gamma((2.0 * q + np - 2.0) / (2.0 * s)) - ln_gamma(shape) - theta.ln() / s;
    Ok((dist.n() - dist.p() - 2) as f64 / (np - 2.0) * ln.exp())
}

/// `tr[(Delta - Sigma^{-1})^2 A] / (nu tr Sigma^{-1})`. The loss also
/// depends on `nu = n - 1`, which `(Delta, Sigma^{-1}, A)` alone do not fix.
pub fn em_loss(delta: &DMatrix<f64>, sigma_inv: &SpdMatrix, a: &SpdMatrix, nu: f64) -> Result<f64> {
    let p = sigma_inv.dim();
    for found in [delta.nrows(), delta.ncols(), a.dim()] {
        if found != p {
            return Err(Error::DimensionMismatch { expected: p, found });
        }
    }
    let d = delta - sigma_inv.matrix();
    Ok((&d * &d * a.matrix()).trace() / (nu * sigma_inv.trace()))
}

fn g(alpha: f64, c0: f64, c1: f64) -> f64 {
    alpha * alpha / c0 - 2.0 * alpha + c1
}

pub fn risk_closed(alpha: f64, dist: &KWDist) -> Result<f64> {
    let c0 = unbiased_constant(dist)?;
    Ok(g(alpha, c0, c1(dist)?) / dist.nu() as f64)
}

/// Monte Carlo mean of the loss of `alpha A^{-1}`, in parallel over seeded
/// substreams.
pub fn risk_mc(alpha: f64, dist: &KWDist, n_samples: usize, cfg: &McConfig) -> Result<RiskReport> {
    if n_samples < 100 {
        return Err(Error::Domain(format!("risk_mc needs at least 100 samples, got {n_samples}")));
    }
    let closed_risk = risk_closed(alpha, dist)?;
    let sampler = KwSampler::new(dist)?;
    let sigma_inv = dist.sigma().inverse()?;
    let nu = dist.nu() as f64;
    let parts = run_parallel(n_samples, cfg, |rng, count| -> Result<(Moments, usize)> {
        let mut acc = Moments::new(1);
        let mut rejected = 0;
        while acc.count() < count {
            let a = match sampler.sample(rng) {
                Ok(a) => a,
                Err(Error::Precondition(_)) => {
                    rejected += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let eigs = a.eigenvalues();
            if eigs[eigs.len() - 1] / eigs[0] > MAX_CONDITION {
                rejected += 1;
                continue;
            }
            let delta = a.inverse_matrix() * alpha;
            acc.push(&[em_loss(&delta, &sigma_inv, &a, nu)?]);
        }
        Ok((acc, rejected))
    });
    let mut rejected = 0;
    let mut moments = Vec::with_capacity(parts.len());
    for part in parts {
        let (m, r) = part?;
        rejected += r;
        moments.push(m);
    }
    let acc = Moments::merged(moments).expect("at least one worker");
    Ok(RiskReport {
        alpha,
        closed_risk,
        mc_risk: acc.mean()[0],
        mc_stderr: acc.stderr()[0],
        n_samples,
        rejected,
    })
}

/// `c_0`, after checking that `g` rises on both sides of it.
pub fn best_alpha(dist: &KWDist) -> Result<f64> {
    let c0 = unbiased_constant(dist)?;
    let c1 = c1(dist)?;
    let delta = 1e-4 * c0;
    let at = g(c0, c0, c1);
    if !(g(c0 - delta, c0, c1) > at && g(c0 + delta, c0, c1) > at) {
        return Err(Error::Domain(format!("risk is not minimized at c_0 = {c0}")));
    }
    Ok(c0)
}
