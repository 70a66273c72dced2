//! `P(A > Lambda)` in the Loewner order and the eigenvalue and inverse-matrix
//! distribution functions derived from it.
//!
//! With `c = theta tr(Sigma^{-1} Lambda)`, `rho_k = p nu/2 - k` and
//! `m = (nu - p - 1)/2` a positive integer,
//!
//! ```text
//! P(A > Lambda) = Gamma(p(nu+1)/2) / Gamma((2q + p(nu+1) - 2)/2)
//!     * sum_{k <= pm} b_k c^{rho_k} / k! * sum*_{kappa |- k, k_1 <= m} C_kappa(theta Sigma^{-1} Lambda)
//! ```
//!
//! where `b_k c^{rho_k} = e^{-c/2} / Gamma(rho_k) * int_0^inf x^{rho_k - 1} (c+x)^xi e^{-x/2} W(c+x) dx`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::KWDist;
use crate::error::{Error, Result};
use crate::matops::{product_eigenvalues, SpdMatrix};
use crate::specfun::{ln_gamma, meijer_integral, QuadratureConfig, WhittakerIndex};
use crate::sum::CompensatedSum;
use crate::zonal::table;

/// A probability as computed and as reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    /// Series value before any clamping; may stray outside `[0, 1]` by
    /// quadrature and rounding error.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
}

impl Probability {
    fn new(raw: f64) -> Self {
        Self {
            raw,
            value: raw.clamp(0.0, 1.0),
        }
    }

    fn complement(self) -> Self {
        Self::new(1.0 - self.raw)
    }
}

type Key = [u64; 5];
type Slot = Arc<OnceLock<std::result::Result<f64, Error>>>;

/// `int_0^inf x^{rho-1} (c+x)^xi e^{-x/2} W(c+x) dx`, computed once per
/// distinct argument set.
fn coefficient_integral(c: f64, rho: f64, xi: f64, idx: WhittakerIndex) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Slot>>> = OnceLock::new();
    let key = [c.to_bits(), rho.to_bits(), xi.to_bits(), idx.alpha.to_bits(), idx.beta.to_bits()];
    let slot = {
        let mut map = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    };
    slot.get_or_init(|| meijer_integral(c, rho, -xi, idx, &QuadratureConfig::default()))
        .clone()
}

fn check_lambda(lambda: &SpdMatrix, dist: &KWDist) -> Result<()> {
    if lambda.dim() != dist.p {
        return Err(Error::DimensionMismatch {
            expected: dist.p,
            found: lambda.dim(),
        });
    }
    Ok(())
}

/// Sum over partitions of `k` with at most `p` parts and `k_1 <= m` of
/// `C_kappa` at `eigs`.
fn restricted_zonal_sum(k: usize, m: usize, eigs: &[f64]) -> Result<f64> {
    let t = table(k, eigs.len())?;
    let values = t.evaluate_all(eigs)?;
    Ok(t.partitions()
        .iter()
        .zip(values)
        .filter(|(kappa, _)| kappa.part(0) as usize <= m)
        .map(|(_, v)| v)
        .collect::<CompensatedSum>()
        .value())
}

/// `P(A > Lambda)`. Needs `s = 1` and `m = (nu-p-1)/2` a positive integer.
pub fn prob_greater(lambda: &SpdMatrix, dist: &KWDist) -> Result<Probability> {
    dist.require_s1("the matrix cdf")?;
    let m = dist.khatri_m()?;
    check_lambda(lambda, dist)?;
    let p = dist.p as f64;
    let nu = dist.nu as f64;
    let theta = dist.params.theta;
    let q = dist.params.q;
    let sigma_inv = dist.sigma.inverse()?;
    // eigenvalues of theta Sigma^{-1} Lambda
    let eigs: Vec<f64> = product_eigenvalues(lambda.matrix(), &sigma_inv)?
        .into_iter()
        .map(|l| theta * l)
        .collect();
    let c: f64 = eigs.iter().sum();
    let idx = dist.whittaker_index();
    let xi = dist.xi();
    let ln_front = ln_gamma(p * (nu + 1.0) / 2.0) - ln_gamma((2.0 * q + p * (nu + 1.0) - 2.0) / 2.0) - c / 2.0;

    let mut total = CompensatedSum::new();
    let mut ln_factorial = 0.0;
    for k in 0..=dist.p * m {
        if k > 0 {
            ln_factorial += (k as f64).ln();
        }
        let rho = p * nu / 2.0 - k as f64;
        let zonal_sum = restricted_zonal_sum(k, m, &eigs)?;
        if zonal_sum == 0.0 {
            continue;
        }
        let integral = coefficient_integral(c, rho, xi, idx)?;
        total.add((ln_front - ln_gamma(rho) - ln_factorial).exp() * integral * zonal_sum);
    }
    Ok(Probability::new(total.value()))
}

/// `etr(-Sigma^{-1} Lambda / 2) sum_{k <= pm} sum*_kappa C_kappa(Sigma^{-1} Lambda / 2) / k!`,
/// the `q = 1, theta = 1/2` value of [`prob_greater`], assembled without any
/// Whittaker or Meijer quadrature.
pub fn prob_greater_khatri(lambda: &SpdMatrix, sigma: &SpdMatrix, nu: usize) -> Result<f64> {
    let p = sigma.dim();
    let twice = nu as i64 - p as i64 - 1;
    if twice < 2 || twice % 2 != 0 {
        return Err(Error::Precondition(format!(
            "m = (nu - p - 1)/2 must be a positive integer, got nu={nu}, p={p}"
        )));
    }
    let m = twice as usize / 2;
    let eigs: Vec<f64> = product_eigenvalues(lambda.matrix(), &sigma.inverse()?)?
        .into_iter()
        .map(|l| 0.5 * l)
        .collect();
    let c: f64 = eigs.iter().sum();
    let mut total = CompensatedSum::new();
    let mut factorial = 1.0;
    for k in 0..=p * m {
        if k > 0 {
            factorial *= k as f64;
        }
        total.add(restricted_zonal_sum(k, m, &eigs)? / factorial);
    }
    Ok((-c).exp() * total.value())
}

/// `P(omega_p > x)` for the smallest eigenvalue `omega_p` of `A`; equal to
/// `P(A > x I)`.
pub fn smallest_eig_survival(x: f64, dist: &KWDist) -> Result<Probability> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("eigenvalue threshold must be positive, got {x}")));
    }
    let lambda = SpdMatrix::new(DMatrix::identity(dist.p, dist.p) * x)?;
    prob_greater(&lambda, dist)
}

pub fn smallest_eig_cdf(x: f64, dist: &KWDist) -> Result<Probability> {
    Ok(smallest_eig_survival(x, dist)?.complement())
}

/// `P(eta_1 <= y)` for the largest eigenvalue `eta_1` of `A^{-1}`.
pub fn largest_eig_inv_cdf(y: f64, dist: &KWDist) -> Result<Probability> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("eigenvalue threshold must be positive, got {y}")));
    }
    smallest_eig_survival(1.0 / y, dist)
}

/// `P(A^{-1} < Omega) = P(A > Omega^{-1})`.
pub fn inv_cdf_matrix(omega: &SpdMatrix, dist: &KWDist) -> Result<Probability> {
    prob_greater(&omega.inverse()?, dist)
}
