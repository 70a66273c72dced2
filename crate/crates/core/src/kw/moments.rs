use nalgebra::DMatrix;

use super::KWDist;
use crate::error::{Error, Result};
use crate::kotz::ln_radial_moment;
use crate::matops::{product_eigenvalues, SpdMatrix};
use crate::specfun::{ln_gamma, ln_multivariate_gamma};
use crate::zonal::{gen_pochhammer, zonal, zonal_series, Partition, SeriesValue};

/// `c_1 = (n-1) theta^{-1/s} Gamma((2q+np)/(2s)) / (np Gamma((2q+np-2)/(2s)))`, so that `E(A) = c_1 Sigma`.
pub fn c1(dist: &KWDist) -> Result<f64> {
    let np = dist.n() * dist.p;
    Ok(dist.nu as f64 * ln_radial_moment(1.0, np, &dist.params)?.exp() / np as f64)
}

pub fn mean(dist: &KWDist) -> Result<SpdMatrix> {
    dist.sigma.scaled(c1(dist)?)
}

/// `E(A^2) = E(R^4)/(np(np+2)) [(n-1)^2 Sigma^2 + (n-1)(Sigma tr Sigma + Sigma^2)]`.
pub fn second_moment(dist: &KWDist) -> Result<DMatrix<f64>> {
    let np = (dist.n() * dist.p) as f64;
    let coeff = ln_radial_moment(2.0, dist.n() * dist.p, &dist.params)?.exp() / (np * (np + 2.0));
    let s = dist.sigma.matrix();
    let s2 = s * s;
    let nu = dist.nu as f64;
    Ok((&s2 * (nu * nu) + (s * s.trace() + &s2) * nu) * coeff)
}

/// `E|A|^t = theta^{-tp/s} Gamma((2q+np+2tp-2)/(2s)) Gamma(np/2) Gamma_p(nu/2+t)
///  / [Gamma((2q+np-2)/(2s)) Gamma((np+2tp)/2) Gamma_p(nu/2)] |Sigma|^t`.
pub fn gen_variance_moment(t: f64, dist: &KWDist) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("generalized variance moment needs t > 0, got {t}")));
    }
    let p = dist.p as f64;
    let np = dist.n() * dist.p;
    let nu = dist.nu as f64;
    let ln = ln_radial_moment(t * p, np, &dist.params)? + ln_gamma(np as f64 / 2.0)
        - ln_gamma((np as f64 + 2.0 * t * p) / 2.0)
        + ln_multivariate_gamma(dist.p, nu / 2.0 + t)?
        - ln_multivariate_gamma(dist.p, nu / 2.0)?
        + t * dist.sigma.ln_det();
    Ok(ln.exp())
}

/// `K(n,p) = theta^{-k} (nu/2)_kappa Gamma(np/2) Gamma((2q+np+2k-2)/2) / [Gamma((2q+np-2)/2) Gamma((np+2k)/2)]`.
pub fn zonal_expectation_factor(kappa: &Partition, dist: &KWDist) -> Result<f64> {
    dist.require_s1("the zonal expectation")?;
    let k = kappa.weight() as f64;
    let np = (dist.n() * dist.p) as f64;
    let q = dist.params.q;
    let ln = -k * dist.params.theta.ln() + ln_gamma(np / 2.0) + ln_gamma((2.0 * q + np + 2.0 * k - 2.0) / 2.0)
        - ln_gamma((2.0 * q + np - 2.0) / 2.0)
        - ln_gamma((np + 2.0 * k) / 2.0);
    Ok(gen_pochhammer(dist.nu as f64 / 2.0, kappa) * ln.exp())
}

/// `E C_kappa(Omega A) = K(n,p) C_kappa(Omega Sigma)`.
pub fn expected_zonal(omega: &DMatrix<f64>, kappa: &Partition, dist: &KWDist) -> Result<f64> {
    let eigs = product_eigenvalues(omega, &dist.sigma)?;
    Ok(zonal_expectation_factor(kappa, dist)? * zonal(kappa, &eigs)?)
}

/// Truncated mgf `E etr(Omega A) = sum_k sum_kappa K(n,p) C_kappa(Omega Sigma) / k!`.
///
/// Fails with [`Error::Divergence`] when the last three degree contributions
/// fail to decrease.
pub fn mgf(omega: &DMatrix<f64>, dist: &KWDist, max_degree: usize) -> Result<SeriesValue> {
    dist.require_s1("the mgf")?;
    if !crate::matops::is_symmetric(omega) {
        return Err(Error::Domain("mgf argument must be symmetric".into()));
    }
    let eigs = product_eigenvalues(omega, &dist.sigma)?;
    zonal_series(&eigs, max_degree, |kappa| zonal_expectation_factor(kappa, dist))?.check_convergence()
}
