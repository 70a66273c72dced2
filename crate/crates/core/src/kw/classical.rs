//! Textbook Wishart and inverted Wishart formulas, kept separate from the
//! Kotz-Wishart code paths so they can serve as reduction oracles.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matops::{product_eigenvalues, SpdMatrix};
use crate::specfun::ln_multivariate_gamma;

fn same_dim(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// `W_p(m, Sigma)`: `|A|^{(m-p-1)/2} etr(-Sigma^{-1} A / 2) / (2^{mp/2} |Sigma|^{m/2} Gamma_p(m/2))`.
pub fn wishart_ln_pdf(a: &SpdMatrix, m: f64, sigma: &SpdMatrix) -> Result<f64> {
    same_dim(a, sigma)?;
    let p = a.dim() as f64;
    let tr = (sigma.inverse_matrix() * a.matrix()).trace();
    Ok((m - p - 1.0) / 2.0 * a.ln_det() - 0.5 * tr
        - m * p / 2.0 * LN_2
        - m / 2.0 * sigma.ln_det()
        - ln_multivariate_gamma(a.dim(), m / 2.0)?)
}

pub fn wishart_pdf(a: &SpdMatrix, m: f64, sigma: &SpdMatrix) -> Result<f64> {
    Ok(wishart_ln_pdf(a, m, sigma)?.exp())
}

/// `IW_p(d, V)`: `|B|^{-d/2} etr(-V B^{-1} / 2) |V|^{(d-p-1)/2} / (2^{p(d-p-1)/2} Gamma_p((d-p-1)/2))`.
pub fn inv_wishart_ln_pdf(b: &SpdMatrix, d: f64, v: &SpdMatrix) -> Result<f64> {
    same_dim(b, v)?;
    let p = b.dim() as f64;
    let tr = (v.matrix() * b.inverse_matrix()).trace();
    let k = d - p - 1.0;
    Ok(-d / 2.0 * b.ln_det() - 0.5 * tr + k / 2.0 * v.ln_det()
        - p * k / 2.0 * LN_2
        - ln_multivariate_gamma(b.dim(), k / 2.0)?)
}

pub fn inv_wishart_pdf(b: &SpdMatrix, d: f64, v: &SpdMatrix) -> Result<f64> {
    Ok(inv_wishart_ln_pdf(b, d, v)?.exp())
}

/// `E etr(Omega A) = |I - 2 Omega Sigma|^{-m/2}` for `A ~ W_p(m, Sigma)`.
pub fn wishart_mgf(omega: &DMatrix<f64>, m: f64, sigma: &SpdMatrix) -> Result<f64> {
    let eigs = product_eigenvalues(omega, sigma)?;
    if eigs.iter().any(|l| 2.0 * l >= 1.0) {
        return Err(Error::Domain("Wishart mgf needs I - 2 Omega Sigma > 0".into()));
    }
    Ok(eigs.iter().map(|l| (1.0 - 2.0 * l).powf(-m / 2.0)).product())
}
