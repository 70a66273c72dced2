//! Kotz-Wishart and inverted Kotz-Wishart distributions.

mod cdf;
mod classical;
mod density;
mod moments;
mod sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kotz::KotzParams;
use crate::matops::SpdMatrix;
use crate::specfun::{ln_gamma, ln_multivariate_gamma, WhittakerIndex};

pub use cdf::{
    inv_cdf_matrix, largest_eig_inv_cdf, prob_greater, prob_greater_khatri, smallest_eig_cdf, smallest_eig_survival,
    Probability,
};
pub use classical::{inv_wishart_ln_pdf, inv_wishart_pdf, wishart_ln_pdf, wishart_mgf, wishart_pdf};
pub use density::{ikw_ln_pdf, ikw_pdf, kw_ln_pdf, kw_pdf};
pub use moments::{c1, expected_zonal, gen_variance_moment, mean, mgf, second_moment, zonal_expectation_factor};
pub use sample::{sample_kw, KwSampler};

/// `KW_p(nu, Sigma)` with Kotz parameters `(q, theta, s)`: the law of the
/// SSP matrix of `n = nu + 1` uncorrelated Kotz vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KwJson", into = "KwJson")]
pub struct KWDist {
    p: usize,
    nu: usize,
    sigma: SpdMatrix,
    params: KotzParams,
}

#[derive(Serialize, Deserialize)]
struct KwJson {
    p: usize,
    nu: usize,
    sigma: SpdMatrix,
    q: f64,
    theta: f64,
    s: f64,
}

impl TryFrom<KwJson> for KWDist {
    type Error = Error;
    fn try_from(j: KwJson) -> Result<Self> {
        KWDist::new(j.p, j.nu, j.sigma, KotzParams::new(j.q, j.theta, j.s)?)
    }
}

impl From<KWDist> for KwJson {
    fn from(d: KWDist) -> Self {
        KwJson {
            p: d.p,
            nu: d.nu,
            sigma: d.sigma,
            q: d.params.q,
            theta: d.params.theta,
            s: d.params.s,
        }
    }
}

impl KWDist {
    pub fn new(p: usize, nu: usize, sigma: SpdMatrix, params: KotzParams) -> Result<Self> {
        if sigma.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: sigma.dim(),
            });
        }
        if nu < p {
            return Err(Error::Domain(format!("Kotz-Wishart needs nu >= p, got nu={nu}, p={p}")));
        }
        params.check_dim(p)?;
        Ok(Self { p, nu, sigma, params })
    }

    /// Classical `W_p(nu, Sigma)` as the member `q = 1, theta = 1/2, s = 1`.
    pub fn wishart(nu: usize, sigma: SpdMatrix) -> Result<Self> {
        Self::new(sigma.dim(), nu, sigma, KotzParams::normal())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Sample size `n = nu + 1`.
    pub fn n(&self) -> usize {
        self.nu + 1
    }

    pub fn sigma(&self) -> &SpdMatrix {
        &self.sigma
    }

    pub fn params(&self) -> &KotzParams {
        &self.params
    }

    pub fn whittaker_index(&self) -> WhittakerIndex {
        WhittakerIndex::kotz(self.params.q, self.p)
    }

    /// `(2q + p - 4)/4`.
    pub fn xi(&self) -> f64 {
        (2.0 * self.params.q + self.p as f64 - 4.0) / 4.0
    }

    pub(crate) fn require_s1(&self, what: &str) -> Result<()> {
        require_s1(&self.params, what)
    }

    /// `ln C_1 = ln Gamma(p(nu+1)/2) + (p nu/2) ln theta - ln Gamma((2q+p(nu+1)-2)/2) - ln Gamma_p(nu/2)`.
    pub(crate) fn ln_c1_normalizer(&self) -> Result<f64> {
        ln_c1_normalizer(self.p, self.nu as f64, &self.params)
    }

    /// `m = (nu - p - 1)/2` when it is a positive integer.
    pub fn khatri_m(&self) -> Result<usize> {
        let twice = self.nu as i64 - self.p as i64 - 1;
        if twice < 2 || twice % 2 != 0 {
            return Err(Error::Precondition(format!(
                "m = (nu - p - 1)/2 must be a positive integer, got nu={}, p={}",
                self.nu, self.p
            )));
        }
        Ok(twice as usize / 2)
    }
}

pub(crate) fn require_s1(params: &KotzParams, what: &str) -> Result<()> {
    if params.s != 1.0 {
        return Err(Error::Domain(format!("{what} is only available for s = 1, got s={}", params.s)));
    }
    Ok(())
}

pub(crate) fn ln_c1_normalizer(p: usize, nu: f64, params: &KotzParams) -> Result<f64> {
    let pf = p as f64;
    Ok(ln_gamma(pf * (nu + 1.0) / 2.0) + pf * nu / 2.0 * params.theta.ln()
        - ln_gamma((2.0 * params.q + pf * (nu + 1.0) - 2.0) / 2.0)
        - ln_multivariate_gamma(p, nu / 2.0)?)
}

/// `IKW_p(d, V)`; `A ~ KW_p(nu, Sigma)` gives `A^{-1} ~ IKW_p(nu + p + 1, Sigma^{-1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IKWDist {
    d: usize,
    v: SpdMatrix,
    params: KotzParams,
}

impl IKWDist {
    pub fn new(d: usize, v: SpdMatrix, params: KotzParams) -> Result<Self> {
        let p = v.dim();
        if d <= 2 * p {
            return Err(Error::Domain(format!("inverted Kotz-Wishart needs d > 2p, got d={d}, p={p}")));
        }
        params.check_dim(p)?;
        Ok(Self { d, v, params })
    }

    /// Law of `A^{-1}` for `A ~ dist`.
    pub fn of_inverse(dist: &KWDist) -> Result<Self> {
        Self::new(dist.nu + dist.p + 1, dist.sigma.inverse()?, dist.params)
    }

    pub fn p(&self) -> usize {
        self.v.dim()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn v(&self) -> &SpdMatrix {
        &self.v
    }

    pub fn params(&self) -> &KotzParams {
        &self.params
    }
}
