//! The Kotz type vector distribution and the uncorrelated matrix model
//! built from it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::matops::SpdMatrix;
use crate::specfun::ln_gamma;

/// Shape `q`, rate `theta` and power `s` of the generator `z^{q-1} exp(-theta z^s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KotzParams {
    pub q: f64,
    pub theta: f64,
    pub s: f64,
}

impl KotzParams {
    pub fn new(q: f64, theta: f64, s: f64) -> Result<Self> {
        let p = Self { q, theta, s };
        p.validate()?;
        Ok(p)
    }

    /// `q = 1, theta = 1/2, s = 1`: the normal law.
    pub fn normal() -> Self {
        Self {
            q: 1.0,
            theta: 0.5,
            s: 1.0,
        }
    }

    pub fn is_normal(&self) -> bool {
        self.q == 1.0 && self.theta == 0.5 && self.s == 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() || !(self.theta > 0.0 && self.theta.is_finite()) || !(self.s > 0.0 && self.s.is_finite()) {
            return domain(format!(
                "Kotz parameters need finite q, theta > 0, s > 0; got q={}, theta={}, s={}",
                self.q, self.theta, self.s
            ));
        }
        Ok(())
    }

    /// `2q + dim > 2`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        self.validate()?;
        if !(2.0 * self.q + dim as f64 > 2.0) {
            return domain(format!("Kotz model needs 2q + dim > 2, got q={}, dim={dim}", self.q));
        }
        Ok(())
    }

    /// Gamma shape `(2q + dim - 2)/(2s)` of `r^{2s}`.
    pub(crate) fn radial_shape(&self, dim: usize) -> f64 {
        (2.0 * self.q + dim as f64 - 2.0) / (2.0 * self.s)
    }
}

/// `E(r^{2t}) = theta^{-t/s} Gamma((2q+dim+2t-2)/(2s)) / Gamma((2q+dim-2)/(2s))`.
pub fn ln_radial_moment(t: f64, dim: usize, params: &KotzParams) -> Result<f64> {
    params.check_dim(dim)?;
    let base = params.radial_shape(dim);
    let shifted = base + t / params.s;
    if !(shifted > 0.0) {
        return domain(format!("radial moment of order {t} does not exist"));
    }
    Ok(-t / params.s * params.theta.ln() + ln_gamma(shifted) - ln_gamma(base))
}

pub fn radial_moment(t: f64, dim: usize, params: &KotzParams) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("radial moment needs t > 0, got {t}"));
    }
    Ok(ln_radial_moment(t, dim, params)?.exp())
}

/// Sampler for the radial part `R`, density proportional to
/// `r^{dim + 2q - 3} exp(-theta r^{2s})`: `R = U^{1/(2s)}`, `U ~ Gamma((2q+dim-2)/(2s), rate theta)`.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    gamma: Gamma<f64>,
    inv_2s: f64,
}

impl RadialSampler {
    pub fn new(dim: usize, params: &KotzParams) -> Result<Self> {
        params.check_dim(dim)?;
        let gamma = Gamma::new(params.radial_shape(dim), 1.0 / params.theta)
            .map_err(|e| Error::Domain(format!("radial gamma law: {e}")))?;
        Ok(Self {
            gamma,
            inv_2s: 1.0 / (2.0 * params.s),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng).powf(self.inv_2s)
    }
}

pub fn sample_radial<R: Rng + ?Sized>(dim: usize, params: &KotzParams, rng: &mut R) -> Result<f64> {
    Ok(RadialSampler::new(dim, params)?.sample(rng))
}

/// Covariance multiplier: `Cov(x) = covariance_scale * Sigma`.
pub fn covariance_scale(params: &KotzParams, p: usize) -> Result<f64> {
    Ok(radial_moment(1.0, p, params)? / p as f64)
}

/// `x ~ MK_p(mu, Sigma)`.
#[derive(Debug, Clone)]
pub struct KotzVectorDist {
    mu: DVector<f64>,
    sigma: SpdMatrix,
    params: KotzParams,
}

/// Density value with its logarithm. `singular` marks the point `x = mu`
/// when `q < 1`, where the density is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdfValue {
    pub density: f64,
    pub log_density: f64,
    pub singular: bool,
}

impl PdfValue {
    pub(crate) fn from_log(log_density: f64) -> Self {
        Self {
            density: log_density.exp(),
            log_density,
            singular: false,
        }
    }
}

impl KotzVectorDist {
    pub fn new(mu: DVector<f64>, sigma: SpdMatrix, params: KotzParams) -> Result<Self> {
        if mu.len() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                found: mu.len(),
            });
        }
        params.check_dim(mu.len())?;
        Ok(Self { mu, sigma, params })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &SpdMatrix {
        &self.sigma
    }

    pub fn params(&self) -> &KotzParams {
        &self.params
    }

    /// `ln C = ln s + (2q+p-2)/(2s) ln theta + ln Gamma(p/2) - (p/2) ln pi - ln Gamma((2q+p-2)/(2s))`.
    fn ln_normalizer(&self) -> f64 {
        let p = self.dim() as f64;
        let k = &self.params;
        let shape = k.radial_shape(self.dim());
        k.s.ln() + shape * k.theta.ln() + ln_gamma(p / 2.0) - p / 2.0 * PI.ln() - ln_gamma(shape)
    }
}

/// Kotz density `C |Sigma|^{-1/2} u^{q-1} exp(-theta u^s)`, `u = (x-mu)' Sigma^{-1} (x-mu)`.
pub fn kotz_pdf(x: &DVector<f64>, dist: &KotzVectorDist) -> Result<PdfValue> {
    if x.len() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            found: x.len(),
        });
    }
    let d = x - &dist.mu;
    let u = (d.transpose() * dist.sigma.inverse_matrix() * &d)[(0, 0)];
    let k = &dist.params;
    let ln_c = dist.ln_normalizer() - 0.5 * dist.sigma.ln_det();
    if u == 0.0 {
        return Ok(if k.q < 1.0 {
            PdfValue {
                density: f64::INFINITY,
                log_density: f64::INFINITY,
                singular: true,
            }
        } else if k.q > 1.0 {
            PdfValue {
                density: 0.0,
                log_density: f64::NEG_INFINITY,
                singular: false,
            }
        } else {
            PdfValue::from_log(ln_c)
        });
    }
    if u.is_infinite() {
        return Ok(PdfValue::from_log(f64::NEG_INFINITY));
    }
    Ok(PdfValue::from_log(ln_c + (k.q - 1.0) * u.ln() - k.theta * u.powf(k.s)))
}

pub fn kotz_ln_pdf(x: &DVector<f64>, dist: &KotzVectorDist) -> Result<f64> {
    Ok(kotz_pdf(x, dist)?.log_density)
}

/// `n` uncorrelated columns with joint density generator in dimension `np`.
#[derive(Debug, Clone)]
pub struct KotzModel {
    n: usize,
    dist: KotzVectorDist,
    sigma_root: DMatrix<f64>,
    radial: RadialSampler,
}

impl KotzModel {
    pub fn new(n: usize, dist: KotzVectorDist) -> Result<Self> {
        let p = dist.dim();
        if n <= p {
            return Err(Error::Precondition(format!("Kotz model needs n > p, got n={n}, p={p}")));
        }
        let radial = RadialSampler::new(n * p, &dist.params)?;
        let sigma_root = dist.sigma.sqrt().into_matrix();
        Ok(Self {
            n,
            dist,
            sigma_root,
            radial,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self) -> &KotzVectorDist {
        &self.dist
    }

    /// `X = mu e' + R Sigma^{1/2} U` with `vec(U)` uniform on the unit sphere
    /// in dimension `pn`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let p = self.dist.dim();
        let u = loop {
            let g = DMatrix::<f64>::from_fn(p, self.n, |_, _| StandardNormal.sample(rng));
            let norm = g.norm();
            if norm > 0.0 {
                break g / norm;
            }
        };
        let r = self.radial.sample(rng);
        let mut x = &self.sigma_root * u * r;
        for mut col in x.column_iter_mut() {
            col += &self.dist.mu;
        }
        x
    }
}

pub fn sample_kotz_matrix<R: Rng + ?Sized>(model: &KotzModel, rng: &mut R) -> DMatrix<f64> {
    model.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{substream, Moments};
    use crate::specfun::{gamma, integrate_semi_infinite, QuadratureConfig};

    #[test]
    fn radial_moment_examples() {
        for p in 1..5 {
            assert!((radial_moment(1.0, p, &KotzParams::normal()).unwrap() - p as f64).abs() < 1e-12);
        }
        let np = 12.0;
        let m = radial_moment(2.0, 12, &KotzParams::normal()).unwrap();
        assert!((m - np * (np + 2.0)).abs() < 1e-9);
        assert!(radial_moment(1.0, 1, &KotzParams::new(0.4, 1.0, 1.0).unwrap()).is_err());
        assert!(radial_moment(0.0, 3, &KotzParams::normal()).is_err());
    }

    #[test]
    fn covariance_scale_values() {
        assert!((covariance_scale(&KotzParams::normal(), 4).unwrap() - 1.0).abs() < 1e-12);
        // theta^{-1} Gamma(7/2) / (3 Gamma(5/2)) = 5/6
        let c = covariance_scale(&KotzParams::new(2.0, 1.0, 1.0).unwrap(), 3).unwrap();
        assert!((c - 5.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn normal_density() {
        let d = KotzVectorDist::new(DVector::zeros(2), SpdMatrix::identity(2), KotzParams::normal()).unwrap();
        let v = kotz_pdf(&DVector::from_vec(vec![1.0, 0.0]), &d).unwrap();
        let expected = (-0.5f64).exp() / (2.0 * PI);
        assert!((v.density - expected).abs() < 1e-15);
    }

    #[test]
    fn density_at_center() {
        let mu = DVector::from_vec(vec![1.0, -1.0]);
        let high = KotzVectorDist::new(mu.clone(), SpdMatrix::identity(2), KotzParams::new(2.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(kotz_pdf(&mu, &high).unwrap().density, 0.0);
        let low = KotzVectorDist::new(mu.clone(), SpdMatrix::identity(2), KotzParams::new(0.5, 1.0, 1.0).unwrap()).unwrap();
        let v = kotz_pdf(&mu, &low).unwrap();
        assert!(v.singular && v.density.is_infinite());
    }

    #[test]
    fn univariate_normalization() {
        let cfg = QuadratureConfig::default();
        for (q, theta, s) in [(1.5, 0.8, 1.0), (2.0, 1.0, 2.0), (0.75, 0.6, 0.7), (1.0, 0.5, 1.0)] {
            let d = KotzVectorDist::new(
                DVector::from_vec(vec![0.3]),
                SpdMatrix::from_diagonal(&[2.0]).unwrap(),
                KotzParams::new(q, theta, s).unwrap(),
            )
            .unwrap();
            // symmetric about mu, so twice the right half-line; t = v^2 tames
            // the q < 1 spike at the center
            let half = integrate_semi_infinite(
                |v| {
                    if v == 0.0 {
                        return 0.0;
                    }
                    2.0 * v * kotz_pdf(&DVector::from_vec(vec![0.3 + v * v]), &d).unwrap().density
                },
                0.0,
                &cfg,
            )
            .unwrap();
            assert!((2.0 * half.value - 1.0).abs() < 1e-6, "q={q} theta={theta} s={s}: {}", 2.0 * half.value);
        }
    }

    #[test]
    fn radial_sampler_moments() {
        let params = KotzParams::new(2.0, 1.0, 1.0).unwrap();
        let sampler = RadialSampler::new(6, &params).unwrap();
        let mut rng = substream(7, 0);
        let mut acc = Moments::new(2);
        for _ in 0..200_000 {
            let r2 = sampler.sample(&mut rng).powi(2);
            acc.push(&[r2, r2 * r2]);
        }
        for (i, t) in [1.0, 2.0].iter().enumerate() {
            let want = radial_moment(*t, 6, &params).unwrap();
            assert!((acc.mean()[i] - want).abs() < 3.0 * acc.stderr()[i], "t={t}");
        }
        // chi-square check in the normal case
        let chi = RadialSampler::new(3, &KotzParams::normal()).unwrap();
        let mut acc = Moments::new(1);
        for _ in 0..100_000 {
            acc.push(&[chi.sample(&mut rng).powi(2)]);
        }
        assert!((acc.mean()[0] - 3.0).abs() < 3.0 * acc.stderr()[0]);
    }

    #[test]
    fn radial_moment_fractional_order() {
        // 1.5-th moment of r^2 in dim 6 with q=2: Gamma(5.5)/Gamma(4)
        let params = KotzParams::new(2.0, 1.0, 1.0).unwrap();
        let want = gamma(5.5) / gamma(4.0);
        assert!((radial_moment(1.5, 6, &params).unwrap() - want).abs() < 1e-12);
    }
}
