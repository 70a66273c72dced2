//! The M-Varma transform
//!
//! ```text
//! M(Z) = int_{X > 0} (tr ZX)^xi e^{-tr ZX / 2} W_{alpha,beta}(tr ZX) phi(X) dX,
//! ```
//!
//! with `alpha = (2q-p)/4`, `beta = (2q+p-2)/4`, `xi = (2q+p-4)/4`. At `q = 1`
//! the kernel is `etr(-ZX)` and `M` is the matrix Laplace transform.
//!
//! The closed forms below share the factor
//! `omega_k = Gamma((2q+np+2k-2)/2) / Gamma((np+2k)/2)`, which is 1 at `q = 1`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kw::wishart_ln_pdf;
use crate::matops::{cholesky, SpdMatrix};
use crate::mc::{run_parallel, substream, McConfig};
use crate::specfun::{
    integrate, integrate_semi_infinite_scaled, ln_gamma, ln_multivariate_gamma, ln_whittaker_w, QuadratureConfig,
    WhittakerIndex,
};
use crate::zonal::{gen_binomials, gen_pochhammer, zonal, zonal_series, Partition, SeriesValue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarmaKernelParams {
    q: f64,
    p: usize,
}

impl VarmaKernelParams {
    pub fn new(q: f64, p: usize) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("Varma kernel needs q > 0, got {q}")));
        }
        if p == 0 || !(2.0 * q + p as f64 > 2.0) {
            return Err(Error::Domain(format!("Varma kernel needs p >= 1 and 2q + p > 2, got q={q}, p={p}")));
        }
        Ok(Self { q, p })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn index(&self) -> WhittakerIndex {
        WhittakerIndex::kotz(self.q, self.p)
    }

    pub fn xi(&self) -> f64 {
        (2.0 * self.q + self.p as f64 - 4.0) / 4.0
    }

    fn check(&self, z: &SpdMatrix) -> Result<()> {
        if z.dim() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: z.dim(),
            });
        }
        Ok(())
    }

    /// `ln omega_k` for the power `|X|^{(n-p-2)/2}`.
    fn ln_omega(&self, n: f64, k: f64) -> f64 {
        let np = n * self.p as f64;
        ln_gamma((2.0 * self.q + np + 2.0 * k - 2.0) / 2.0) - ln_gamma((np + 2.0 * k) / 2.0)
    }
}

/// Log of the kernel as a function of `t = tr ZX`.
pub fn varma_ln_kernel_trace(t: f64, params: &VarmaKernelParams) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("Varma kernel needs tr ZX > 0, got {t}")));
    }
    let idx = params.index();
    if idx.is_exponential() {
        return Ok(-t);
    }
    Ok(params.xi() * t.ln() - 0.5 * t + ln_whittaker_w(idx, t)?)
}

/// `(tr ZX)^xi etr(-ZX/2) W_{alpha,beta}(tr ZX)`.
pub fn varma_kernel(z: &SpdMatrix, x: &SpdMatrix, params: &VarmaKernelParams) -> Result<f64> {
    params.check(z)?;
    params.check(x)?;
    Ok(varma_ln_kernel_trace((z.matrix() * x.matrix()).trace(), params)?.exp())
}

fn check_n(n: f64, p: usize) -> Result<()> {
    if !(n >= p as f64 + 1.0) {
        return Err(Error::Domain(format!("transform needs n >= p + 1, got n={n}, p={p}")));
    }
    Ok(())
}

/// Transform of `|X|^{(n-p-2)/2}`:
/// `Gamma((2q+np-2)/2) Gamma_p((n-1)/2) / Gamma(np/2) |Z|^{-(n-1)/2}`.
pub fn varma_power_det(z: &SpdMatrix, n: usize, params: &VarmaKernelParams) -> Result<f64> {
    varma_det_zonal(z, n, &Partition::empty(), params)
}

/// Transform of `|X|^{(n-p-2)/2} C_kappa(X)`:
/// `omega_k Gamma_p((n-1)/2) ((n-1)/2)_kappa |Z|^{-(n-1)/2} C_kappa(Z^{-1})`.
pub fn varma_det_zonal(z: &SpdMatrix, n: usize, kappa: &Partition, params: &VarmaKernelParams) -> Result<f64> {
    params.check(z)?;
    let n = n as f64;
    check_n(n, params.p)?;
    let a = (n - 1.0) / 2.0;
    let c = if kappa.is_empty() {
        1.0
    } else {
        zonal(kappa, &z.inverse()?.eigenvalues())?
    };
    let ln = params.ln_omega(n, kappa.weight() as f64) + ln_multivariate_gamma(params.p, a)? - a * z.ln_det();
    Ok(ln.exp() * gen_pochhammer(a, kappa) * c)
}

/// Transform of `|X|^{(n-p-2)/2} pFq(a; b; X)`, term by term:
/// `Gamma_p((n-1)/2) |Z|^{-(n-1)/2} sum_kappa (a)_kappa ((n-1)/2)_kappa / (b)_kappa omega_k C_kappa(Z^{-1}) / k!`.
///
/// A negative integer among `a` makes the series terminate; otherwise the
/// divergence diagnostic is enforced.
pub fn varma_hypergeom(
    z: &SpdMatrix,
    n: usize,
    a: &[f64],
    b: &[f64],
    params: &VarmaKernelParams,
    max_degree: usize,
) -> Result<SeriesValue> {
    params.check(z)?;
    let nf = n as f64;
    check_n(nf, params.p)?;
    let half = (nf - 1.0) / 2.0;
    let eigs = z.inverse()?.eigenvalues();
    let terminating = a.iter().any(|&ai| ai <= 0.0 && ai.fract() == 0.0);
    let series = zonal_series(&eigs, max_degree, |kappa| {
        let num: f64 = a.iter().map(|&ai| gen_pochhammer(ai, kappa)).product();
        if num == 0.0 {
            return Ok(0.0);
        }
        let den: f64 = b.iter().map(|&bi| gen_pochhammer(bi, kappa)).product();
        if den == 0.0 {
            return Err(Error::Domain(format!("lower parameter hits a pole at {kappa}")));
        }
        let omega = params.ln_omega(nf, kappa.weight() as f64).exp();
        Ok(num / den * gen_pochhammer(half, kappa) * omega)
    })?;
    let series = if terminating { series } else { series.check_convergence()? };
    let scale = (ln_multivariate_gamma(params.p, half)? - half * z.ln_det()).exp();
    Ok(SeriesValue {
        value: series.value * scale,
        last_contribution: series.last_contribution * scale,
        ..series
    })
}

/// Transform of `|X|^gamma L_kappa^gamma(X)`:
/// `(gamma+t)_kappa Gamma_p(gamma+t) |Z|^{-gamma-t} C_kappa(I) sum_o binom(kappa,o) omega_s C_o(-Z^{-1}) / C_o(I)`
/// with `t = (p+1)/2`, `s = |o|` and `n = 2 gamma + p + 2` in `omega_s`.
pub fn varma_laguerre(z: &SpdMatrix, gamma: f64, kappa: &Partition, params: &VarmaKernelParams) -> Result<f64> {
    params.check(z)?;
    if !(gamma > -1.0) {
        return Err(Error::Domain(format!("Laguerre transform needs gamma > -1, got {gamma}")));
    }
    let p = params.p;
    let t = (p as f64 + 1.0) / 2.0;
    let n = 2.0 * gamma + p as f64 + 2.0;
    let ones = vec![1.0; p];
    let c_kappa_i = zonal(kappa, &ones)?;
    if c_kappa_i == 0.0 {
        return Ok(0.0);
    }
    let neg: Vec<f64> = z.inverse()?.eigenvalues().iter().map(|x| -x).collect();
    let row = gen_binomials(kappa)?;
    let mut acc = crate::sum::CompensatedSum::new();
    for (o, b) in row.iter() {
        if o.len() > p {
            continue;
        }
        let omega = params.ln_omega(n, o.weight() as f64).exp();
        acc.add(b * omega * zonal(o, &neg)? / zonal(o, &ones)?);
    }
    let ln = ln_multivariate_gamma(p, gamma + t)? - (gamma + t) * z.ln_det();
    Ok(gen_pochhammer(gamma + t, kappa) * c_kappa_i * ln.exp() * acc.value())
}

/// Sampling and accuracy settings for [`varma_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarmaBudget {
    pub samples: usize,
    /// Largest acceptable `stderr / |estimate|`.
    pub max_rel_stderr: f64,
    pub mc: McConfig,
    pub rel_tol: f64,
}

impl Default for VarmaBudget {
    fn default() -> Self {
        Self {
            samples: 100_000,
            max_rel_stderr: 0.05,
            mc: McConfig::default(),
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericMethod {
    Quadrature,
    ImportanceSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericValue {
    pub value: f64,
    /// Quadrature error estimate, or Monte Carlo standard error.
    pub stderr: f64,
    pub method: NumericMethod,
    /// Fraction of importance weights clipped at the 99.99th percentile.
    pub clipped_fraction: f64,
}

/// Wishart proposal degrees of freedom in excess of `p`.
const PROPOSAL_EXTRA_DOF: usize = 2;
const PILOT_SAMPLES: usize = 4000;
const CLIP_QUANTILE: f64 = 0.9999;

/// Numerical transform of `phi` at `Z`: adaptive quadrature on `(0, inf)`
/// when `p = 1`, importance sampling over the cone otherwise.
///
/// The proposal is `W_p(p+2, c (2Z)^{-1})`. A seeded pilot run sets `c` so
/// that the proposal mean of `tr ZX` matches its weighted mean under the
/// integrand.
pub fn varma_numeric<F>(phi: F, z: &SpdMatrix, params: &VarmaKernelParams, budget: &VarmaBudget) -> Result<NumericValue>
where
    F: Fn(&SpdMatrix) -> f64 + Sync,
{
    params.check(z)?;
    if params.p == 1 {
        return numeric_scalar(&phi, z.matrix()[(0, 0)], params, budget);
    }
    numeric_cone(&phi, z, params, budget)
}

fn numeric_scalar<F>(phi: &F, z: f64, params: &VarmaKernelParams, budget: &VarmaBudget) -> Result<NumericValue>
where
    F: Fn(&SpdMatrix) -> f64,
{
    let cfg = QuadratureConfig::default().with_rel_tol(budget.rel_tol);
    let failure = std::cell::Cell::new(None);
    let f = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let v = phi(&SpdMatrix::from_diagonal(&[x]).expect("positive scalar"));
        if v == 0.0 {
            return 0.0;
        }
        match varma_ln_kernel_trace(z * x, params) {
            Ok(lk) => lk.exp() * v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    // Split at the kernel's scale so an endpoint singularity of phi and the
    // exponential tail are handled by separate pieces.
    let head = integrate(f, 0.0, 1.0 / z, &cfg)?;
    let tail = integrate_semi_infinite_scaled(f, 1.0 / z, 1.0 / z, &cfg)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(NumericValue {
        value: head.value + tail.value,
        stderr: head.abs_error + tail.abs_error,
        method: NumericMethod::Quadrature,
        clipped_fraction: 0.0,
    })
}

struct Proposal {
    dof: f64,
    scale: SpdMatrix,
    factor: DMatrix<f64>,
}

impl Proposal {
    fn new(z: &SpdMatrix, c: f64) -> Result<Self> {
        let scale = SpdMatrix::new(z.inverse_matrix() * (0.5 * c))?;
        let factor = cholesky(scale.matrix())?;
        Ok(Self {
            dof: (z.dim() + PROPOSAL_EXTRA_DOF) as f64,
            scale,
            factor,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<SpdMatrix> {
        let p = self.factor.nrows();
        let d = self.dof as usize;
        let g = DMatrix::from_fn(p, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = &self.factor * g;
        SpdMatrix::new(crate::matops::symmetrize(&(&y * y.transpose()))).ok()
    }

    fn ln_pdf(&self, x: &SpdMatrix) -> Result<f64> {
        wishart_ln_pdf(x, self.dof, &self.scale)
    }
}

/// Weight `kernel * phi / proposal` and `tr ZX` for one proposal draw.
fn weight<F>(phi: &F, z: &SpdMatrix, x: &SpdMatrix, proposal: &Proposal, params: &VarmaKernelParams) -> Result<(f64, f64)>
where
    F: Fn(&SpdMatrix) -> f64,
{
    let t = (z.matrix() * x.matrix()).trace();
    let v = phi(x);
    if v == 0.0 {
        return Ok((0.0, t));
    }
    let ln = varma_ln_kernel_trace(t, params)? - proposal.ln_pdf(x)?;
    Ok((ln.exp() * v, t))
}

fn draw_weights<F, R>(
    phi: &F,
    z: &SpdMatrix,
    proposal: &Proposal,
    params: &VarmaKernelParams,
    rng: &mut R,
    count: usize,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&SpdMatrix) -> f64,
    R: Rng + ?Sized,
{
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        // Rank-deficient draws have probability zero; redraw them.
        let Some(x) = proposal.sample(rng) else { continue };
        out.push(weight(phi, z, &x, proposal, params)?);
    }
    Ok(out)
}

fn numeric_cone<F>(phi: &F, z: &SpdMatrix, params: &VarmaKernelParams, budget: &VarmaBudget) -> Result<NumericValue>
where
    F: Fn(&SpdMatrix) -> f64 + Sync,
{
    if budget.samples < 2 {
        return Err(Error::Domain("importance sampling needs at least 2 samples".into()));
    }
    let p = params.p as f64;
    let dof = p + PROPOSAL_EXTRA_DOF as f64;

    let pilot = Proposal::new(z, 1.0)?;
    let mut rng = substream(budget.mc.seed, u64::MAX);
    let draws = draw_weights(phi, z, &pilot, params, &mut rng, PILOT_SAMPLES)?;
    let (mass, first) = draws.iter().fold((0.0, 0.0), |(m, f), &(w, t)| (m + w.abs(), f + w.abs() * t));
    let c = if mass > 0.0 { (2.0 * first / mass / (dof * p)).clamp(0.05, 50.0) } else { 1.0 };
    let proposal = Proposal::new(z, c)?;

    let parts = run_parallel(budget.samples, &budget.mc, |rng, count| {
        draw_weights(phi, z, &proposal, params, rng, count)
    });
    let mut weights = Vec::with_capacity(budget.samples);
    for part in parts {
        weights.extend(part?.into_iter().map(|(w, _)| w));
    }

    let mut sorted: Vec<f64> = weights.iter().map(|w| w.abs()).collect();
    sorted.sort_by(f64::total_cmp);
    let cut = sorted[((CLIP_QUANTILE * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1)];
    let mut clipped = 0usize;
    let mut acc = crate::mc::Moments::new(1);
    for w in weights {
        let w = if w.abs() > cut {
            clipped += 1;
            cut.copysign(w)
        } else {
            w
        };
        acc.push(&[w]);
    }
    let value = acc.mean()[0];
    let stderr = acc.stderr()[0];
    let rel = stderr / value.abs();
    if !(rel <= budget.max_rel_stderr) {
        return Err(Error::NoisyEstimate {
            rel_stderr: rel,
            threshold: budget.max_rel_stderr,
        });
    }
    Ok(NumericValue {
        value,
        stderr,
        method: NumericMethod::ImportanceSampling,
        clipped_fraction: clipped as f64 / acc.count() as f64,
    })
}

/// Numerical transform at `X` of
/// `phi(Y) = Gamma_p(a)^{-1} |Y|^{a-t} |I+Y|^{c-a-t}`, `t = (p+1)/2`; at `q = 1`
/// the confluent function `psi(a, c; X)` of matrix argument.
pub fn psi_q(a: f64, c: f64, x: &SpdMatrix, params: &VarmaKernelParams, budget: &VarmaBudget) -> Result<NumericValue> {
    let p = params.p;
    if !(a > (p as f64 - 1.0) / 2.0) {
        return Err(Error::Domain(format!("psi needs a > (p-1)/2, got a={a}, p={p}")));
    }
    let t = (p as f64 + 1.0) / 2.0;
    let ln_gp = ln_multivariate_gamma(p, a)?;
    let phi = |y: &SpdMatrix| {
        let shifted = y.matrix() + DMatrix::identity(p, p);
        let ln_det_shift = shifted.determinant().ln();
        ((a - t) * y.ln_det() + (c - a - t) * ln_det_shift - ln_gp).exp()
    };
    varma_numeric(phi, x, params, budget)
}

/// Numerical check of `M(f1 * f2) = M(f1) M(f2)` for `p = 1`, with
/// `f1 = x^{a-1}`, `f2 = x^{b-1}` and `*` the Laplace convolution, whose
/// value `B(a,b) x^{a+b-1}` is itself computed by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub q: f64,
    pub z: f64,
    pub transform_of_convolution: f64,
    pub product_of_transforms: f64,
    pub rel_diff: f64,
}

pub fn convolution_check(a: f64, b: f64, z: f64, q: f64, budget: &VarmaBudget) -> Result<ConvolutionReport> {
    if !(a > 0.0 && b > 0.0 && z > 0.0) {
        return Err(Error::Domain(format!("convolution check needs a, b, z > 0, got a={a}, b={b}, z={z}")));
    }
    let params = VarmaKernelParams::new(q, 1)?;
    let zm = SpdMatrix::from_diagonal(&[z])?;
    let cfg = QuadratureConfig::default().with_rel_tol(budget.rel_tol);
    let conv = |m: &SpdMatrix| {
        let x = m.matrix()[(0, 0)];
        integrate(|y| y.powf(a - 1.0) * (x - y).powf(b - 1.0), 0.0, x, &cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let lhs = varma_numeric(conv, &zm, &params, budget)?.value;
    if !lhs.is_finite() {
        return Err(Error::Convergence {
            estimate: lhs,
            error: f64::NAN,
            subdivisions: 0,
        });
    }
    let m1 = varma_numeric(|m: &SpdMatrix| m.matrix()[(0, 0)].powf(a - 1.0), &zm, &params, budget)?.value;
    let m2 = varma_numeric(|m: &SpdMatrix| m.matrix()[(0, 0)].powf(b - 1.0), &zm, &params, budget)?.value;
    let rhs = m1 * m2;
    Ok(ConvolutionReport {
        q,
        z,
        transform_of_convolution: lhs,
        product_of_transforms: rhs,
        rel_diff: (lhs - rhs).abs() / rhs.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kw::{expected_zonal, KWDist};
    use crate::specfun::multivariate_gamma;
    use crate::zonal::gen_laguerre;

    fn z2() -> SpdMatrix {
        SpdMatrix::from_rows(&[vec![1.4, 0.3], vec![0.3, 0.9]]).unwrap()
    }

    fn quad_budget() -> VarmaBudget {
        VarmaBudget {
            rel_tol: 1e-10,
            ..VarmaBudget::default()
        }
    }

    #[test]
    fn kernel_reductions() {
        let x = SpdMatrix::from_rows(&[vec![0.7, -0.2], vec![-0.2, 1.1]]).unwrap();
        let params = VarmaKernelParams::new(1.0, 2).unwrap();
        let want = (-(z2().matrix() * x.matrix()).trace()).exp();
        assert!((varma_kernel(&z2(), &x, &params).unwrap() / want - 1.0).abs() < 1e-12);
        let params = VarmaKernelParams::new(1.7, 2).unwrap();
        assert!(varma_kernel(&z2(), &x, &params).unwrap() > 0.0);
    }

    #[test]
    fn power_det_laplace_case() {
        let params = VarmaKernelParams::new(1.0, 2).unwrap();
        let want = multivariate_gamma(2, 2.0).unwrap() * z2().det().powf(-2.0);
        assert!((varma_power_det(&z2(), 5, &params).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_det_scalar_quadrature() {
        let params = VarmaKernelParams::new(2.0, 1).unwrap();
        let z = SpdMatrix::from_diagonal(&[1.5]).unwrap();
        let n = 4;
        let num = varma_numeric(|x: &SpdMatrix| x.matrix()[(0, 0)].powf(0.5), &z, &params, &quad_budget()).unwrap();
        let closed = varma_power_det(&z, n, &params).unwrap();
        assert!((num.value / closed - 1.0).abs() < 1e-6, "{} vs {closed}", num.value);
    }

    #[test]
    fn det_zonal_scalar_quadrature_and_empty_partition() {
        let params = VarmaKernelParams::new(1.5, 1).unwrap();
        let z = SpdMatrix::from_diagonal(&[1.2]).unwrap();
        let kappa = Partition::new(vec![2]).unwrap();
        let num = varma_numeric(|x: &SpdMatrix| x.matrix()[(0, 0)].powf(2.5), &z, &params, &quad_budget()).unwrap();
        let closed = varma_det_zonal(&z, 4, &kappa, &params).unwrap();
        assert!((num.value / closed - 1.0).abs() < 1e-6);
        let params = VarmaKernelParams::new(1.5, 2).unwrap();
        assert_eq!(
            varma_det_zonal(&z2(), 5, &Partition::empty(), &params).unwrap(),
            varma_power_det(&z2(), 5, &params).unwrap()
        );
    }

    #[test]
    fn det_zonal_laplace_case_matches_wishart_expectation() {
        // At q = 1, n-dependent factors coincide with E C_kappa(A) for A ~ W_p(n-1, (2Z)^{-1})
        // times the Wishart normalizing constant.
        let params = VarmaKernelParams::new(1.0, 2).unwrap();
        let n = 6;
        let kappa = Partition::new(vec![2, 1]).unwrap();
        let got = varma_det_zonal(&z2(), n, &kappa, &params).unwrap();
        let sigma = z2().inverse().unwrap().scaled(0.5).unwrap();
        let dist = KWDist::wishart(n - 1, sigma.clone()).unwrap();
        let expected = expected_zonal(&DMatrix::identity(2, 2), &kappa, &dist).unwrap();
        let a = (n as f64 - 1.0) / 2.0;
        let norm = multivariate_gamma(2, a).unwrap() * z2().det().powf(-a);
        assert!((got / (expected * norm) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hypergeom_laplace_cases() {
        let params = VarmaKernelParams::new(1.0, 2).unwrap();
        let z = SpdMatrix::from_rows(&[vec![4.0, 0.5], vec![0.5, 3.0]]).unwrap();
        let n = 5;
        let a = 2.0;
        let got = varma_hypergeom(&z, n, &[], &[], &params, 30).unwrap().value;
        let shifted = SpdMatrix::new(z.matrix() - DMatrix::identity(2, 2)).unwrap();
        let want = multivariate_gamma(2, a).unwrap() * shifted.det().powf(-a);
        assert!((got / want - 1.0).abs() < 1e-8, "{got} vs {want}");
        // a_1 = -1 with p = 2: degree 2 is the last nonzero one
        let lo = varma_hypergeom(&z, n, &[-1.0], &[3.0], &params, 2).unwrap().value;
        let hi = varma_hypergeom(&z, n, &[-1.0], &[3.0], &params, 9).unwrap().value;
        assert!((lo - hi).abs() <= 1e-14 * hi.abs());
    }

    #[test]
    fn laguerre_laplace_collapse() {
        let params = VarmaKernelParams::new(1.0, 2).unwrap();
        let gamma = 0.7;
        let kappa = Partition::new(vec![2, 1]).unwrap();
        let got = varma_laguerre(&z2(), gamma, &kappa, &params).unwrap();
        let t = 1.5;
        let shifted: Vec<f64> = z2().inverse().unwrap().eigenvalues().iter().map(|l| 1.0 - l).collect();
        let want = gen_pochhammer(gamma + t, &kappa) * multivariate_gamma(2, gamma + t).unwrap()
            * z2().det().powf(-gamma - t)
            * zonal(&kappa, &shifted).unwrap();
        assert!((got / want - 1.0).abs() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn laguerre_scalar_quadrature() {
        let params = VarmaKernelParams::new(1.5, 1).unwrap();
        let z = SpdMatrix::from_diagonal(&[1.3]).unwrap();
        let gamma = 0.5;
        let kappa = Partition::new(vec![1]).unwrap();
        let phi = |x: &SpdMatrix| {
            let v = x.matrix()[(0, 0)];
            v.powf(gamma) * gen_laguerre(gamma, &kappa, &[v]).unwrap()
        };
        let num = varma_numeric(phi, &z, &params, &quad_budget()).unwrap();
        let closed = varma_laguerre(&z, gamma, &kappa, &params).unwrap();
        assert!((num.value / closed - 1.0).abs() < 1e-5, "{} vs {closed}", num.value);
    }

    #[test]
    fn importance_sampling_power_det() {
        let params = VarmaKernelParams::new(1.5, 2).unwrap();
        let n = 5usize;
        let budget = VarmaBudget {
            samples: 40_000,
            mc: McConfig::new(7, 2),
            ..VarmaBudget::default()
        };
        let power = (n as f64 - 4.0) / 2.0;
        let num = varma_numeric(|x: &SpdMatrix| (power * x.ln_det()).exp(), &z2(), &params, &budget).unwrap();
        let closed = varma_power_det(&z2(), n, &params).unwrap();
        assert!((num.value - closed).abs() < 3.0 * num.stderr, "{num:?} vs {closed}");
        assert!(num.clipped_fraction <= 2e-4);
        let again = varma_numeric(|x: &SpdMatrix| (power * x.ln_det()).exp(), &z2(), &params, &budget).unwrap();
        assert_eq!(num, again);
    }

    #[test]
    fn psi_scalar_laplace_case() {
        let params = VarmaKernelParams::new(1.0, 1).unwrap();
        let x = SpdMatrix::from_diagonal(&[0.8]).unwrap();
        let (a, c) = (1.5, 2.7);
        let got = psi_q(a, c, &x, &params, &quad_budget()).unwrap().value;
        // Tricomi U(a, c, x) = Gamma(a)^{-1} int e^{-xy} y^{a-1} (1+y)^{c-a-1} dy
        let direct = integrate_semi_infinite_scaled(
            |y| (-0.8 * y).exp() * y.powf(a - 1.0) * (1.0 + y).powf(c - a - 1.0),
            0.0,
            1.0,
            &QuadratureConfig::default().with_rel_tol(1e-11),
        )
        .unwrap()
        .value
            / crate::specfun::gamma(a);
        assert!((got / direct - 1.0).abs() < 1e-8);
    }

    #[test]
    fn convolution_holds_in_laplace_case() {
        let r = convolution_check(1.5, 2.0, 1.3, 1.0, &quad_budget()).unwrap();
        assert!(r.rel_diff < 1e-5, "{r:?}");
    }

    #[test]
    fn params_domain() {
        assert!(VarmaKernelParams::new(0.4, 1).is_err());
        assert!(VarmaKernelParams::new(0.4, 2).is_ok());
        assert!(VarmaKernelParams::new(-1.0, 3).is_err());
    }
}
