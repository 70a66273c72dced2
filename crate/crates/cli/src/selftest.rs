//! Built-in invariant checks. `quick` runs closed-form identities only; `full`
//! adds quadrature and seeded Monte Carlo oracles.

use kotz_wishart::estimator::{risk_closed, risk_mc, unbiased_constant};
use kotz_wishart::kotz::KotzParams;
use kotz_wishart::kw::{kw_ln_pdf, mean, prob_greater, prob_greater_khatri, wishart_ln_pdf, KWDist, KwSampler};
use kotz_wishart::matops::SpdMatrix;
use kotz_wishart::mc::{run_parallel, McConfig, Moments};
use kotz_wishart::specfun::{multivariate_gamma, whittaker_w, QuadratureConfig, WhittakerIndex};
use kotz_wishart::varma::{varma_numeric, varma_power_det, VarmaBudget, VarmaKernelParams};
use kotz_wishart::zonal::{hypergeometric_pfq, table};
use kotz_wishart::Result;
use serde_json::json;

use crate::output::{Cell, Output};
use crate::{CliError, Level, RunConfig};

type Check = fn(&RunConfig) -> Result<(bool, String)>;

fn sigma2() -> SpdMatrix {
    SpdMatrix::from_rows(&[vec![1.2, 0.3], vec![0.3, 0.9]]).expect("fixed SPD matrix")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn wishart_reduction(_: &RunConfig) -> Result<(bool, String)> {
    let a = SpdMatrix::from_rows(&[vec![4.0, -0.5], vec![-0.5, 6.0]])?;
    let dist = KWDist::wishart(5, sigma2())?;
    let got = kw_ln_pdf(&a, &dist)?;
    let want = wishart_ln_pdf(&a, 5.0, &sigma2())?;
    Ok(((got - want).abs() <= 1e-8 * want.abs().max(1.0), format!("log pdf {got} vs {want}")))
}

fn whittaker_line(_: &RunConfig) -> Result<(bool, String)> {
    let idx = WhittakerIndex::new(0.3, 0.2);
    let worst = (1..=50)
        .map(|i| {
            let z = 0.2 * i as f64;
            whittaker_w(idx, z).map(|w| rel(w, z.powf(0.3) * (-z / 2.0).exp()))
        })
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;
    Ok((worst <= 1e-10, format!("max relative error {worst:e}")))
}

fn trace_identity(_: &RunConfig) -> Result<(bool, String)> {
    let eigs = [0.7, -0.4, 1.3];
    let tr: f64 = eigs.iter().sum();
    let mut worst = 0.0f64;
    for k in 0..=6 {
        let total: f64 = table(k, eigs.len())?.evaluate_all(&eigs)?.iter().sum();
        worst = worst.max((total - tr.powi(k as i32)).abs() / tr.powi(k as i32).abs().max(1.0));
    }
    Ok((worst <= 1e-10, format!("max relative error {worst:e}")))
}

fn terminating_series(_: &RunConfig) -> Result<(bool, String)> {
    let eigs = [0.3, -0.2];
    let got = hypergeometric_pfq(&[-2.0], &[], &eigs, 4)?.value;
    let want: f64 = eigs.iter().map(|l| (1.0 - l) * (1.0 - l)).product();
    Ok(((got - want).abs() <= 1e-12, format!("{got} vs {want}")))
}

fn normal_estimator(_: &RunConfig) -> Result<(bool, String)> {
    let dist = KWDist::wishart(7, sigma2())?;
    let c0 = unbiased_constant(&dist)?;
    let r = risk_closed(c0, &dist)?;
    let want_c0 = (dist.n() - dist.p() - 2) as f64;
    let want_r = (dist.p() + 1) as f64 / dist.nu() as f64;
    let ok = (c0 - want_c0).abs() <= 1e-12 * want_c0 && (r - want_r).abs() <= 1e-12 * want_r;
    Ok((ok, format!("c0 {c0} vs {want_c0}, risk {r} vs {want_r}")))
}

fn khatri_agreement(_: &RunConfig) -> Result<(bool, String)> {
    let dist = KWDist::wishart(7, sigma2())?;
    let lambda = SpdMatrix::from_rows(&[vec![2.0, 0.1], vec![0.1, 1.5]])?;
    let got = prob_greater(&lambda, &dist)?.raw;
    let want = prob_greater_khatri(&lambda, &sigma2(), 7)?;
    Ok(((got - want).abs() <= 1e-8, format!("{got} vs {want}")))
}

fn varma_laplace(_: &RunConfig) -> Result<(bool, String)> {
    let z = SpdMatrix::from_rows(&[vec![1.5, 0.2], vec![0.2, 0.8]])?;
    let n = 6;
    let got = varma_power_det(&z, n, &VarmaKernelParams::new(1.0, 2)?)?;
    let h = (n as f64 - 1.0) / 2.0;
    let want = multivariate_gamma(2, h)? * z.det().powf(-h);
    Ok((rel(got, want) <= 1e-8, format!("{got} vs {want}")))
}

fn normalization(cfg: &RunConfig) -> Result<(bool, String)> {
    let dist = KWDist::new(1, 4, SpdMatrix::identity(1), KotzParams::new(1.5, 0.8, 1.0)?)?;
    let quad = QuadratureConfig::default().with_rel_tol(cfg.tol.unwrap_or(1e-10));
    let scale = mean(&dist)?.matrix()[(0, 0)];
    let power = dist.nu() as f64 / 2.0 - 1.0;
    let g = |a: f64| {
        SpdMatrix::from_diagonal(&[a])
            .and_then(|m| kw_ln_pdf(&m, &dist))
            .map_or(f64::NAN, |ln| (ln - power * a.ln()).exp())
    };
    let total = kotz_wishart::specfun::integrate_power_weighted(power, g, scale, &quad)?.value;
    Ok(((total - 1.0).abs() <= 1e-6, format!("integral {total}")))
}

fn varma_quadrature(cfg: &RunConfig) -> Result<(bool, String)> {
    let z = SpdMatrix::from_diagonal(&[1.7])?;
    let params = VarmaKernelParams::new(1.5, 1)?;
    let n = 5;
    let budget = VarmaBudget {
        rel_tol: cfg.tol.unwrap_or(1e-10),
        ..VarmaBudget::default()
    };
    let numeric = varma_numeric(|x| x.det().powf((n as f64 - 3.0) / 2.0), &z, &params, &budget)?.value;
    let closed = varma_power_det(&z, n, &params)?;
    Ok((rel(numeric, closed) <= 1e-6, format!("closed {closed} vs quadrature {numeric}")))
}

fn mc_mean(cfg: &RunConfig) -> Result<(bool, String)> {
    let dist = KWDist::new(2, 7, sigma2(), KotzParams::new(1.5, 0.7, 1.0)?)?;
    let sampler = KwSampler::new(&dist)?;
    let parts = run_parallel(cfg.mc_samples.max(1000), &McConfig::new(cfg.seed, cfg.workers), |rng, count| {
        let mut acc = Moments::new(4);
        for _ in 0..count {
            acc.push(sampler.sample(rng)?.matrix().as_slice());
        }
        Ok(acc)
    });
    let acc = Moments::merged(parts.into_iter().collect::<Result<Vec<_>>>()?).expect("at least one worker");
    let want = mean(&dist)?;
    let worst = want
        .matrix()
        .iter()
        .zip(acc.mean().iter().zip(acc.stderr()))
        .map(|(w, (m, se))| (m - w).abs() / se)
        .fold(0.0, f64::max);
    Ok((worst <= 4.0, format!("largest deviation {worst:.2} standard errors")))
}

fn mc_risk(cfg: &RunConfig) -> Result<(bool, String)> {
    let dist = KWDist::new(2, 9, sigma2(), KotzParams::new(2.0, 1.0, 1.0)?)?;
    let c0 = unbiased_constant(&dist)?;
    let r = risk_mc(c0, &dist, cfg.mc_samples.max(1000), &McConfig::new(cfg.seed, cfg.workers))?;
    let z = (r.mc_risk - r.closed_risk).abs() / r.mc_stderr;
    Ok((z <= 4.0, format!("closed {} vs mc {} ({z:.2} s.e.)", r.closed_risk, r.mc_risk)))
}

const QUICK: &[(&str, Check)] = &[
    ("wishart_reduction", wishart_reduction),
    ("whittaker_exponential_line", whittaker_line),
    ("zonal_trace_identity", trace_identity),
    ("terminating_1f0", terminating_series),
    ("normal_estimator", normal_estimator),
    ("khatri_agreement", khatri_agreement),
    ("varma_laplace_reduction", varma_laplace),
];

const FULL: &[(&str, Check)] = &[
    ("p1_normalization", normalization),
    ("varma_p1_quadrature", varma_quadrature),
    ("mc_mean", mc_mean),
    ("mc_risk", mc_risk),
];

pub fn run(cfg: &RunConfig, level: Level) -> std::result::Result<Output, CliError> {
    let checks: Vec<&(&str, Check)> = match level {
        Level::Quick => QUICK.iter().collect(),
        Level::Full => QUICK.iter().chain(FULL).collect(),
    };
    let mut rows = Vec::with_capacity(checks.len());
    let mut entries = Vec::with_capacity(checks.len());
    for (name, check) in checks {
        let (pass, detail) = check(cfg).unwrap_or_else(|e| (false, format!("error: {e}")));
        rows.push(vec![Cell::from(*name), pass.into(), detail.clone().into()]);
        entries.push(json!({ "name": name, "pass": pass, "detail": detail }));
    }
    let passed = rows.iter().filter(|r| matches!(r[1], Cell::Bool(true))).count();
    Ok(Output {
        result: json!({ "level": level, "passed": passed, "total": rows.len(), "checks": entries }),
        header: vec!["check", "pass", "detail"],
        rows,
    })
}
