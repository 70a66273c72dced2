use std::path::Path;

use kotz_wishart::estimator::{best_alpha, risk_mc, unbiased_constant};
use kotz_wishart::kw::{
    c1, gen_variance_moment, kw_ln_pdf, kw_pdf, mean, prob_greater_khatri, second_moment, smallest_eig_cdf,
    smallest_eig_survival, wishart_ln_pdf, KWDist, KwSampler,
};
use kotz_wishart::matops::{matrix_rows, SpdMatrix};
use kotz_wishart::mc::{run_parallel, McConfig};
use kotz_wishart::specfun::{integrate_power_weighted, QuadratureConfig};
use kotz_wishart::varma::{
    psi_q, varma_det_zonal, varma_hypergeom, varma_laguerre, varma_numeric, varma_power_det, NumericValue,
    VarmaBudget, VarmaKernelParams,
};
use kotz_wishart::zonal::{gen_laguerre, hypergeometric_pfq, zonal, Partition};
use kotz_wishart::{Error, Result as LibResult};
use serde_json::{json, Value};

use crate::output::{Cell, Output};
use crate::{read_spd, CliError, RunConfig, Transform};

type CmdResult = Result<Output, CliError>;

fn dist(cfg: &RunConfig) -> &KWDist {
    cfg.dist.as_ref().expect("distribution is built before dispatch")
}

fn mc(cfg: &RunConfig) -> McConfig {
    McConfig::new(cfg.seed, cfg.workers)
}

fn quad(cfg: &RunConfig, default: f64) -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(cfg.tol.unwrap_or(default))
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub fn sample(cfg: &RunConfig, count: usize) -> CmdResult {
    let dist = dist(cfg);
    let sampler = KwSampler::new(dist)?;
    let parts = run_parallel(count, &mc(cfg), |rng, n| (0..n).map(|_| sampler.sample(rng)).collect::<LibResult<Vec<_>>>());
    let mut draws = Vec::with_capacity(count);
    for part in parts {
        draws.extend(part?);
    }
    let mut rows = Vec::new();
    for (d, a) in draws.iter().enumerate() {
        let m = a.matrix();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                rows.push(vec![Cell::from(d), i.into(), j.into(), m[(i, j)].into()]);
            }
        }
    }
    let samples: Vec<Value> = draws.iter().map(|a| json!(a.rows())).collect();
    Ok(Output {
        result: json!({ "count": count, "samples": samples }),
        header: vec!["draw", "row", "col", "value"],
        rows,
    })
}

/// `int_0^inf f(a) da` for `p = 1`, with the `a^{nu/2-1}` behaviour at the
/// origin taken into the weight.
fn integrate_scalar_density(dist: &KWDist, cfg: &QuadratureConfig) -> LibResult<(f64, f64)> {
    let power = dist.nu() as f64 / 2.0 - 1.0;
    let scale = mean(dist)?.matrix()[(0, 0)];
    let g = |a: f64| {
        if a <= 0.0 {
            return 0.0;
        }
        SpdMatrix::from_diagonal(&[a])
            .and_then(|m| kw_ln_pdf(&m, dist))
            .map(|ln| (ln - power * a.ln()).exp())
            .unwrap_or(f64::NAN)
    };
    let r = integrate_power_weighted(power, g, scale, cfg)?;
    if !r.value.is_finite() {
        return Err(Error::Convergence {
            estimate: r.value,
            error: r.abs_error,
            subdivisions: r.subdivisions,
        });
    }
    Ok((r.value, r.abs_error))
}

pub fn pdf(cfg: &RunConfig, matrix: Option<&Path>, integrate: bool) -> CmdResult {
    let dist = dist(cfg);
    if integrate && dist.p() != 1 {
        return Err(CliError::Lib(Error::Domain(format!("--integrate needs p = 1, got p = {}", dist.p()))));
    }
    let a = matrix.map(read_spd).transpose()?;
    let mut result = serde_json::Map::new();
    let mut rows = Vec::new();
    if let Some(a) = &a {
        let v = kw_pdf(a, dist)?;
        result.insert("density".into(), json!(v.density));
        result.insert("log_density".into(), json!(v.log_density));
        rows.push(vec![Cell::from("density"), v.density.into()]);
        rows.push(vec![Cell::from("log_density"), v.log_density.into()]);
        if dist.params().is_normal() {
            let w = wishart_ln_pdf(a, dist.nu() as f64, dist.sigma())?;
            result.insert("wishart_log_density".into(), json!(w));
            rows.push(vec![Cell::from("wishart_log_density"), w.into()]);
        }
    }
    if integrate {
        let (value, err) = integrate_scalar_density(dist, &quad(cfg, 1e-10))?;
        result.insert("integral".into(), json!(value));
        result.insert("integral_abs_error".into(), json!(err));
        rows.push(vec![Cell::from("integral"), value.into()]);
        rows.push(vec![Cell::from("integral_abs_error"), err.into()]);
    }
    Ok(Output {
        result: Value::Object(result),
        header: vec!["quantity", "value"],
        rows,
    })
}

pub fn moments(cfg: &RunConfig, ts: &[f64]) -> CmdResult {
    let dist = dist(cfg);
    let c1 = c1(dist)?;
    let m = mean(dist)?;
    let m2 = second_moment(dist)?;
    let gv: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| gen_variance_moment(t, dist).map(|v| (t, v)))
        .collect::<LibResult<_>>()?;
    let mut rows = vec![vec![Cell::from("c1"), Cell::Empty, Cell::Empty, Cell::Empty, c1.into()]];
    let p = dist.p();
    for (name, mat) in [("mean", m.matrix()), ("second_moment", &m2)] {
        for i in 0..p {
            for j in 0..p {
                rows.push(vec![Cell::from(name), i.into(), j.into(), Cell::Empty, mat[(i, j)].into()]);
            }
        }
    }
    for &(t, v) in &gv {
        rows.push(vec![Cell::from("gen_variance"), Cell::Empty, Cell::Empty, t.into(), v.into()]);
    }
    let gv_json: Vec<Value> = gv.iter().map(|(t, v)| json!({ "t": t, "value": v })).collect();
    Ok(Output {
        result: json!({
            "c1": c1,
            "mean": m.rows(),
            "second_moment": matrix_rows(&m2),
            "gen_variance": gv_json,
        }),
        header: vec!["quantity", "row", "col", "t", "value"],
        rows,
    })
}

pub fn eig(cfg: &RunConfig, grid: &[f64]) -> CmdResult {
    let dist = dist(cfg);
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(invalid(format!("grid points must be positive and finite, got {x}")));
    }
    let khatri = dist.params().is_normal();
    let mut rows = Vec::with_capacity(grid.len());
    let mut entries = Vec::with_capacity(grid.len());
    for &x in grid {
        let surv = smallest_eig_survival(x, dist)?;
        let cdf = smallest_eig_cdf(x, dist)?;
        let k = if khatri {
            let lambda = SpdMatrix::identity(dist.p()).scaled(x)?;
            Some(prob_greater_khatri(&lambda, dist.sigma(), dist.nu())?)
        } else {
            None
        };
        rows.push(vec![x.into(), surv.value.into(), surv.raw.into(), cdf.value.into(), k.into()]);
        entries.push(json!({ "x": x, "survival": surv.value, "survival_raw": surv.raw, "cdf": cdf.value, "khatri": k }));
    }
    Ok(Output {
        result: json!({ "m": dist.khatri_m()?, "grid": entries }),
        header: vec!["x", "survival", "survival_raw", "cdf", "khatri"],
        rows,
    })
}

pub fn risk(cfg: &RunConfig, alphas: &[f64]) -> CmdResult {
    let dist = dist(cfg);
    let c0 = unbiased_constant(dist)?;
    let best = best_alpha(dist)?;
    let alphas: Vec<f64> = if alphas.is_empty() { vec![0.8 * c0, c0, 1.2 * c0] } else { alphas.to_vec() };
    if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
        return Err(invalid(format!("alpha must be finite, got {a}")));
    }
    let mc = mc(cfg);
    let reports = alphas
        .iter()
        .map(|&a| risk_mc(a, dist, cfg.mc_samples, &mc))
        .collect::<LibResult<Vec<_>>>()?;
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.alpha.into(),
                r.closed_risk.into(),
                r.mc_risk.into(),
                r.mc_stderr.into(),
                r.n_samples.into(),
                r.rejected.into(),
            ]
        })
        .collect();
    Ok(Output {
        result: json!({ "c0": c0, "best_alpha": best, "reports": reports }),
        header: vec!["alpha", "closed_risk", "mc_risk", "mc_stderr", "n_samples", "rejected"],
        rows,
    })
}

pub struct VarmaArgs {
    pub transform: Transform,
    pub z: SpdMatrix,
    pub q: f64,
    pub n: Option<usize>,
    pub kappa: Option<String>,
    pub gamma: Option<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, transform: &str) -> Result<T, CliError> {
    v.ok_or_else(|| invalid(format!("{transform} needs {flag}")))
}

fn partition(args: &VarmaArgs, transform: &str) -> Result<Partition, CliError> {
    let text = args.kappa.as_deref().ok_or_else(|| invalid(format!("{transform} needs --kappa")))?;
    Ok(text.parse()?)
}

/// `|X|^{(n-p-2)/2}` in log form.
fn ln_power_det(x: &SpdMatrix, n: usize) -> f64 {
    (n as f64 - x.dim() as f64 - 2.0) / 2.0 * x.ln_det()
}

pub fn varma(cfg: &RunConfig, args: &VarmaArgs) -> CmdResult {
    let p = args.z.dim();
    let params = VarmaKernelParams::new(args.q, p)?;
    let budget = VarmaBudget {
        samples: cfg.mc_samples,
        mc: mc(cfg),
        rel_tol: cfg.tol.unwrap_or(1e-9),
        ..VarmaBudget::default()
    };
    let z = &args.z;
    let mut extra = serde_json::Map::new();
    let (closed, numeric): (Option<f64>, NumericValue) = match args.transform {
        Transform::PowerDet => {
            let n = need(args.n, "--n", "power-det")?;
            let closed = varma_power_det(z, n, &params)?;
            let numeric = varma_numeric(|x| ln_power_det(x, n).exp(), z, &params, &budget)?;
            extra.insert("n".into(), json!(n));
            (Some(closed), numeric)
        }
        Transform::DetZonal => {
            let n = need(args.n, "--n", "det-zonal")?;
            let kappa = partition(args, "det-zonal")?;
            let closed = varma_det_zonal(z, n, &kappa, &params)?;
            let phi = |x: &SpdMatrix| zonal(&kappa, &x.eigenvalues()).map_or(f64::NAN, |c| c * ln_power_det(x, n).exp());
            let numeric = varma_numeric(phi, z, &params, &budget)?;
            extra.insert("n".into(), json!(n));
            extra.insert("kappa".into(), json!(kappa.to_string()));
            (Some(closed), numeric)
        }
        Transform::Hypergeom => {
            let n = need(args.n, "--n", "hypergeom")?;
            let series = varma_hypergeom(z, n, &args.a, &args.b, &params, cfg.max_degree)?;
            let phi = |x: &SpdMatrix| {
                hypergeometric_pfq(&args.a, &args.b, &x.eigenvalues(), cfg.max_degree)
                    .map_or(f64::NAN, |f| f.value * ln_power_det(x, n).exp())
            };
            let numeric = varma_numeric(phi, z, &params, &budget)?;
            extra.insert("n".into(), json!(n));
            extra.insert("a".into(), json!(args.a));
            extra.insert("b".into(), json!(args.b));
            extra.insert("series".into(), json!(series));
            (Some(series.value), numeric)
        }
        Transform::Laguerre => {
            let gamma = need(args.gamma, "--gamma", "laguerre")?;
            let kappa = partition(args, "laguerre")?;
            let closed = varma_laguerre(z, gamma, &kappa, &params)?;
            let phi = |x: &SpdMatrix| {
                gen_laguerre(gamma, &kappa, &x.eigenvalues()).map_or(f64::NAN, |l| l * (gamma * x.ln_det()).exp())
            };
            let numeric = varma_numeric(phi, z, &params, &budget)?;
            extra.insert("gamma".into(), json!(gamma));
            extra.insert("kappa".into(), json!(kappa.to_string()));
            (Some(closed), numeric)
        }
        Transform::Psi => {
            let a = match args.a.as_slice() {
                [a] => *a,
                _ => return Err(invalid("psi needs exactly one value for --a")),
            };
            let c = need(args.c, "--c", "psi")?;
            extra.insert("a".into(), json!(a));
            extra.insert("c".into(), json!(c));
            (None, psi_q(a, c, z, &params, &budget)?)
        }
    };
    if !numeric.value.is_finite() {
        return Err(CliError::Lib(Error::Convergence {
            estimate: numeric.value,
            error: numeric.stderr,
            subdivisions: 0,
        }));
    }
    let rel_diff = closed.map(|c| (numeric.value - c).abs() / c.abs());
    let mut result = json!({
        "transform": args.transform,
        "q": args.q,
        "p": p,
        "z": z.rows(),
        "closed": closed,
        "numeric": numeric,
        "rel_diff": rel_diff,
    });
    result.as_object_mut().expect("object literal").extend(extra);
    let method = serde_json::to_value(numeric.method)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let name = serde_json::to_value(args.transform)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    Ok(Output {
        result,
        header: vec!["transform", "closed", "numeric", "stderr", "method", "clipped_fraction", "rel_diff"],
        rows: vec![vec![
            name.into(),
            closed.into(),
            numeric.value.into(),
            numeric.stderr.into(),
            method.into(),
            numeric.clipped_fraction.into(),
            rel_diff.into(),
        ]],
    })
}
