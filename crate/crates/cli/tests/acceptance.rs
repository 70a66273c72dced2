//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every random input comes from a fixed seed.

use std::process::Command;
use std::time::Instant;

use kotz_wishart::estimator::{risk_closed, risk_mc, unbiased_constant};
use kotz_wishart::kotz::KotzParams;
use kotz_wishart::kw::{
    gen_variance_moment, ikw_ln_pdf, inv_wishart_ln_pdf, kw_ln_pdf, mean, mgf, prob_greater, prob_greater_khatri,
    second_moment, smallest_eig_survival, wishart_ln_pdf, wishart_mgf, IKWDist, KWDist, KwSampler,
};
use kotz_wishart::matops::{eigenvalues_sym, SpdMatrix};
use kotz_wishart::mc::{run_parallel, McConfig, Moments};
use kotz_wishart::specfun::{
    gamma, integrate_power_weighted, meijer_g3023, mellin_whittaker, multivariate_gamma, whittaker_moment,
    whittaker_w, whittaker_w_with, QuadratureConfig, WhittakerIndex,
};
use kotz_wishart::varma::{
    varma_det_zonal, varma_laguerre, varma_numeric, varma_power_det, VarmaBudget, VarmaKernelParams,
};
use kotz_wishart::zonal::{gen_pochhammer, hypergeometric_pfq, partitions, table, zonal, Partition};
use kotz_wishart::Result;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORKERS: usize = 4;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_spd(rng: &mut impl Rng, p: usize, scale: f64) -> SpdMatrix {
    let b = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    let m = (&b * b.transpose() + DMatrix::identity(p, p) * 0.3) * scale;
    SpdMatrix::new((&m + m.transpose()) * 0.5).expect("B B' + 0.3 I is SPD")
}

fn random_symmetric(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.0..1.0));
    (&b + b.transpose()) * 0.5
}

fn sigma2() -> SpdMatrix {
    SpdMatrix::from_rows(&[vec![1.2, 0.3], vec![0.3, 0.9]]).unwrap()
}

/// Largest `|mc - want| / se` over the entries.
fn worst_z(acc: &Moments, want: &[f64]) -> f64 {
    want.iter()
        .zip(acc.mean().iter().zip(acc.stderr()))
        .map(|(w, (m, se))| (m - w).abs() / se)
        .fold(0.0, f64::max)
}

fn wishart_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_kw = 0.0f64;
    let mut worst_ikw = 0.0f64;
    for i in 0..50 {
        let p = 1 + i % 3;
        let n = rng.random_range(p + 1..=10);
        let nu = n - 1;
        let sigma = random_spd(&mut rng, p, 1.0);
        let a = random_spd(&mut rng, p, nu as f64 / 2.0);
        let dist = KWDist::wishart(nu, sigma.clone())?;
        let got = kw_ln_pdf(&a, &dist)?;
        let want = wishart_ln_pdf(&a, nu as f64, &sigma)?;
        worst_kw = worst_kw.max((got - want).exp_m1().abs());

        let d = rng.random_range(2 * p + 1..=2 * p + 8);
        let v = random_spd(&mut rng, p, 1.0);
        let b = random_spd(&mut rng, p, 0.5);
        let inv = IKWDist::new(d, v.clone(), KotzParams::normal())?;
        let got = ikw_ln_pdf(&b, &inv)?;
        let want = inv_wishart_ln_pdf(&b, d as f64, &v)?;
        worst_ikw = worst_ikw.max((got - want).exp_m1().abs());
    }
    Ok((
        worst_kw <= 1e-8 && worst_ikw <= 1e-8,
        format!("max relative pdf error: KW {worst_kw:.1e}, IKW {worst_ikw:.1e}"),
    ))
}

fn normalization() -> Outcome {
    let cfg = QuadratureConfig::default().with_rel_tol(1e-10);
    let mut worst = 0.0f64;
    for (q, theta) in [(1.5, 0.8), (2.0, 1.0), (1.0, 0.5)] {
        for nu in [1, 4] {
            let dist = KWDist::new(1, nu, SpdMatrix::from_diagonal(&[1.7])?, KotzParams::new(q, theta, 1.0)?)?;
            let power = nu as f64 / 2.0 - 1.0;
            let scale = mean(&dist)?.matrix()[(0, 0)];
            let g = |a: f64| {
                SpdMatrix::from_diagonal(&[a])
                    .and_then(|m| kw_ln_pdf(&m, &dist))
                    .map_or(f64::NAN, |ln| (ln - power * a.ln()).exp())
            };
            let total = integrate_power_weighted(power, g, scale, &cfg)?.value;
            worst = worst.max((total - 1.0).abs());
        }
    }
    Ok((worst <= 1e-6, format!("max |integral - 1| = {worst:.1e} over 3 (q, theta) x nu in {{1, 4}}")))
}

fn moment_oracle() -> Outcome {
    let dist = KWDist::new(2, 7, sigma2(), KotzParams::new(1.5, 0.7, 1.0)?)?;
    let sampler = KwSampler::new(&dist)?;
    let parts = run_parallel(200_000, &McConfig::new(3, WORKERS), |rng, count| {
        let mut acc = Moments::new(9);
        for _ in 0..count {
            let a = sampler.sample(rng)?;
            let sq = a.matrix() * a.matrix();
            let mut stats: Vec<f64> = a.matrix().iter().copied().collect();
            stats.extend(sq.iter().copied());
            stats.push(a.det().powf(1.5));
            acc.push(&stats);
        }
        Ok(acc)
    });
    let acc = Moments::merged(parts.into_iter().collect::<Result<Vec<_>>>()?).unwrap();
    let mut want: Vec<f64> = mean(&dist)?.matrix().iter().copied().collect();
    want.extend(second_moment(&dist)?.iter().copied());
    want.push(gen_variance_moment(1.5, &dist)?);
    let z = worst_z(&acc, &want);
    Ok((z <= 3.0, format!("largest deviation {z:.2} s.e. over E(A), E(A^2), E|A|^1.5")))
}

fn estimator_suite() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let normal = KWDist::wishart(7, SpdMatrix::from_rows(&[vec![1.0, 0.2, 0.0], vec![0.2, 2.0, 0.4], vec![0.0, 0.4, 0.7]])?)?;
    let c0 = unbiased_constant(&normal)?;
    let r = risk_closed(c0, &normal)?;
    let (want_c0, want_r) = ((normal.n() - normal.p() - 2) as f64, 4.0 / 7.0);
    ok &= (c0 - want_c0).abs() <= 1e-12 * want_c0 && (r - want_r).abs() <= 1e-12 * want_r;
    notes.push(format!("normal c0 err {:.1e}, risk err {:.1e}", (c0 - want_c0).abs(), (r - want_r).abs()));
    for (i, (nu, q, theta, s)) in [(8, 1.5, 0.7, 1.0), (9, 2.0, 1.3, 0.8)].into_iter().enumerate() {
        let dist = KWDist::new(2, nu, sigma2(), KotzParams::new(q, theta, s)?)?;
        let c0 = unbiased_constant(&dist)?;
        let rep = risk_mc(c0, &dist, 100_000, &McConfig::new(40 + i as u64, WORKERS))?;
        let z = (rep.mc_risk - rep.closed_risk).abs() / rep.mc_stderr;
        let lo = risk_closed(0.8 * c0, &dist)?;
        let hi = risk_closed(1.2 * c0, &dist)?;
        ok &= z <= 3.0 && lo > rep.closed_risk && hi > rep.closed_risk;
        notes.push(format!("set {}: mc {z:.2} s.e., 0.8c0/1.2c0 excess {:.2e}/{:.2e}", i + 1, lo - rep.closed_risk, hi - rep.closed_risk));
    }
    Ok((ok, notes.join("; ")))
}

fn zonal_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut trace_err = 0.0f64;
    for _ in 0..20 {
        let p = rng.random_range(1..=4);
        let eigs = eigenvalues_sym(&random_symmetric(&mut rng, p))?;
        let tr: f64 = eigs.iter().sum();
        for k in 0..=6 {
            let total: f64 = table(k, p)?.evaluate_all(&eigs)?.iter().sum();
            trace_err = trace_err.max((total - tr.powi(k as i32)).abs() / tr.abs().powi(k as i32).max(1.0));
        }
    }
    // spectral radii drawn on (0, 0.5], plus the boundary itself
    let mut exp_err = 0.0f64;
    let mut binom_err = 0.0f64;
    let mut binom_pass = 0;
    let mut binom_total = 0;
    for i in 0..40 {
        let p = 1 + i % 3;
        let raw = eigenvalues_sym(&random_symmetric(&mut rng, p))?;
        let r = if i % 4 == 0 { 0.5 } else { rng.random_range(0.01..0.5) };
        let top = raw.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let eigs: Vec<f64> = raw.iter().map(|v| r * v / top).collect();
        let f00 = hypergeometric_pfq(&[], &[], &eigs, 20)?.value;
        exp_err = exp_err.max(rel(f00, eigs.iter().sum::<f64>().exp()));
        let a = (p as f64 - 1.0) / 2.0 + rng.random_range(0.1..2.0);
        let f10 = hypergeometric_pfq(&[a], &[], &eigs, 20)?.value;
        let want = eigs.iter().map(|l| 1.0 - l).product::<f64>().powf(-a);
        let e = rel(f10, want);
        binom_err = binom_err.max(e);
        binom_total += 1;
        binom_pass += usize::from(e <= 1e-8);
    }
    let mut term_ok = true;
    for p in 1..=3 {
        for m in 1..=3usize {
            let eigs = eigenvalues_sym(&random_symmetric(&mut rng, p))?;
            let at = hypergeometric_pfq(&[-(m as f64)], &[], &eigs, p * m)?.value;
            let beyond = hypergeometric_pfq(&[-(m as f64)], &[], &eigs, p * m + 5)?.value;
            let det = eigs.iter().map(|l| 1.0 - l).product::<f64>().powi(m as i32);
            term_ok &= at == beyond && (at - det).abs() <= 1e-10 * det.abs().max(1.0);
        }
    }
    let ok = trace_err <= 1e-10 && exp_err <= 1e-8 && binom_err <= 1e-8 && term_ok;
    Ok((
        ok,
        format!(
            "trace err {trace_err:.1e}; 0F0 err {exp_err:.1e}; 1F0 err {binom_err:.1e} ({binom_pass}/{binom_total} points within 1e-8); termination {}",
            if term_ok { "exact" } else { "broken" }
        ),
    ))
}

fn eigen_cdf_oracle() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let lambda0 = SpdMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 0.6]])?;
    for (set, (q, theta)) in [(1.0, 0.5), (1.5, 0.7)].into_iter().enumerate() {
        let dist = KWDist::new(2, 7, sigma2(), KotzParams::new(q, theta, 1.0)?)?;
        let m = mean(&dist)?;
        let lmin = m.eigenvalues()[0];
        let xs: Vec<f64> = [0.1, 0.25, 0.5, 0.75, 1.0].iter().map(|f| f * lmin).collect();
        let lambdas: Vec<SpdMatrix> = xs.iter().map(|x| lambda0.scaled(*x)).collect::<Result<_>>()?;
        let sampler = KwSampler::new(&dist)?;
        let parts = run_parallel(200_000, &McConfig::new(60 + set as u64, WORKERS), |rng, count| {
            let mut hits = vec![0usize; 10];
            for _ in 0..count {
                let a = sampler.sample(rng)?;
                let smallest = a.eigenvalues()[0];
                for (j, (x, l)) in xs.iter().zip(&lambdas).enumerate() {
                    hits[j] += usize::from(smallest > *x);
                    let diff = a.matrix() - l.matrix();
                    hits[5 + j] += usize::from(eigenvalues_sym(&diff)?[0] > 0.0);
                }
            }
            Ok(hits)
        });
        let mut hits = [0usize; 10];
        for part in parts {
            for (h, v) in hits.iter_mut().zip(part?) {
                *h += v;
            }
        }
        let n = 200_000.0;
        let mut worst = 0.0f64;
        let mut khatri = 0.0f64;
        for (j, (x, l)) in xs.iter().zip(&lambdas).enumerate() {
            for (closed, count) in [(smallest_eig_survival(*x, &dist)?.raw, hits[j]), (prob_greater(l, &dist)?.raw, hits[5 + j])] {
                let freq = count as f64 / n;
                let se = (closed * (1.0 - closed) / n).sqrt().max(1.0 / n);
                worst = worst.max((freq - closed).abs() / se);
            }
            if q == 1.0 {
                let ident = SpdMatrix::identity(2).scaled(*x)?;
                for (lam, closed) in [(&ident, smallest_eig_survival(*x, &dist)?.raw), (l, prob_greater(l, &dist)?.raw)] {
                    khatri = khatri.max((closed - prob_greater_khatri(lam, dist.sigma(), dist.nu())?).abs());
                }
            }
        }
        ok &= worst <= 3.0 && khatri <= 1e-8;
        if q == 1.0 {
            notes.push(format!("q={q}: {worst:.2} binomial s.e., Khatri err {khatri:.1e}"));
        } else {
            notes.push(format!("q={q}: {worst:.2} binomial s.e."));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn mgf_oracle() -> Outcome {
    let omega = DMatrix::from_row_slice(2, 2, &[0.006, -0.002, -0.002, 0.004]);
    let dist = KWDist::new(2, 7, sigma2(), KotzParams::new(1.5, 0.7, 1.0)?)?;
    let c1 = kotz_wishart::kw::c1(&dist)?;
    let radius = eigenvalues_sym(&(&omega * sigma2().matrix()))?.iter().map(|v| v.abs()).fold(0.0, f64::max) * c1;
    let series = mgf(&omega, &dist, 20)?.value;
    let sampler = KwSampler::new(&dist)?;
    let parts = run_parallel(200_000, &McConfig::new(7, WORKERS), |rng, count| {
        let mut acc = Moments::new(1);
        for _ in 0..count {
            let a = sampler.sample(rng)?;
            acc.push(&[(&omega * a.matrix()).trace().exp()]);
        }
        Ok(acc)
    });
    let acc = Moments::merged(parts.into_iter().collect::<Result<Vec<_>>>()?).unwrap();
    let mc_err = rel(series, acc.mean()[0]);

    let mut normal_err = 0.0f64;
    for omega in [omega.clone(), DMatrix::from_row_slice(2, 2, &[0.03, 0.01, 0.01, -0.02])] {
        let dist = KWDist::wishart(7, sigma2())?;
        let got = mgf(&omega, &dist, 25)?.value;
        normal_err = normal_err.max(rel(got, wishart_mgf(&omega, 7.0, &sigma2())?));
    }
    Ok((
        radius < 0.1 && mc_err <= 0.01 && normal_err <= 1e-6,
        format!("degree-1 radius {radius:.3}; series vs MC {mc_err:.1e}; q=1 vs |I-2 Omega Sigma|^(-nu/2) {normal_err:.1e}"),
    ))
}

fn specfun_suite() -> Outcome {
    let mut line = 0.0f64;
    for alpha in [-1.0, -0.3, 0.0, 0.2, 0.45] {
        let idx = WhittakerIndex::new(alpha, 0.5 - alpha);
        for i in 1..=60 {
            let z = 0.15 * i as f64;
            line = line.max(rel(whittaker_w(idx, z)?, z.powf(alpha) * (-z / 2.0).exp()));
        }
    }
    let oracle = QuadratureConfig::default().with_rel_tol(1e-12).with_max_subdivisions(8000);
    let inner = QuadratureConfig::default().with_rel_tol(1e-13);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut mellin, mut meijer, mut moment) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let (b, a, nu, y) =
            (rng.random_range(0.2..5.0), rng.random_range(0.2..3.0), rng.random_range(-1.0..2.0), rng.random_range(0.5..4.0));
        let direct = integrate_power_weighted(y - 1.0, |x: f64| (b + x).powf(nu) * (-a * x).exp(), 1.0 / a, &oracle)?.value;
        mellin = mellin.max(rel(mellin_whittaker(b, a, nu, y)?, direct));
    }
    for _ in 0..20 {
        let c: f64 = rng.random_range(0.3..6.0);
        let rho: f64 = rng.random_range(0.5..4.0);
        let sigma: f64 = rng.random_range(-0.5..0.5);
        let alpha: f64 = rng.random_range(-0.5..0.75);
        let idx = WhittakerIndex::new(alpha, alpha + rng.random_range(0.0..1.0));
        let g = |x: f64| (c + x).powf(-sigma) * (-x / 2.0).exp() * whittaker_w_with(idx, c + x, &inner).unwrap_or(f64::NAN);
        let direct = (-c / 2.0).exp() * c.powf(-rho) / gamma(rho) * integrate_power_weighted(rho - 1.0, g, 1.0 + c, &oracle)?.value;
        meijer = meijer.max(rel(meijer_g3023(c, rho, sigma, idx)?, direct));
    }
    for _ in 0..20 {
        let beta: f64 = rng.random_range(0.05..1.0);
        let idx = WhittakerIndex::new(beta - rng.random_range(0.0..1.0), beta);
        let eps = beta + rng.random_range(0.1..3.0);
        let g = |x: f64| (-x / 2.0).exp() * x.powf(beta - 0.5) * whittaker_w_with(idx, x, &inner).unwrap_or(f64::NAN);
        let direct = integrate_power_weighted(eps - 0.5 - beta, g, 2.0, &oracle)?.value;
        moment = moment.max(rel(whittaker_moment(eps, idx)?, direct));
    }
    Ok((
        line <= 1e-10 && mellin <= 1e-8 && meijer <= 1e-8 && moment <= 1e-8,
        format!("Whittaker line {line:.1e}; Mellin {mellin:.1e}; Meijer G {meijer:.1e}; Whittaker moment {moment:.1e}"),
    ))
}

fn varma_suite() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let budget = VarmaBudget {
        rel_tol: 1e-10,
        ..VarmaBudget::default()
    };
    let ln_pd = |x: &SpdMatrix, n: usize| (n as f64 - x.dim() as f64 - 2.0) / 2.0 * x.ln_det();

    let mut quad = 0.0f64;
    for q in [0.8, 1.5, 2.5] {
        let params = VarmaKernelParams::new(q, 1)?;
        let z = SpdMatrix::from_diagonal(&[1.3])?;
        for n in [4, 7] {
            let num = varma_numeric(|x| ln_pd(x, n).exp(), &z, &params, &budget)?.value;
            quad = quad.max(rel(num, varma_power_det(&z, n, &params)?));
            let kappa = Partition::new(vec![2])?;
            let num = varma_numeric(|x| zonal(&kappa, &x.eigenvalues()).unwrap() * ln_pd(x, n).exp(), &z, &params, &budget)?.value;
            quad = quad.max(rel(num, varma_det_zonal(&z, n, &kappa, &params)?));
        }
    }
    ok &= quad <= 1e-6;
    notes.push(format!("p=1 quadrature {quad:.1e}"));

    let z2 = SpdMatrix::from_rows(&[vec![1.5, 0.2], vec![0.2, 0.8]])?;
    let is_budget = VarmaBudget {
        samples: 100_000,
        mc: McConfig::new(9, WORKERS),
        ..VarmaBudget::default()
    };
    let mut worst_is = 0.0f64;
    for q in [1.5, 0.9] {
        let params = VarmaKernelParams::new(q, 2)?;
        let n = 6;
        let est = varma_numeric(|x| ln_pd(x, n).exp(), &z2, &params, &is_budget)?;
        worst_is = worst_is.max((est.value - varma_power_det(&z2, n, &params)?).abs() / est.stderr);
        let kappa = Partition::new(vec![1, 1])?;
        let est = varma_numeric(|x| zonal(&kappa, &x.eigenvalues()).unwrap() * ln_pd(x, n).exp(), &z2, &params, &is_budget)?;
        worst_is = worst_is.max((est.value - varma_det_zonal(&z2, n, &kappa, &params)?).abs() / est.stderr);
    }
    ok &= worst_is <= 3.0;
    notes.push(format!("p=2 importance sampling {worst_is:.2} s.e."));

    let mut laplace = 0.0f64;
    for p in 1..=3 {
        let z = if p == 1 { SpdMatrix::from_diagonal(&[0.7])? } else { random_spd(&mut ChaCha8Rng::seed_from_u64(p as u64), p, 1.0) };
        let params = VarmaKernelParams::new(1.0, p)?;
        let zinv = z.inverse()?.eigenvalues();
        for n in [p + 2, p + 5] {
            let h = (n as f64 - 1.0) / 2.0;
            let base = multivariate_gamma(p, h)? * z.det().powf(-h);
            laplace = laplace.max(rel(varma_power_det(&z, n, &params)?, base));
            for k in 1..=3 {
                for kappa in partitions(k, p) {
                    let want = base * gen_pochhammer(h, &kappa) * zonal(&kappa, &zinv)?;
                    laplace = laplace.max(rel(varma_det_zonal(&z, n, &kappa, &params)?, want));
                }
            }
        }
    }
    ok &= laplace <= 1e-8;
    notes.push(format!("q=1 Laplace forms {laplace:.1e}"));

    let mut lag = 0.0f64;
    let params = VarmaKernelParams::new(1.0, 1)?;
    for (gamma_, z) in [(0.5, 1.7), (2.0, 0.6), (0.0, 3.0)] {
        let got = varma_laguerre(&SpdMatrix::from_diagonal(&[z])?, gamma_, &Partition::new(vec![1])?, &params)?;
        // int e^{-zx} x^g (g + 1 - x) dx
        let want = gamma(gamma_ + 2.0) * z.powf(-gamma_ - 1.0) * (1.0 - 1.0 / z);
        lag = lag.max(rel(got, want));
    }
    ok &= lag <= 1e-6;
    notes.push(format!("Laguerre q=1 {lag:.1e}"));
    Ok((ok, notes.join("; ")))
}

fn run_kw(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_kw")).args(args).output().expect("kw runs");
    assert!(out.status.success(), "kw {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("kw-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let z = dir.join("z.txt");
    std::fs::write(&z, "1.5 0.2\n0.2 0.8\n").expect("write Z");
    let z = z.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["sample", "--p", "3", "--nu", "6", "--q", "1.5", "--theta", "0.7", "--count", "25"],
        vec!["sample", "--p", "2", "--nu", "5", "--s", "0.8", "--count", "40", "--format", "csv"],
        vec!["risk", "--p", "2", "--nu", "8", "--q", "1.5", "--theta", "0.7", "--mc-samples", "4000"],
        vec!["varma", "power-det", "--z", z, "--q", "1.5", "--n", "6", "--mc-samples", "5000"],
        vec!["varma", "psi", "--z", z, "--a", "1.5", "--c", "2", "--mc-samples", "5000", "--format", "csv"],
        vec!["selftest", "--level", "full", "--mc-samples", "3000"],
    ];
    let mut identical = 0;
    let mut total = 0;
    for cmd in &commands {
        for workers in ["1", "3"] {
            let mut args = cmd.clone();
            args.extend(["--seed", "2024", "--workers", workers]);
            total += 1;
            identical += usize::from(run_kw(&args) == run_kw(&args));
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok((identical == total, format!("{identical}/{total} command runs byte-identical on repeat")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("wishart reduction", wishart_reduction),
        ("normalization", normalization),
        ("moment oracle", moment_oracle),
        ("estimator", estimator_suite),
        ("zonal", zonal_suite),
        ("eigenvalue cdf oracle", eigen_cdf_oracle),
        ("mgf oracle", mgf_oracle),
        ("special functions", specfun_suite),
        ("varma", varma_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {:<22} {} ({:.1}s) {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
