//! Generalized binomial coefficients and Laguerre polynomials of matrix
//! argument.
//!
//! The coefficients are defined only implicitly, by
//! `C_kappa(I + Y) / C_kappa(I) = sum_{o} binom(kappa, o) C_o(Y) / C_o(I)`,
//! so they are recovered numerically: both sides are evaluated at random
//! diagonal `Y` with distinct entries and the overdetermined linear system is
//! solved in the least-squares sense.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hypergeom::gen_pochhammer;
use super::partition::{partitions, Partition};
use super::table::zonal;
use crate::error::{Error, Result};

const MAX_CONDITION: f64 = 1e12;
const ATTEMPTS: u64 = 5;

/// All `binom(kappa, o)` for `|o| <= |kappa|` and `len(o) <= len(kappa)`.
#[derive(Debug, Clone)]
pub struct BinomialRow {
    values: HashMap<Partition, f64>,
    /// Condition number of the column-scaled system that produced the row.
    pub condition: f64,
}

impl BinomialRow {
    pub fn get(&self, omicron: &Partition) -> Option<f64> {
        self.values.get(omicron).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, f64)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }
}

fn solve_row(kappa: &Partition) -> Result<BinomialRow> {
    let m = kappa.len().max(1);
    let k = kappa.weight();
    let unknowns: Vec<Partition> = (0..=k).flat_map(|s| partitions(s, m)).collect();
    let n = unknowns.len();
    let ones = vec![1.0; m];
    let norm_kappa = zonal(kappa, &ones)?;
    let norms = unknowns.iter().map(|o| zonal(o, &ones)).collect::<Result<Vec<_>>>()?;

    // FNV-1a over the parts, so point sets do not depend on the std hasher
    let base_seed = kappa
        .parts()
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &x| (h ^ x as u64).wrapping_mul(0x0100_0000_01b3));
    let rows = 2 * n + 4;
    let mut last_cond = f64::INFINITY;

    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut design = DMatrix::<f64>::zeros(rows, n);
        let mut rhs = DVector::<f64>::zeros(rows);
        for r in 0..rows {
            let y: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let shifted: Vec<f64> = y.iter().map(|v| 1.0 + v).collect();
            rhs[r] = zonal(kappa, &shifted)? / norm_kappa;
            for (c, o) in unknowns.iter().enumerate() {
                design[(r, c)] = zonal(o, &y)? / norms[c];
            }
        }
        let scales: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
        for (c, s) in scales.iter().enumerate() {
            if *s == 0.0 {
                return Err(Error::SingularSystem(format!("basis column {} vanishes", unknowns[c])));
            }
            design.column_mut(c).scale_mut(1.0 / s);
        }
        let svd = design.svd(true, true);
        let sv = &svd.singular_values;
        let cond = sv.max() / sv.min();
        last_cond = cond;
        if !(cond <= MAX_CONDITION) {
            continue;
        }
        let sol = svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::SingularSystem(e.to_string()))?;
        let values = unknowns
            .iter()
            .zip(sol.iter().zip(&scales))
            .map(|(o, (x, s))| (o.clone(), x / s))
            .collect();
        return Ok(BinomialRow { values, condition: cond });
    }
    Err(Error::SingularSystem(format!(
        "binomial system for {kappa} stayed ill-conditioned (cond {last_cond:.3e}) after {ATTEMPTS} point sets"
    )))
}

type Slot = Arc<OnceLock<std::result::Result<Arc<BinomialRow>, Error>>>;

/// Cached row of binomial coefficients for `kappa`.
pub fn gen_binomials(kappa: &Partition) -> Result<Arc<BinomialRow>> {
    static CACHE: OnceLock<Mutex<HashMap<Partition, Slot>>> = OnceLock::new();
    let slot = {
        let mut map = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
        map.entry(kappa.clone()).or_default().clone()
    };
    slot.get_or_init(|| solve_row(kappa).map(Arc::new)).clone()
}

/// Generalized binomial coefficient `binom(kappa, o)`.
pub fn gen_binomial(kappa: &Partition, omicron: &Partition) -> Result<f64> {
    if omicron.weight() > kappa.weight() {
        return Err(Error::Domain(format!("binomial needs |o| <= |kappa|, got {omicron} and {kappa}")));
    }
    if omicron.len() > kappa.len() {
        return Ok(0.0);
    }
    Ok(gen_binomials(kappa)?.get(omicron).unwrap_or(0.0))
}

/// Generalized Laguerre polynomial `L_kappa^gamma(X)`, `X` given by its
/// eigenvalues:
/// `(gamma+t)_kappa C_kappa(I) sum_o binom(kappa,o) C_o(-X) / ((gamma+t)_o C_o(I))`, `t = (p+1)/2`.
pub fn gen_laguerre(gamma: f64, kappa: &Partition, eigs: &[f64]) -> Result<f64> {
    if !(gamma > -1.0) {
        return Err(Error::Domain(format!("Laguerre polynomial needs gamma > -1, got {gamma}")));
    }
    let p = eigs.len();
    if p == 0 {
        return Err(Error::Domain("Laguerre polynomial needs at least one eigenvalue".into()));
    }
    let t = (p as f64 + 1.0) / 2.0;
    let ones = vec![1.0; p];
    let c_kappa_i = zonal(kappa, &ones)?;
    if c_kappa_i == 0.0 {
        return Ok(0.0);
    }
    let neg: Vec<f64> = eigs.iter().map(|x| -x).collect();
    let row = gen_binomials(kappa)?;
    let mut terms: Vec<(&Partition, f64)> = row.iter().collect();
    terms.sort_by(|a, b| a.0.weight().cmp(&b.0.weight()).then(b.0.cmp(a.0)));
    let mut acc = crate::sum::CompensatedSum::new();
    for (o, b) in terms {
        if o.len() > p {
            continue;
        }
        let c_o_i = zonal(o, &ones)?;
        acc.add(b * zonal(o, &neg)? / (gen_pochhammer(gamma + t, o) * c_o_i));
    }
    Ok(gen_pochhammer(gamma + t, kappa) * c_kappa_i * acc.value())
}
