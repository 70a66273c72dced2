//! Exact zonal polynomial tables in the monomial symmetric basis.
//!
//! `C_kappa = sum_{lambda <= kappa} c[kappa][lambda] M_lambda`, with the
//! off-diagonal coefficients from James' eigen-operator recurrence
//!
//! ```text
//! c[kappa][lambda] = sum_{i<j, 1<=t<=l_j} ((l_i + t) - (l_j - t)) c[kappa][mu] / (rho_kappa - rho_lambda)
//! ```
//!
//! where `mu` is `lambda` with `l_i + t, l_j - t` re-sorted, and the leading
//! coefficient fixed so that the `C_kappa` of one degree sum to `(tr X)^k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::partition::{partitions, Partition};
use crate::error::{Error, Result};

/// Largest degree for which tables are built on demand.
pub const MAX_TABLE_DEGREE: usize = 40;

const FORMAT_HEADER: &str = "# zonal-table v1";

#[derive(Debug, Clone)]
pub struct ZonalTable {
    degree: usize,
    max_parts: usize,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    exact: Vec<Vec<BigRational>>,
    coeffs: Vec<Vec<f64>>,
}

impl ZonalTable {
    /// Builds the table of all `C_kappa` with `|kappa| = degree` and at most
    /// `max_parts` parts.
    pub fn build(degree: usize, max_parts: usize) -> Result<Self> {
        if degree > MAX_TABLE_DEGREE {
            return Err(Error::UnsupportedDegree {
                requested: degree,
                max: MAX_TABLE_DEGREE,
            });
        }
        let max_parts = max_parts.clamp(1, degree.max(1));
        let parts = partitions(degree, max_parts);
        let index: HashMap<Partition, usize> = parts.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let n = parts.len();
        let mut exact = vec![vec![BigRational::zero(); n]; n];

        for (i, kappa) in parts.iter().enumerate() {
            exact[i][i] = leading_coefficient(kappa);
            let rho_kappa = kappa.rho();
            for j in i + 1..n {
                let lambda = &parts[j];
                if !lambda.is_dominated_by(kappa) {
                    continue;
                }
                let l = lambda.parts();
                let mut acc_q = BigRational::zero();
                for a in 0..l.len() {
                    for b in a + 1..l.len() {
                        for t in 1..=l[b] {
                            let mut mu: Vec<u32> = l.to_vec();
                            mu[a] += t;
                            mu[b] -= t;
                            mu.sort_unstable_by(|x, y| y.cmp(x));
                            while mu.last() == Some(&0) {
                                mu.pop();
                            }
                            let m = index[&Partition::from_sorted(mu)];
                            if m < i {
                                continue;
                            }
                            let factor = (l[a] + t) as i64 - (l[b] - t) as i64;
                            if exact[i][m].is_zero() {
                                continue;
                            }
                            acc_q += &exact[i][m] * BigRational::from_integer(BigInt::from(factor));
                        }
                    }
                }
                let denom = rho_kappa - lambda.rho();
                debug_assert!(denom > 0);
                exact[i][j] = acc_q / BigRational::from_integer(BigInt::from(denom));
            }
        }

        let coeffs = exact
            .iter()
            .map(|row| row.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        Ok(Self {
            degree,
            max_parts,
            partitions: parts,
            index,
            exact,
            coeffs,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn max_parts(&self) -> usize {
        self.max_parts
    }

    /// Partitions indexing the rows, in reverse lexicographic order.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Exact coefficient of `M_lambda` in `C_kappa`.
    pub fn coefficient(&self, kappa: &Partition, lambda: &Partition) -> Option<&BigRational> {
        let i = *self.index.get(kappa)?;
        let j = *self.index.get(lambda)?;
        Some(&self.exact[i][j])
    }

    fn check_eigs(&self, eigs: &[f64]) -> Result<()> {
        if eigs.len() < self.max_parts.min(self.degree) {
            return Err(Error::DimensionMismatch {
                expected: self.max_parts,
                found: eigs.len(),
            });
        }
        Ok(())
    }

    /// `C_kappa` at the symmetric matrix with eigenvalues `eigs`.
    pub fn evaluate(&self, kappa: &Partition, eigs: &[f64]) -> Result<f64> {
        self.check_eigs(eigs)?;
        let i = *self.index.get(kappa).ok_or_else(|| {
            Error::Domain(format!(
                "{kappa} is not in the degree {} table with at most {} parts",
                self.degree, self.max_parts
            ))
        })?;
        Ok(self.partitions[i..]
            .iter()
            .zip(&self.coeffs[i][i..])
            .filter(|(_, c)| **c != 0.0)
            .map(|(lambda, c)| c * monomial(lambda, eigs))
            .sum())
    }

    /// All `C_kappa` of this degree, in table order.
    pub fn evaluate_all(&self, eigs: &[f64]) -> Result<Vec<f64>> {
        self.check_eigs(eigs)?;
        let m: Vec<f64> = self.partitions.iter().map(|l| monomial(l, eigs)).collect();
        Ok(self
            .coeffs
            .iter()
            .map(|row| row.iter().zip(&m).map(|(c, v)| c * v).sum())
            .collect())
    }

    /// Plain-text export, one line per nonzero `(degree, kappa, lambda, num, den)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{FORMAT_HEADER} degree={} max_parts={}\n", self.degree, self.max_parts);
        for (i, kappa) in self.partitions.iter().enumerate() {
            for (j, lambda) in self.partitions.iter().enumerate().skip(i) {
                let c = &self.exact[i][j];
                if c.is_zero() {
                    continue;
                }
                out.push_str(&format!(
                    "{} {} {} {} {}\n",
                    self.degree,
                    text_partition(kappa),
                    text_partition(lambda),
                    c.numer(),
                    c.denom()
                ));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty zonal table".into()))?;
        let rest = header
            .strip_prefix(FORMAT_HEADER)
            .ok_or_else(|| Error::Parse(format!("unknown zonal table header {header:?}")))?;
        let mut degree = None;
        let mut max_parts = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("degree", v)) => degree = v.parse::<usize>().ok(),
                Some(("max_parts", v)) => max_parts = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("bad header field {field:?}"))),
            }
        }
        let (degree, max_parts) = degree
            .zip(max_parts)
            .ok_or_else(|| Error::Parse("header needs degree= and max_parts=".into()))?;
        let parts = partitions(degree, max_parts);
        let index: HashMap<Partition, usize> = parts.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let n = parts.len();
        let mut exact = vec![vec![BigRational::zero(); n]; n];
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("zonal table line {}: {line:?}", lineno + 2));
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 || f[0].parse::<usize>().ok() != Some(degree) {
                return Err(bad());
            }
            let kappa: Partition = parse_text_partition(f[1])?;
            let lambda: Partition = parse_text_partition(f[2])?;
            let num: BigInt = f[3].parse().map_err(|_| bad())?;
            let den: BigInt = f[4].parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            let (i, j) = match (index.get(&kappa), index.get(&lambda)) {
                (Some(&i), Some(&j)) => (i, j),
                _ => return Err(bad()),
            };
            exact[i][j] = BigRational::new(num, den);
        }
        let coeffs = exact
            .iter()
            .map(|row| row.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .collect();
        Ok(Self {
            degree,
            max_parts,
            partitions: parts,
            index,
            exact,
            coeffs,
        })
    }
}

fn text_partition(k: &Partition) -> String {
    if k.is_empty() {
        "-".into()
    } else {
        k.parts().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

fn parse_text_partition(s: &str) -> Result<Partition> {
    s.parse()
}

/// `2^k k! / prod_{cells} (leg + 2 (arm + 1))`.
fn leading_coefficient(kappa: &Partition) -> BigRational {
    let k = kappa.weight();
    let mut num = BigInt::one();
    for i in 1..=k {
        num *= BigInt::from(2 * i);
    }
    let mut den = BigInt::one();
    let parts = kappa.parts();
    for (row, &len) in parts.iter().enumerate() {
        for col in 0..len as usize {
            let arm = len as usize - col - 1;
            let leg = parts[row + 1..].iter().filter(|&&r| r as usize > col).count();
            den *= BigInt::from(leg + 2 * (arm + 1));
        }
    }
    BigRational::new(num, den)
}

/// Monomial symmetric function `M_lambda(x)`: sum over distinct
/// rearrangements of the zero-padded exponent vector.
pub fn monomial(lambda: &Partition, x: &[f64]) -> f64 {
    let p = x.len();
    if lambda.len() > p {
        return 0.0;
    }
    let mut exps: Vec<u32> = (0..p).map(|i| lambda.part(i)).collect();
    exps.sort_unstable();
    let mut total = 0.0;
    loop {
        total += x.iter().zip(&exps).map(|(xi, &e)| xi.powi(e as i32)).product::<f64>();
        if !next_permutation(&mut exps) {
            break;
        }
    }
    total
}

fn next_permutation(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

type Slot = Arc<OnceLock<std::result::Result<Arc<ZonalTable>, Error>>>;

fn cache() -> &'static Mutex<HashMap<(usize, usize), Slot>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Slot>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared table for `degree` with at most `max_parts` parts; built once per
/// process and reused.
pub fn table(degree: usize, max_parts: usize) -> Result<Arc<ZonalTable>> {
    if degree > MAX_TABLE_DEGREE {
        return Err(Error::UnsupportedDegree {
            requested: degree,
            max: MAX_TABLE_DEGREE,
        });
    }
    let key = (degree, max_parts.clamp(1, degree.max(1)));
    let slot = {
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    };
    slot.get_or_init(|| ZonalTable::build(key.0, key.1).map(Arc::new)).clone()
}

/// Zonal polynomial `C_kappa(X)` from the eigenvalues of `X`.
pub fn zonal(kappa: &Partition, eigs: &[f64]) -> Result<f64> {
    if kappa.len() > eigs.len() {
        return Ok(0.0);
    }
    let k = kappa.weight();
    table(k, eigs.len())?.evaluate(kappa, eigs)
}
