use serde::{Deserialize, Serialize};

use super::partition::Partition;
use super::table::table;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Generalized Pochhammer symbol `(a)_kappa = prod_i (a - (i-1)/2)_{k_i}`.
pub fn gen_pochhammer(a: f64, kappa: &Partition) -> f64 {
    let mut acc = 1.0;
    for (i, &k) in kappa.parts().iter().enumerate() {
        let base = a - i as f64 / 2.0;
        for j in 0..k {
            acc *= base + j as f64;
        }
    }
    acc
}

/// A truncated zonal series with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Contribution of the highest degree included.
    pub last_contribution: f64,
    pub max_degree: usize,
    /// Set when the final three degree contributions did not decrease in
    /// magnitude.
    pub diverging: bool,
}

impl SeriesValue {
    pub fn check_convergence(self) -> Result<Self> {
        if self.diverging {
            return Err(Error::Divergence {
                degree: self.max_degree,
            });
        }
        Ok(self)
    }
}

/// Evaluates `sum_{k <= max_degree} sum_{kappa |- k} coeff(kappa) C_kappa(X) / k!`
/// where `eigs` are the eigenvalues of `X`. Partitions with more parts than
/// `eigs.len()` are skipped since their zonal polynomials vanish.
pub fn zonal_series<F>(eigs: &[f64], max_degree: usize, mut coeff: F) -> Result<SeriesValue>
where
    F: FnMut(&Partition) -> Result<f64>,
{
    if eigs.is_empty() {
        return Err(Error::Domain("zonal series needs at least one eigenvalue".into()));
    }
    let p = eigs.len();
    let mut total = CompensatedSum::new();
    let mut factorial = 1.0f64;
    let mut magnitudes = Vec::with_capacity(max_degree + 1);
    let mut last = 0.0;
    for k in 0..=max_degree {
        if k > 0 {
            factorial *= k as f64;
        }
        let t = table(k, p)?;
        let values = t.evaluate_all(eigs)?;
        let mut degree_sum = CompensatedSum::new();
        for (kappa, c) in t.partitions().iter().zip(values) {
            let w = coeff(kappa)?;
            if w != 0.0 {
                degree_sum.add(w * c);
            }
        }
        last = degree_sum.value() / factorial;
        total.add(last);
        magnitudes.push(last.abs());
    }
    let diverging = magnitudes.len() >= 4 && {
        let tail = &magnitudes[magnitudes.len() - 4..];
        tail[3] > 0.0 && tail.windows(2).all(|w| w[1] >= w[0])
    };
    let value = total.value();
    if !value.is_finite() {
        return Err(Error::Divergence { degree: max_degree });
    }
    Ok(SeriesValue {
        value,
        last_contribution: last,
        max_degree,
        diverging,
    })
}

/// Truncated `pFq(a; b; X)` with `X` given by its eigenvalues.
///
/// The divergence flag is reported, not raised; call
/// [`SeriesValue::check_convergence`] to turn it into an error.
pub fn hypergeometric_pfq(a: &[f64], b: &[f64], eigs: &[f64], max_degree: usize) -> Result<SeriesValue> {
    if a.len() > b.len() + 1 {
        return Err(Error::Precondition(format!(
            "pFq needs p <= q + 1, got p={}, q={}",
            a.len(),
            b.len()
        )));
    }
    zonal_series(eigs, max_degree, |kappa| {
        let num: f64 = a.iter().map(|&ai| gen_pochhammer(ai, kappa)).product();
        if num == 0.0 {
            return Ok(0.0);
        }
        let den: f64 = b.iter().map(|&bi| gen_pochhammer(bi, kappa)).product();
        if den == 0.0 {
            return Err(Error::Domain(format!("lower parameter hits a pole at {kappa}")));
        }
        Ok(num / den)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(gen_pochhammer(2.0, &p(&[1, 1])), 3.0);
        assert_eq!(gen_pochhammer(1.5, &p(&[3])), 1.5 * 2.5 * 3.5);
        assert_eq!(gen_pochhammer(7.0, &Partition::empty()), 1.0);
        // -m with m = 2, p = 2: partitions beyond weight pm = 4 must vanish
        for k in 5..9 {
            for kappa in super::super::partitions(k, 2) {
                assert_eq!(gen_pochhammer(-2.0, &kappa), 0.0, "{kappa}");
            }
        }
    }

    #[test]
    fn exponential_trace() {
        let eigs = [0.3, -0.2, 0.45];
        let s = hypergeometric_pfq(&[], &[], &eigs, 20).unwrap();
        let expected: f64 = eigs.iter().sum::<f64>().exp();
        assert!((s.value - expected).abs() < 1e-12);
        assert!(!s.diverging);
    }

    #[test]
    fn binomial_series() {
        let eigs = [0.4, -0.3];
        let a = 1.7;
        let s = hypergeometric_pfq(&[a], &[], &eigs, 25).unwrap();
        let expected: f64 = eigs.iter().map(|x| (1.0 - x).powf(-a)).product();
        assert!(((s.value - expected) / expected).abs() < 1e-8);
    }

    #[test]
    fn negative_integer_terminates() {
        let eigs = [0.7, 1.9];
        let s = hypergeometric_pfq(&[-2.0], &[], &eigs, 12).unwrap();
        let expected: f64 = eigs.iter().map(|x| (1.0 - x).powi(2)).product();
        assert!((s.value - expected).abs() < 1e-12);
        assert_eq!(s.last_contribution, 0.0);
        assert!(!s.diverging);
    }

    #[test]
    fn divergence_flag() {
        let s = hypergeometric_pfq(&[2.0], &[], &[1.5], 12).unwrap();
        assert!(s.diverging);
        assert!(matches!(s.check_convergence(), Err(Error::Divergence { .. })));
        assert!(hypergeometric_pfq(&[1.0, 1.0], &[], &[0.1], 3).is_err());
    }
}
