//! Dense symmetric and SPD kernels for small matrices.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-12;

/// Lower Cholesky factor; fails when a pivot drops below `1e-12` times the
/// largest diagonal entry.
pub fn cholesky(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = square_dim(a)?;
    let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
    if !(max_diag > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let tol = PIVOT_TOL * max_diag;
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn square_dim(a: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    Ok(a.nrows())
}

pub fn is_symmetric(a: &DMatrix<f64>) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let scale = a.amax().max(1.0);
    (0..a.nrows()).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= SYMMETRY_TOL * scale))
}

/// `(A + A')/2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn trace(a: &DMatrix<f64>) -> f64 {
    a.trace()
}

/// Determinant by LU.
pub fn det(a: &DMatrix<f64>) -> Result<f64> {
    square_dim(a)?;
    Ok(a.clone().lu().determinant())
}

pub fn inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    square_dim(a)?;
    let inv = a.clone().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(inv)
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn eigen_sym(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = square_dim(a)?;
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eigenvalues_sym(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(eigen_sym(a)?.0)
}

/// Eigenvalues of `A B` for symmetric `A` and SPD `B`, via `L' A L` with
/// `B = L L'`; they are real even though `AB` is not symmetric.
pub fn product_eigenvalues(a: &DMatrix<f64>, b: &SpdMatrix) -> Result<Vec<f64>> {
    if a.nrows() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: a.nrows(),
        });
    }
    let l = b.factor();
    eigenvalues_sym(&(l.transpose() * a * l))
}

/// Strict Loewner order: `A - B` positive definite.
pub fn loewner_greater(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    a.shape() == b.shape() && cholesky(&symmetrize(&(a - b))).is_ok()
}

/// A symmetric positive-definite matrix with its Cholesky factor.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    factor: DMatrix<f64>,
    inverse: OnceLock<DMatrix<f64>>,
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl SpdMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        square_dim(&matrix)?;
        if !is_symmetric(&matrix) {
            return Err(Error::Domain("matrix is not symmetric".into()));
        }
        let matrix = symmetrize(&matrix);
        let factor = cholesky(&matrix)?;
        Ok(Self {
            matrix,
            factor,
            inverse: OnceLock::new(),
        })
    }

    pub fn identity(p: usize) -> Self {
        Self::new(DMatrix::identity(p, p)).expect("identity is SPD")
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Lower Cholesky factor `L` with `L L' = A`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * self.factor.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    pub fn det(&self) -> f64 {
        self.factor.diagonal().iter().product::<f64>().powi(2)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Inverse through the Cholesky factor; cached.
    pub fn inverse_matrix(&self) -> &DMatrix<f64> {
        self.inverse.get_or_init(|| {
            let n = self.dim();
            let linv = self
                .factor
                .solve_lower_triangular(&DMatrix::identity(n, n))
                .expect("Cholesky factor has a positive diagonal");
            symmetrize(&(linv.transpose() * linv))
        })
    }

    pub fn inverse(&self) -> Result<SpdMatrix> {
        SpdMatrix::new(self.inverse_matrix().clone())
    }

    /// Unique SPD square root from the eigen-decomposition.
    pub fn sqrt(&self) -> SpdMatrix {
        let (vals, vecs) = eigen_sym(&self.matrix).expect("square");
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            vals.len(),
            vals.iter().map(|v| v.max(0.0).sqrt()),
        ));
        let root = symmetrize(&(&vecs * d * vecs.transpose()));
        SpdMatrix::new(root).expect("square root of an SPD matrix is SPD")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_sym(&self.matrix).expect("square")
    }

    pub fn scaled(&self, c: f64) -> Result<SpdMatrix> {
        SpdMatrix::new(&self.matrix * c)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.matrix)
    }
}


pub fn sqrt_spd(a: &SpdMatrix) -> SpdMatrix {
    a.sqrt()
}

impl Serialize for SpdMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpdMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SpdMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("matrix has no rows".into()));
    }
    let m = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: bad.len(),
        });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse("matrix has non-finite entries".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// JSON matrix form `{"dim": p, "rows": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            dim: m.nrows(),
            rows: matrix_rows(m),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        let m = matrix_from_rows(&self.rows)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
            });
        }
        Ok(m)
    }
}

/// Parses a square matrix given either as JSON (`{"dim","rows"}` or a bare
/// array of rows) or as whitespace-separated rows, one per line.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let j: MatrixJson = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        return j.to_matrix();
    }
    if trimmed.starts_with('[') {
        let rows: Vec<Vec<f64>> = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        return matrix_from_rows(&rows);
    }
    let rows = trimmed
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    matrix_from_rows(&rows)
}

/// Whitespace-separated rows with 17 significant digits.
pub fn format_matrix_text(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in m.row_iter() {
        let line: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
