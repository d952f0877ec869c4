//! Thin dense complex linear algebra layer over `faer`.
//!
//! Everything here works on `faer::Mat<C64>` for matrices and plain
//! `Vec<C64>` for vectors; the ROM-sized problems are tiny and the
//! conversions are not worth abstracting further.

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::error::{Error, Result};
use crate::C64;

pub type CMat = Mat<C64>;

pub fn zeros(n: usize, m: usize) -> CMat {
    Mat::zeros(n, m)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn from_rows(rows: &[Vec<C64>]) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("ragged rows".into()));
    }
    Ok(Mat::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn to_rows(a: &CMat) -> Vec<Vec<C64>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect()).collect()
}

/// `sum_i x_i y_i` without conjugation.
pub fn dot_t(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `sum_i conj(x_i) y_i`.
pub fn dot_h(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(a: &CMat, x: &[C64]) -> Vec<C64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

pub fn frobenius(a: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn all_finite(x: &[C64]) -> bool {
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Dense LU with partial pivoting, kept around for repeated solves.
pub struct DenseLu {
    lu: faer::linalg::solvers::PartialPivLu<C64>,
    n: usize,
    a_norm: f64,
}

impl DenseLu {
    pub fn new(a: &CMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "LU of a {}x{} matrix",
                a.nrows(),
                a.ncols()
            )));
        }
        let lu = a.partial_piv_lu();
        let n = a.nrows();
        let a_norm = frobenius(a);
        // A zero pivot in U means the matrix is exactly singular.
        let u = lu.U();
        for i in 0..n {
            let p = u[(i, i)];
            if p.norm() == 0.0 || !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::Singular(format!("zero pivot at {i}")));
            }
        }
        Ok(Self { lu, n, a_norm })
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch(format!("rhs length {} != {}", b.len(), self.n)));
        }
        let mut rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        let x: Vec<C64> = (0..self.n).map(|i| rhs[(i, 0)]).collect();
        if !all_finite(&x) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        Ok(x)
    }

    pub fn solve_mat(&self, b: &CMat) -> Result<CMat> {
        let x = self.lu.solve(b.as_ref());
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                let v = x[(i, j)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Singular("non-finite solution".into()));
                }
            }
        }
        Ok(x)
    }

    pub fn norm(&self) -> f64 {
        self.a_norm
    }
}

pub fn solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    DenseLu::new(a)?.solve(b)
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    let svd = a.svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
    Ok(svd.S().column_vector().iter().map(|s| s.re).collect())
}

/// 2-norm condition number from singular values; `inf` for singular input.
pub fn condition_number(a: &CMat) -> Result<f64> {
    let s = singular_values(a)?;
    let max = s.first().copied().unwrap_or(0.0);
    let min = s.last().copied().unwrap_or(0.0);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// Condition number after two-sided diagonal equilibration
/// `D_r A D_c`, with `D_r` and `D_c` the inverse square roots of the row
/// and column 2-norms. Rescaling the state of a realization leaves this
/// estimate unchanged, so it measures how singular a pencil really is.
pub fn scaled_condition_number(a: &CMat) -> Result<f64> {
    let (n, m) = (a.nrows(), a.ncols());
    let row: Vec<f64> = (0..n).map(|i| (0..m).map(|j| a[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    let col: Vec<f64> = (0..m).map(|j| (0..n).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    if row.iter().chain(&col).any(|&v| v == 0.0) {
        return Ok(f64::INFINITY);
    }
    let scaled = CMat::from_fn(n, m, |i, j| a[(i, j)] / (row[i] * col[j]).sqrt());
    condition_number(&scaled)
}

/// Right singular vectors for the smallest singular value, plus the two
/// smallest singular values (the second is `inf` for a single column).
pub fn min_right_singular_vector(a: &CMat) -> Result<(Vec<C64>, f64, f64)> {
    let m = a.ncols();
    // faer's full SVD of a wide matrix still returns an m x m V, which is
    // what we want when rows < cols (null space is nontrivial).
    let svd = a.svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|v| v.re).collect();
    let v = svd.V();
    // Singular values sorted non-increasing; pad with zeros for wide input.
    let mut sv = vec![0.0; m];
    for (k, val) in s.iter().enumerate().take(m) {
        sv[k] = *val;
    }
    let last = m - 1;
    let smin = sv[last];
    let snext = if m >= 2 { sv[last - 1] } else { f64::INFINITY };
    let w = (0..m).map(|i| v[(i, last)]).collect();
    Ok((w, smin, snext))
}

/// Eigen-decomposition of a general complex matrix: eigenvalues and the
/// matrix of right eigenvectors (columns).
pub fn eigen(a: &CMat) -> Result<(Vec<C64>, CMat)> {
    let e = a.eigen().map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let vals: Vec<C64> = e.S().column_vector().iter().copied().collect();
    let vecs = e.U().to_owned();
    if !all_finite(&vals) {
        return Err(Error::EigenFailure("non-finite eigenvalues".into()));
    }
    Ok((vals, vecs))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    a.eigenvalues().map_err(|e| Error::EigenFailure(format!("{e:?}")))
}

/// Homogeneous QZ eigenvalues `(alpha_j, beta_j)` of `A x = lambda E x`
/// (`lambda = alpha / beta`) and the right eigenvectors (columns).
pub fn generalized_eigen_homogeneous(a: &CMat, e: &CMat) -> Result<(Vec<C64>, Vec<C64>, CMat)> {
    use faer::diag::Diag;
    use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
    use faer::linalg::evd::ComputeEigenvectors;
    use faer::linalg::gevd;
    use faer::Par;

    let n = a.nrows();
    if a.ncols() != n || e.nrows() != n || e.ncols() != n {
        return Err(Error::DimensionMismatch("pencil matrices must be square and of equal size".into()));
    }
    let par = Par::Seq;
    // The eigenvector back-substitution needs n x 1 temporaries that
    // `gevd_scratch` does not account for, so reserve them explicitly.
    let req = gevd::gevd_scratch::<C64>(n, ComputeEigenvectors::No, ComputeEigenvectors::Yes, par, Default::default())
        .and(faer::linalg::temp_mat_scratch::<C64>(n, 2))
        .and(StackReq::new::<C64>(4 * n + 16));
    let mut buf = MemBuffer::new(req);
    let mut aa = a.clone();
    let mut ee = e.clone();
    let mut alpha = Diag::<C64>::zeros(n);
    let mut beta = Diag::<C64>::zeros(n);
    let mut u = Mat::<C64>::zeros(n, n);
    gevd::gevd_cplx(
        aa.as_mut(),
        ee.as_mut(),
        alpha.as_mut(),
        beta.as_mut(),
        None,
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|err| Error::EigenFailure(format!("{err:?}")))?;
    let alpha: Vec<C64> = alpha.column_vector().iter().copied().collect();
    let beta: Vec<C64> = beta.column_vector().iter().copied().collect();
    if !all_finite(&alpha) || !all_finite(&beta) {
        return Err(Error::EigenFailure("non-finite QZ output".into()));
    }
    Ok((alpha, beta, u))
}

/// QZ-based eigen-decomposition of the pencil `A x = lambda E x`:
/// eigenvalues and right eigenvectors (columns). Infinite eigenvalues
/// (vanishing `beta`) are reported as an error.
pub fn generalized_eigen(a: &CMat, e: &CMat) -> Result<(Vec<C64>, CMat)> {
    let (alpha, beta, u) = generalized_eigen_homogeneous(a, e)?;
    let mut vals = Vec::with_capacity(alpha.len());
    for (i, (al, be)) in alpha.iter().zip(&beta).enumerate() {
        if be.norm() == 0.0 || be.norm() <= f64::EPSILON * al.norm() {
            return Err(Error::EigenFailure(format!("infinite eigenvalue at index {i}")));
        }
        vals.push(al / be);
    }
    if !all_finite(&vals) {
        return Err(Error::EigenFailure("non-finite eigenvalues".into()));
    }
    Ok((vals, u))
}
