use std::collections::BTreeMap;
use std::sync::OnceLock;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::{Analyticity, TransferFunction};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, DenseLu};
use crate::C64;

/// Relative residual bound for resolvent solves.
const RESOLVENT_RESIDUAL_TOL: f64 = 1e-10;

/// Square sparse matrix in CSC form with every diagonal entry stored, so
/// that shifted matrices `alpha I - beta A` share one sparsity pattern.
pub struct SparseMatrix {
    n: usize,
    symbolic: SymbolicSparseColMat<usize>,
    vals: Vec<C64>,
    diag: Vec<usize>,
    lu_symbolic: OnceLock<std::result::Result<SymbolicLu<usize>, String>>,
}

impl std::fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseMatrix").field("n", &self.n).field("nnz", &self.vals.len()).finish()
    }
}

impl Clone for SparseMatrix {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            symbolic: self.symbolic.clone(),
            vals: self.vals.clone(),
            diag: self.diag.clone(),
            lu_symbolic: OnceLock::new(),
        }
    }
}

impl SparseMatrix {
    /// Duplicate entries are summed.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let mut cols: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); n];
        for &(i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            *cols[j].entry(i).or_default() += v;
        }
        for (j, col) in cols.iter_mut().enumerate() {
            col.entry(j).or_default();
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        let mut diag = Vec::with_capacity(n);
        col_ptr.push(0);
        for (j, col) in cols.iter().enumerate() {
            for (&i, &v) in col {
                if i == j {
                    diag.push(row_idx.len());
                }
                row_idx.push(i);
                vals.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        Ok(Self { n, symbolic, vals, diag, lu_symbolic: OnceLock::new() })
    }

    pub fn from_dense(a: &CMat) -> Result<Self> {
        let mut t = Vec::new();
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                if a[(i, j)] != C64::new(0.0, 0.0) {
                    t.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(a.nrows(), &t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let col_ptr = self.symbolic.col_ptr();
        let rows = &self.symbolic.row_idx()[col_ptr[j]..col_ptr[j + 1]];
        match rows.binary_search(&i) {
            Ok(k) => self.vals[col_ptr[j] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let col_ptr = self.symbolic.col_ptr();
        let row_idx = self.symbolic.row_idx();
        let mut out = Vec::with_capacity(self.vals.len());
        for j in 0..self.n {
            for k in col_ptr[j]..col_ptr[j + 1] {
                out.push((row_idx[k], j, self.vals[k]));
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let col_ptr = self.symbolic.col_ptr();
        let row_idx = self.symbolic.row_idx();
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for j in 0..self.n {
            let xj = x[j];
            for k in col_ptr[j]..col_ptr[j + 1] {
                y[row_idx[k]] += self.vals[k] * xj;
            }
        }
        y
    }

    pub fn to_dense(&self) -> CMat {
        let mut a = linalg::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            a[(i, j)] = v;
        }
        a
    }

    fn shifted_values(&self, alpha: C64, beta: C64) -> Vec<C64> {
        let mut v: Vec<C64> = self.vals.iter().map(|a| -beta * a).collect();
        for &k in &self.diag {
            v[k] += alpha;
        }
        v
    }

    fn lu_symbolic(&self) -> Result<SymbolicLu<usize>> {
        self.lu_symbolic
            .get_or_init(|| SymbolicLu::try_new(self.symbolic.as_ref()).map_err(|e| format!("{e:?}")))
            .clone()
            .map_err(Error::Singular)
    }

    /// Numeric LU of `alpha I - beta A`, reusing the cached symbolic analysis.
    fn shifted_lu(&self, alpha: C64, beta: C64) -> Result<Lu<usize, C64>> {
        let symbolic = self.lu_symbolic()?;
        let vals = self.shifted_values(alpha, beta);
        let mat = SparseColMatRef::new(self.symbolic.as_ref(), &vals);
        Lu::try_new_with_symbolic(symbolic, mat).map_err(|e| Error::Singular(format!("{e:?}")))
    }
}

#[derive(Debug, Clone)]
pub enum SystemMatrix {
    Dense(CMat),
    Sparse(SparseMatrix),
}

impl SystemMatrix {
    pub fn n(&self) -> usize {
        match self {
            SystemMatrix::Dense(a) => a.nrows(),
            SystemMatrix::Sparse(a) => a.n(),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        match self {
            SystemMatrix::Dense(a) => linalg::matvec(a, x),
            SystemMatrix::Sparse(a) => a.matvec(x),
        }
    }

    pub fn to_dense(&self) -> CMat {
        match self {
            SystemMatrix::Dense(a) => a.clone(),
            SystemMatrix::Sparse(a) => a.to_dense(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, SystemMatrix::Sparse(_))
    }
}

enum Factor {
    Dense(DenseLu),
    Sparse(Lu<usize, C64>),
}

/// A factorization of `alpha I - beta A`, solved against repeatedly.
pub struct ShiftedSolver<'a> {
    a: &'a SystemMatrix,
    alpha: C64,
    beta: C64,
    factor: Factor,
}

impl<'a> ShiftedSolver<'a> {
    pub fn new(a: &'a SystemMatrix, alpha: C64, beta: C64) -> Result<Self> {
        let factor = match a {
            SystemMatrix::Dense(m) => {
                let n = m.nrows();
                let shifted = Mat::from_fn(n, n, |i, j| {
                    let v = -beta * m[(i, j)];
                    if i == j {
                        v + alpha
                    } else {
                        v
                    }
                });
                Factor::Dense(DenseLu::new(&shifted)?)
            }
            SystemMatrix::Sparse(s) => Factor::Sparse(s.shifted_lu(alpha, beta)?),
        };
        Ok(Self { a, alpha, beta, factor })
    }

    /// Solve without a residual check.
    pub fn solve_unchecked(&self, b: &[C64]) -> Result<Vec<C64>> {
        match &self.factor {
            Factor::Dense(lu) => lu.solve(b),
            Factor::Sparse(lu) => {
                let n = b.len();
                let mut rhs = Mat::from_fn(n, 1, |i, _| b[i]);
                lu.solve_in_place(rhs.as_mut());
                let x: Vec<C64> = (0..n).map(|i| rhs[(i, 0)]).collect();
                if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::Singular("non-finite sparse solution".into()));
                }
                Ok(x)
            }
        }
    }

    pub fn residual(&self, x: &[C64], b: &[C64]) -> f64 {
        let ax = self.a.matvec(x);
        let r: Vec<C64> =
            x.iter().zip(&ax).zip(b).map(|((xi, axi), bi)| self.alpha * xi - self.beta * axi - bi).collect();
        linalg::norm2(&r)
    }

    /// Solve and reject solutions whose residual exceeds `1e-10 ||b||`.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let x = self.solve_unchecked(b).map_err(|e| Error::SingularResolvent {
            z: self.alpha,
            detail: e.to_string(),
        })?;
        let res = self.residual(&x, b);
        let bn = linalg::norm2(b);
        if res > RESOLVENT_RESIDUAL_TOL * bn {
            return Err(Error::SingularResolvent {
                z: self.alpha,
                detail: format!("residual {res:e} exceeds {:e}", RESOLVENT_RESIDUAL_TOL * bn),
            });
        }
        Ok(x)
    }
}

/// SISO state-space model `G(z) = c^* (zI - A)^{-1} b + d`.
#[derive(Debug, Clone)]
pub struct StateSpaceModel {
    name: String,
    a: SystemMatrix,
    b: Vec<C64>,
    c: Vec<C64>,
    d: C64,
}

impl StateSpaceModel {
    pub fn new(a: SystemMatrix, b: Vec<C64>, c: Vec<C64>, d: C64) -> Result<Self> {
        let n = a.n();
        if let SystemMatrix::Dense(m) = &a {
            if m.nrows() != m.ncols() {
                return Err(Error::DimensionMismatch(format!("A is {}x{}", m.nrows(), m.ncols())));
            }
        }
        if b.len() != n || c.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}x{n} but b has {} and c has {} entries",
                b.len(),
                c.len()
            )));
        }
        Ok(Self { name: "state-space".into(), a, b, c, d })
    }

    pub fn dense(a: CMat, b: Vec<C64>, c: Vec<C64>, d: C64) -> Result<Self> {
        Self::new(SystemMatrix::Dense(a), b, c, d)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &SystemMatrix {
        &self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn c(&self) -> &[C64] {
        &self.c
    }

    pub fn d(&self) -> C64 {
        self.d
    }

    /// Same model with a dense copy of `A`.
    pub fn to_dense_model(&self) -> Self {
        Self { a: SystemMatrix::Dense(self.a.to_dense()), ..self.clone() }
    }

    /// Same model with sparse storage of `A`.
    pub fn to_sparse_model(&self) -> Result<Self> {
        let a = match &self.a {
            SystemMatrix::Dense(m) => SystemMatrix::Sparse(SparseMatrix::from_dense(m)?),
            SystemMatrix::Sparse(s) => SystemMatrix::Sparse(s.clone()),
        };
        Ok(Self { a, ..self.clone() })
    }

    pub fn resolvent(&self, z: C64) -> Result<ShiftedSolver<'_>> {
        ShiftedSolver::new(&self.a, z, C64::new(1.0, 0.0))
            .map_err(|e| Error::SingularResolvent { z, detail: e.to_string() })
    }
}

pub fn eval_state_space(m: &StateSpaceModel, z: C64) -> Result<C64> {
    let x = m.resolvent(z)?.solve(&m.b)?;
    Ok(linalg::dot_h(&m.c, &x) + m.d)
}

pub fn deriv_state_space(m: &StateSpaceModel, z: C64) -> Result<C64> {
    let solver = m.resolvent(z)?;
    let x = solver.solve(&m.b)?;
    let w = solver.solve(&x)?;
    Ok(-linalg::dot_h(&m.c, &w))
}

impl TransferFunction for StateSpaceModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, z: C64) -> Result<C64> {
        eval_state_space(self, z)
    }

    fn deriv(&self, z: C64) -> Result<C64> {
        deriv_state_space(self, z)
    }

    fn eval_with_deriv(&self, z: C64) -> Result<(C64, C64)> {
        let solver = self.resolvent(z)?;
        let x = solver.solve(&self.b)?;
        let w = solver.solve(&x)?;
        Ok((linalg::dot_h(&self.c, &x) + self.d, -linalg::dot_h(&self.c, &w)))
    }

    fn domain(&self) -> Analyticity {
        Analyticity::OffSpectrum
    }

    fn as_state_space(&self) -> Option<&StateSpaceModel> {
        Some(self)
    }
}

/// Random real stable model of order `n`: an orthogonally transformed
/// block-diagonal matrix with eigenvalues `a +- i w`, `a in [-2, -0.2]`,
/// `|w| <= 2|a|` (a sector that avoids the BDF4 instability lobe).
pub fn random_stable_model(n: usize, seed: u64) -> Result<StateSpaceModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let re = Uniform::new(0.2, 2.0).expect("valid range");
    let ratio = Uniform::new(-2.0, 2.0).expect("valid range");
    let mut d = Mat::<f64>::zeros(n, n);
    let mut k = 0;
    while k < n {
        let a: f64 = -re.sample(&mut rng);
        if k + 1 < n && k % 4 != 3 {
            let w = ratio.sample(&mut rng) * a.abs();
            d[(k, k)] = a;
            d[(k + 1, k + 1)] = a;
            d[(k, k + 1)] = w;
            d[(k + 1, k)] = -w;
            k += 2;
        } else {
            d[(k, k)] = a;
            k += 1;
        }
    }
    let g = Mat::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let q = g.qr().compute_Q();
    let a = &q * &d * q.transpose();
    let a = Mat::from_fn(n, n, |i, j| C64::new(a[(i, j)], 0.0));
    let b: Vec<C64> = (0..n).map(|_| C64::new(StandardNormal.sample(&mut rng), 0.0)).collect();
    let c: Vec<C64> = (0..n).map(|_| C64::new(StandardNormal.sample(&mut rng), 0.0)).collect();
    Ok(StateSpaceModel::dense(a, b, c, C64::new(0.0, 0.0))?.with_name(format!("stable-n{n}-s{seed}")))
}
