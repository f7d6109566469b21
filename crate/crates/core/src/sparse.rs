//! Sparse linear solves for the linearized schemes.
//!
//! Systems are first tried with BiCGSTAB preconditioned by ILU(0), which is
//! cheap for the diagonally dominant matrices produced by monotone schemes;
//! a sparse LU factorization is the fallback.

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{LabError, Result};

/// Relative residual target of the iterative path.
pub const KRYLOV_TOL: f64 = 1e-12;
const KRYLOV_MAX_ITERS: usize = 2000;

/// Square sparse system assembled from `(row, col, value)` entries;
/// duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct SystemBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SystemBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(6 * n),
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    pub fn csr(&self) -> CsrMatrix {
        CsrMatrix::from_entries(self.n, &self.entries)
    }

    /// LU factorization of the assembled matrix.
    pub fn factor(&self) -> Result<Factored> {
        let triplets: Vec<Triplet<usize, usize, f64>> =
            self.entries.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| LabError::LinearSolve(format!("assembly: {e:?}")))?;
        let lu = m
            .sp_lu()
            .map_err(|e| LabError::LinearSolve(format!("factorization: {e:?}")))?;
        Ok(Factored { n: self.n, lu })
    }

    /// Iterative solve with LU fallback.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let a = self.csr();
        if let Ok(ilu) = Ilu0::new(&a) {
            if let Some(x) = bicgstab(&a, &ilu, rhs, KRYLOV_TOL, KRYLOV_MAX_ITERS) {
                return Ok(x);
            }
        }
        self.factor()?.solve(rhs)
    }
}

/// Compressed sparse rows with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_entries(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut sorted = entries.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Self {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            y[i] = s;
        }
    }
}

/// Incomplete LU factorization with the sparsity of the matrix.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let mut lu = a.clone();
        let n = lu.n;
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for k in lu.indptr[i]..lu.indptr[i + 1] {
                if lu.indices[k] == i {
                    diag[i] = k;
                }
            }
            if diag[i] == usize::MAX {
                return Err(LabError::LinearSolve(format!("missing diagonal in row {i}")));
            }
        }
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let (lo, hi) = (lu.indptr[i], lu.indptr[i + 1]);
            for k in lo..hi {
                slot[lu.indices[k]] = k;
            }
            for k in lo..hi {
                let c = lu.indices[k];
                if c >= i {
                    break;
                }
                let pivot = lu.values[diag[c]];
                if pivot == 0.0 {
                    return Err(LabError::LinearSolve(format!("zero pivot in row {c}")));
                }
                let m = lu.values[k] / pivot;
                lu.values[k] = m;
                for kk in diag[c] + 1..lu.indptr[c + 1] {
                    let s = slot[lu.indices[kk]];
                    if s != usize::MAX {
                        lu.values[s] -= m * lu.values[kk];
                    }
                }
            }
            for k in lo..hi {
                slot[lu.indices[k]] = usize::MAX;
            }
            if lu.values[diag[i]] == 0.0 {
                return Err(LabError::LinearSolve(format!("zero pivot in row {i}")));
            }
        }
        Ok(Self { lu, diag })
    }

    /// Solves `L U z = r` in place.
    pub fn apply(&self, z: &mut [f64]) {
        let a = &self.lu;
        for i in 0..a.n {
            let mut s = z[i];
            for k in a.indptr[i]..self.diag[i] {
                s -= a.values[k] * z[a.indices[k]];
            }
            z[i] = s;
        }
        for i in (0..a.n).rev() {
            let mut s = z[i];
            for k in self.diag[i] + 1..a.indptr[i + 1] {
                s -= a.values[k] * z[a.indices[k]];
            }
            z[i] = s / a.values[self.diag[i]];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Approximate inverse applied in place.
pub trait Preconditioner {
    fn apply(&self, z: &mut [f64]);
}

impl Preconditioner for Ilu0 {
    fn apply(&self, z: &mut [f64]) {
        Ilu0::apply(self, z)
    }
}

/// An exact factorization of a nearby matrix.
impl Preconditioner for Factored {
    fn apply(&self, z: &mut [f64]) {
        if let Ok(x) = self.solve(z) {
            z.copy_from_slice(&x);
        }
    }
}

/// Right-preconditioned BiCGSTAB from a zero start. Returns `None` on
/// breakdown or when the tolerance is not met.
pub fn bicgstab<M: Preconditioner>(a: &CsrMatrix, m: &M, b: &[f64], tol: f64, max_iters: usize) -> Option<Vec<f64>> {
    let n = a.n;
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Some(x);
    }
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    for _ in 0..max_iters {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            return None;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        p_hat.copy_from_slice(&p);
        m.apply(&mut p_hat);
        a.matvec(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            return None;
        }
        alpha = rho_new / denom;
        // r now holds s = r - alpha v.
        for i in 0..n {
            r[i] -= alpha * v[i];
        }
        if norm(&r) <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Some(x);
        }
        s_hat.copy_from_slice(&r);
        m.apply(&mut s_hat);
        a.matvec(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return None;
        }
        omega = dot(&t, &r) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] -= omega * t[i];
        }
        if norm(&r) <= tol * bnorm {
            return Some(x);
        }
        if omega == 0.0 {
            return None;
        }
        rho = rho_new;
    }
    None
}

/// Reusable LU factorization.
pub struct Factored {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl Factored {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        use faer::prelude::Solve;
        if rhs.len() != self.n {
            return Err(LabError::LinearSolve(format!(
                "right-hand side has length {}, expected {}",
                rhs.len(),
                self.n
            )));
        }
        let b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(LabError::LinearSolve("singular system".into()))
        }
    }
}
