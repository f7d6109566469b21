//! Pucci extremal operators and the full operator `F(p, X) = |p|^alpha M(X)`.
//!
//! `M+(X) = A tr(X+) - a tr(X-)` and `M-(X) = a tr(X+) - A tr(X-)`, where
//! `tr(X-)` is the sum of the absolute values of the negative eigenvalues, so
//! that `tr(X) = tr(X+) - tr(X-)`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Which of the two extremal operators is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plus,
    Minus,
}

impl Variant {
    pub fn flipped(self) -> Self {
        match self {
            Variant::Plus => Variant::Minus,
            Variant::Minus => Variant::Plus,
        }
    }
}

/// Ellipticity window `[a, A]`, the extremal variant and the gradient exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PucciParams {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub variant: Variant,
    pub alpha: f64,
}

impl PucciParams {
    pub fn new(a: f64, big_a: f64, variant: Variant, alpha: f64) -> Result<Self> {
        let p = Self {
            a,
            big_a,
            variant,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    /// `a = A = 1`, `alpha = 0`: the Laplacian.
    pub fn laplacian() -> Self {
        Self {
            a: 1.0,
            big_a: 1.0,
            variant: Variant::Plus,
            alpha: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.big_a.is_finite() && self.alpha.is_finite()) {
            return Err(LabError::InvalidParams("non-finite parameter".into()));
        }
        if !(self.a > 0.0 && self.a <= self.big_a) {
            return Err(LabError::InvalidParams(format!(
                "ellipticity must satisfy 0 < a <= A, got a = {}, A = {}",
                self.a, self.big_a
            )));
        }
        if self.alpha <= -1.0 {
            return Err(LabError::InvalidParams(format!(
                "alpha must exceed -1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Coefficient applied to an eigenvalue `t` by the chosen variant.
    #[inline]
    pub fn weight(&self, t: f64) -> f64 {
        match (self.variant, t > 0.0) {
            (Variant::Plus, true) => self.big_a,
            (Variant::Plus, false) => self.a,
            (Variant::Minus, true) => self.a,
            (Variant::Minus, false) => self.big_a,
        }
    }

    /// One eigenvalue's contribution `weight(t) * t`.
    #[inline]
    pub fn scalar(&self, t: f64) -> f64 {
        self.weight(t) * t
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self { variant, ..*self }
    }
}

/// Dense symmetric matrix storing the upper triangle row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::InvalidMatrix("dimension must be positive".into()));
        }
        if entries.len() != dim * (dim + 1) / 2 {
            return Err(LabError::InvalidMatrix(format!(
                "expected {} packed entries for dim {}, got {}",
                dim * (dim + 1) / 2,
                dim,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(LabError::InvalidMatrix(format!("non-finite entry {bad}")));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diag(&vec![1.0; dim])
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from full rows; the lower triangle must mirror the upper one.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim.max(1));
        if dim == 0 {
            return Err(LabError::InvalidMatrix("empty matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(LabError::InvalidMatrix("matrix is not square".into()));
            }
            for j in i..dim {
                let (u, l) = (row[j], rows[j][i]);
                if (u - l).abs() > 1e-12 * (1.0 + u.abs().max(l.abs())) {
                    return Err(LabError::InvalidMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
                m.set(i, j, u);
            }
        }
        Self::new(dim, m.entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn packed(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.offset(i, j);
        self.entries[k] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(LabError::InvalidMatrix("dimension mismatch".into()));
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| x + y)
                .collect(),
        })
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `Q^T X Q` for a square `Q` given by columns.
    pub fn congruence(&self, q: &[Vec<f64>]) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        s += q[i][k] * self.get(k, l) * q[j][l];
                    }
                }
                out.set(i, j, s);
            }
        }
        out
    }

    fn check_finite(&self) -> Result<()> {
        if self.entries.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(LabError::InvalidMatrix("non-finite entry".into()))
        }
    }
}

/// Ascending eigenvalues and the matching orthonormal eigenvectors
/// (`vectors[k]` belongs to `values[k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomp {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomp {
    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let s = (0..n)
                    .map(|k| self.vectors[k][i] * self.values[k] * self.vectors[k][j])
                    .sum();
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn positive_trace(&self) -> f64 {
        self.values.iter().filter(|v| **v > 0.0).sum()
    }

    pub fn negative_trace(&self) -> f64 {
        -self.values.iter().filter(|v| **v < 0.0).sum::<f64>()
    }
}

const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 50;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn eigen_sym(x: &SymMatrix) -> Result<EigenDecomp> {
    x.check_finite()?;
    let n = x.dim();
    let mut m = x.to_dense();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = m
        .iter()
        .flatten()
        .map(|e| e * e)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let values = order.iter().map(|&k| m[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    Ok(EigenDecomp { values, vectors })
}

/// `M(X)` from an already computed spectrum.
pub fn pucci_from_eigenvalues(p: &PucciParams, values: &[f64]) -> f64 {
    values.iter().map(|&t| p.scalar(t)).sum()
}

/// Pucci extremal operator of the configured variant.
pub fn pucci(p: &PucciParams, x: &SymMatrix) -> Result<f64> {
    if x.dim() == 1 {
        x.check_finite()?;
        return Ok(p.scalar(x.get(0, 0)));
    }
    let e = eigen_sym(x)?;
    Ok(pucci_from_eigenvalues(p, &e.values))
}

/// `F(grad, X) = |grad|^alpha M(X)`.
pub fn f_operator(p: &PucciParams, grad: &[f64], x: &SymMatrix) -> Result<f64> {
    if grad.len() != x.dim() {
        return Err(LabError::InvalidMatrix(format!(
            "gradient has {} components, matrix has dim {}",
            grad.len(),
            x.dim()
        )));
    }
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let factor = if p.alpha == 0.0 {
        1.0
    } else if norm == 0.0 {
        if p.alpha < 0.0 {
            return Err(LabError::DegenerateGradient { alpha: p.alpha });
        }
        0.0
    } else {
        norm.powf(p.alpha)
    };
    Ok(factor * pucci(p, x)?)
}

/// Hessian of a solution at a boundary point where `u = 0` and the outward
/// normal derivative equals `c`.
///
/// Coordinates: the first `N-1` axes span the tangent plane and the last axis
/// is the inner normal, so the boundary is the graph `x_N = phi(x')` with
/// `phi(0) = 0`, `grad phi(0) = 0` and `curv = D^2 phi(0)`. In this frame
/// `du/dx_N = -c`, the tangential block is `c * curv`, the mixed entries vanish,
/// and the normal entry is recovered from the equation.
pub fn boundary_hessian(p: &PucciParams, c: f64, f0: f64, curv: &SymMatrix) -> Result<SymMatrix> {
    p.validate()?;
    if !c.is_finite() || !f0.is_finite() {
        return Err(LabError::InvalidParams("non-finite boundary data".into()));
    }
    let tangential = curv.scaled(c);
    let m = pucci(p, &tangential)?;
    let source = if f0 == 0.0 {
        0.0
    } else if c == 0.0 {
        if p.alpha > 0.0 {
            return Err(LabError::InvalidParams(
                "c = 0 with f(0) != 0 and alpha > 0 has no boundary Hessian".into(),
            ));
        }
        if p.alpha < 0.0 {
            return Err(LabError::DegenerateGradient { alpha: p.alpha });
        }
        f0
    } else {
        c.abs().powf(-p.alpha) * f0
    };
    if c == 0.0 && p.alpha < 0.0 {
        return Err(LabError::DegenerateGradient { alpha: p.alpha });
    }
    let s = -m - source;
    // weight(t) t = s has the solution t = s / weight(s).
    let u_nn = if s == 0.0 { 0.0 } else { s / p.weight(s) };

    let n = curv.dim() + 1;
    let mut out = SymMatrix::zeros(n);
    for i in 0..n - 1 {
        for j in i..n - 1 {
            out.set(i, j, tangential.get(i, j));
        }
    }
    out.set(n - 1, n - 1, u_nn);
    Ok(out)
}
