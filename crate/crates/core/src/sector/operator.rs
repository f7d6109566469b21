//! The sector operator `H` and its piecewise-linear structure.
//!
//! `H(psi) = M^-(Gamma D^2 psi Gamma) + (a - A) sum_i |psi_i| (gamma q_i + q_i^2)
//!         + sum_i (i - 1) eps(t_i) t_i`, with `t_i = -psi_i tan(theta_i) q_i^2`
//! and `eps(t) = a` for `t > 0`, `A` otherwise. Every term is a minimum of
//! linear functions of the derivatives, so `H` is concave and equals the
//! linear operator selected by its own minimizers ("policy").

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{coefficients, NodeCoefficients, SectorField, SectorMesh};
use crate::error::{LabError, Result};
use crate::pucci::{eigen_sym, pucci, PucciParams, SymMatrix, Variant};
use crate::sparse::SystemBuilder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorOperatorParams {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl SectorOperatorParams {
    pub fn new(a: f64, big_a: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        let p = Self { a, big_a, gamma, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a <= self.big_a && self.big_a.is_finite()) {
            return Err(LabError::InvalidParams(format!(
                "need 0 < a <= A, got a = {}, A = {}",
                self.a, self.big_a
            )));
        }
        if !(self.gamma >= 2.0 && self.gamma.is_finite()) {
            return Err(LabError::InvalidParams(format!("gamma must be >= 2, got {}", self.gamma)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(LabError::InvalidParams(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// The operator is linear (`A Delta_S`) when `a = A`.
    pub fn is_linear(&self) -> bool {
        self.a == self.big_a
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            a: self.a * t,
            big_a: self.big_a * t,
            ..*self
        }
    }

    fn minus(&self) -> PucciParams {
        PucciParams {
            a: self.a,
            big_a: self.big_a,
            variant: Variant::Minus,
            alpha: 0.0,
        }
    }
}

/// Centered differences at an interior node: `[d11, d22, d12]`, `[d1, d2]`.
fn derivatives(mesh: &SectorMesh, v: &[f64], k: usize) -> ([f64; 3], [f64; 2]) {
    let (h1, h2) = (mesh.h1, mesh.h2);
    let d11 = (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (h1 * h1);
    let d1 = (v[k + 1] - v[k - 1]) / (2.0 * h1);
    if mesh.dim == 2 {
        return ([d11, 0.0, 0.0], [d1, 0.0]);
    }
    let s = mesh.stride();
    let d22 = (v[k + s] - 2.0 * v[k] + v[k - s]) / (h2 * h2);
    let d12 = (v[k + s + 1] - v[k + s - 1] - v[k - s + 1] + v[k - s - 1]) / (4.0 * h1 * h2);
    let d2 = (v[k + s] - v[k - s]) / (2.0 * h2);
    ([d11, d22, d12], [d1, d2])
}

fn frame_matrix(dim: usize, c: &NodeCoefficients, d2: [f64; 3]) -> SymMatrix {
    if dim == 2 {
        SymMatrix::diag(&[c.q[0] * c.q[0] * d2[0]])
    } else {
        let q = c.q[0];
        let mut x = SymMatrix::zeros(2);
        x.set(0, 0, q * q * d2[0]);
        x.set(1, 1, d2[1]);
        x.set(0, 1, q * d2[2]);
        x
    }
}

/// Linear form selected at a node: coefficients of `[d11, d22, d12]` and `[d1, d2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct NodeForm {
    second: [f64; 3],
    first: [f64; 2],
}

fn node_form(p: &SectorOperatorParams, dim: usize, c: &NodeCoefficients, d2: [f64; 3], d1: [f64; 2]) -> Result<NodeForm> {
    let pm = p.minus();
    let x = frame_matrix(dim, c, d2);
    let eig = eigen_sym(&x)?;
    let m = dim - 1;
    let mut cm = [[0.0; 2]; 2];
    for (mu, v) in eig.values.iter().zip(&eig.vectors) {
        let w = pm.weight(*mu);
        for r in 0..m {
            for s in 0..m {
                cm[r][s] += w * v[r] * v[s];
            }
        }
    }
    let q = c.q[0];
    let second = if dim == 2 {
        [cm[0][0] * q * q, 0.0, 0.0]
    } else {
        [cm[0][0] * q * q, cm[1][1], 2.0 * cm[0][1] * q]
    };
    let mut first = [0.0; 2];
    for i in 0..m {
        let penalty = (p.a - p.big_a) * c.penalty(i, p.gamma);
        let sign = if d1[i] < 0.0 { -1.0 } else { 1.0 };
        first[i] += penalty * sign;
        if i > 0 {
            let t = c.connection(i) * d1[i];
            first[i] += i as f64 * pm.weight(t) * c.connection(i);
        }
    }
    Ok(NodeForm { second, first })
}

/// Stencil weights indexed by `(dj + 1) * 3 + (di + 1)`.
fn stencil(mesh: &SectorMesh, f: &NodeForm) -> [f64; 9] {
    let (h1, h2) = (mesh.h1, mesh.h2);
    let mut w = [0.0; 9];
    let [c11, c22, c12] = f.second;
    let [b1, b2] = f.first;
    w[4] = -2.0 * c11 / (h1 * h1);
    w[3] = c11 / (h1 * h1) - b1 / (2.0 * h1);
    w[5] = c11 / (h1 * h1) + b1 / (2.0 * h1);
    if mesh.dim == 3 {
        w[4] -= 2.0 * c22 / (h2 * h2);
        w[1] = c22 / (h2 * h2) - b2 / (2.0 * h2);
        w[7] = c22 / (h2 * h2) + b2 / (2.0 * h2);
        let x = c12 / (4.0 * h1 * h2);
        w[8] = x;
        w[0] = x;
        w[6] = -x;
        w[2] = -x;
    }
    w
}

fn check_field(mesh: &SectorMesh, psi: &SectorField) -> Result<()> {
    if psi.values.len() != mesh.node_count() {
        return Err(LabError::InvalidParams(format!(
            "field has {} values, mesh has {} nodes",
            psi.values.len(),
            mesh.node_count()
        )));
    }
    Ok(())
}

/// Nodewise value of `H(psi)`; zero on the box boundary.
pub fn assemble_h(p: &SectorOperatorParams, mesh: &SectorMesh, psi: &SectorField) -> Result<SectorField> {
    p.validate()?;
    check_field(mesh, psi)?;
    let coef = coefficients(mesh)?;
    let pm = p.minus();
    let values = (0..mesh.node_count())
        .into_par_iter()
        .map(|k| {
            if mesh.is_boundary(k) {
                return Ok(0.0);
            }
            let c = &coef[k];
            let (d2, d1) = derivatives(mesh, &psi.values, k);
            let mut h = pucci(&pm, &frame_matrix(mesh.dim, c, d2))?;
            for i in 0..mesh.dim - 1 {
                h += (p.a - p.big_a) * d1[i].abs() * c.penalty(i, p.gamma);
                if i > 0 {
                    let t = c.connection(i) * d1[i];
                    h += i as f64 * pm.weight(t) * t;
                }
            }
            Ok(h)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SectorField { values })
}

/// Sparse matrix of the linear operator selected by `psi`, acting on the
/// interior unknowns (in `mesh.interior()` order).
pub(crate) struct Linearization {
    pub interior: Vec<usize>,
    pub system: SystemBuilder,
}

pub(crate) fn linearize(
    p: &SectorOperatorParams,
    mesh: &SectorMesh,
    coef: &[NodeCoefficients],
    psi: &[f64],
) -> Result<Linearization> {
    let interior = mesh.interior();
    let mut slot = vec![usize::MAX; mesh.node_count()];
    for (r, &k) in interior.iter().enumerate() {
        slot[k] = r;
    }
    let rows = interior
        .par_iter()
        .map(|&k| {
            let (d2, d1) = derivatives(mesh, psi, k);
            let form = node_form(p, mesh.dim, &coef[k], d2, d1)?;
            Ok(stencil(mesh, &form))
        })
        .collect::<Result<Vec<[f64; 9]>>>()?;
    let s = mesh.stride() as isize;
    let mut system = SystemBuilder::new(interior.len());
    for (r, (&k, w)) in interior.iter().zip(&rows).enumerate() {
        for dj in -1..=1isize {
            for di in -1..=1isize {
                let wt = w[((dj + 1) * 3 + di + 1) as usize];
                if wt == 0.0 && !(di == 0 && dj == 0) {
                    continue;
                }
                let nb = (k as isize + dj * s + di) as usize;
                let col = slot[nb];
                if col != usize::MAX {
                    system.add(r, col, wt);
                }
            }
        }
    }
    Ok(Linearization { interior, system })
}
