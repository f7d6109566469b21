//! Angular box, tensor mesh and coordinate coefficients.
//!
//! Points of the quarter sphere `{x1 > 0, x2 > 0}` are written with
//! `theta_1 = atan(x2/x1)` and `theta_i = atan(x_{i+1}/r_i)`, where `r_i` is
//! the norm of the first `i` coordinates. The box is
//! `(d, pi/2 - d) x (-pi/2 + d, pi/2 - d)^(N-2)`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Largest allowed mesh spacing.
pub const MAX_SPACING: f64 = PI / 400.0;

fn check_dimension(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(LabError::Unsupported(format!("sector dimension N = {n}; only 2 and 3 are implemented")))
    }
}

/// Angular measure removed by the box margin `d`.
pub fn removed_measure(n: usize, d: f64) -> Result<f64> {
    check_dimension(n)?;
    Ok(match n {
        2 => 2.0 * d,
        _ => PI - (FRAC_PI_2 - 2.0 * d) * 2.0 * d.cos(),
    })
}

/// Margin `d` whose removed measure equals `delta`.
pub fn box_margin(n: usize, delta: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(LabError::InvalidParams(format!("delta must be positive, got {delta}")));
    }
    if n == 2 {
        if delta >= FRAC_PI_2 {
            return Err(LabError::InvalidParams(format!("delta = {delta} removes the whole arc")));
        }
        return Ok(0.5 * delta);
    }
    if delta >= PI {
        return Err(LabError::InvalidParams(format!("delta = {delta} removes the whole sector")));
    }
    // The removed measure increases on [0, pi/4].
    let (mut lo, mut hi) = (0.0, PI / 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if removed_measure(n, mid)? < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Coordinate coefficients at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeCoefficients {
    /// `q_i = r / r_{i+1}`; `Gamma = diag(q_1, ..., q_{N-1})` with `q_{N-1} = 1`.
    pub q: [f64; 2],
    /// `tan(theta_i)`.
    pub tan: [f64; 2],
}

impl NodeCoefficients {
    /// Magnitude `gamma q_i + q_i^2` of the first-order penalty.
    pub fn penalty(&self, i: usize, gamma: f64) -> f64 {
        gamma * self.q[i] + self.q[i] * self.q[i]
    }

    /// Coefficient of `psi_{theta_i}` in the connection eigenvalue
    /// `t_i = -psi_i tan(theta_i) q_i^2`, which has multiplicity `i - 1`
    /// (zero-based `i`: multiplicity `i`).
    pub fn connection(&self, i: usize) -> f64 {
        -self.tan[i] * self.q[i] * self.q[i]
    }
}

/// Coefficients at `theta` (length `N - 1`), which must lie in the open box.
pub fn coefficients_at(n: usize, theta: &[f64]) -> Result<NodeCoefficients> {
    check_dimension(n)?;
    if theta.len() != n - 1 {
        return Err(LabError::InvalidParams(format!("expected {} angles", n - 1)));
    }
    let inside = theta[0] > 0.0
        && theta[0] < FRAC_PI_2
        && theta[1..].iter().all(|t| t.abs() < FRAC_PI_2);
    if !inside {
        return Err(LabError::CoefficientBlowup(theta.to_vec()));
    }
    let c = if n == 3 { theta[1].cos() } else { 1.0 };
    let q = [1.0 / c, 1.0];
    let tan = [theta[0].tan(), if n == 3 { theta[1].tan() } else { 0.0 }];
    if q.iter().chain(&tan).any(|v| !v.is_finite()) {
        return Err(LabError::CoefficientBlowup(theta.to_vec()));
    }
    Ok(NodeCoefficients { q, tan })
}

/// Per-node coefficient pack.
pub fn coefficients(mesh: &SectorMesh) -> Result<Vec<NodeCoefficients>> {
    (0..mesh.node_count())
        .map(|k| {
            if mesh.is_boundary(k) {
                // Boundary nodes carry Dirichlet zeros; keep the nearest interior value.
                let (i, j) = mesh.split(k);
                let i = i.clamp(1, mesh.n1 - 1);
                let j = if mesh.dim == 3 { j.clamp(1, mesh.n2 - 1) } else { 0 };
                coefficients_at(mesh.dim, &mesh.theta_of(i, j))
            } else {
                let (i, j) = mesh.split(k);
                coefficients_at(mesh.dim, &mesh.theta_of(i, j))
            }
        })
        .collect()
}

/// Tensor mesh over the box, boundary nodes included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorMesh {
    /// Ambient dimension `N`.
    pub dim: usize,
    pub delta: f64,
    /// Box margin `d`.
    pub margin: f64,
    /// Intervals along `theta_1` and `theta_2` (`n2 = 0` for `N = 2`).
    pub n1: usize,
    pub n2: usize,
    pub h1: f64,
    pub h2: f64,
    /// Largest of `h1`, `h2`.
    pub spacing: f64,
}

impl SectorMesh {
    /// Mesh with spacing at most `max_spacing` (capped at `pi/400`).
    pub fn new(dim: usize, delta: f64, max_spacing: f64) -> Result<Self> {
        let margin = box_margin(dim, delta)?;
        if !(max_spacing > 0.0) {
            return Err(LabError::InvalidParams("spacing must be positive".into()));
        }
        let target = max_spacing.min(MAX_SPACING);
        let l1 = FRAC_PI_2 - 2.0 * margin;
        let n1 = (l1 / target).ceil().max(2.0) as usize;
        let (n2, h2) = if dim == 3 {
            let l2 = PI - 2.0 * margin;
            let n2 = (l2 / target).ceil().max(2.0) as usize;
            (n2, l2 / n2 as f64)
        } else {
            (0, 0.0)
        };
        let h1 = l1 / n1 as f64;
        Ok(Self {
            dim,
            delta,
            margin,
            n1,
            n2,
            h1,
            h2,
            spacing: h1.max(h2),
        })
    }

    /// Mesh at the default spacing `pi/400`.
    pub fn standard(dim: usize, delta: f64) -> Result<Self> {
        Self::new(dim, delta, MAX_SPACING)
    }

    pub fn stride(&self) -> usize {
        self.n1 + 1
    }

    pub fn node_count(&self) -> usize {
        (self.n1 + 1) * (self.n2 + 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.stride() + i
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k % self.stride(), k / self.stride())
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.split(k);
        i == 0 || i == self.n1 || (self.dim == 3 && (j == 0 || j == self.n2))
    }

    /// Interior node indices in storage order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&k| !self.is_boundary(k)).collect()
    }

    pub fn theta_of(&self, i: usize, j: usize) -> Vec<f64> {
        let t1 = self.margin + i as f64 * self.h1;
        if self.dim == 2 {
            vec![t1]
        } else {
            vec![t1, -FRAC_PI_2 + self.margin + j as f64 * self.h2]
        }
    }

    /// Box `[lo_1, hi_1, lo_2, hi_2]`.
    pub fn bounds(&self) -> [f64; 4] {
        [
            self.margin,
            FRAC_PI_2 - self.margin,
            -FRAC_PI_2 + self.margin,
            FRAC_PI_2 - self.margin,
        ]
    }

    /// Field from a function of the angles, zeroed on the box boundary.
    pub fn field<F: Fn(&[f64]) -> f64>(&self, f: F) -> SectorField {
        let values = (0..self.node_count())
            .map(|k| {
                if self.is_boundary(k) {
                    0.0
                } else {
                    let (i, j) = self.split(k);
                    f(&self.theta_of(i, j))
                }
            })
            .collect();
        SectorField { values }
    }
}

/// Values on the mesh nodes; zero on the box boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorField {
    pub values: Vec<f64>,
}

impl SectorField {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> SectorField {
        SectorField {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_match_removed_measure() {
        assert!((box_margin(2, 0.1).unwrap() - 0.05).abs() < 1e-15);
        for delta in [0.2, 0.1, 0.05, 0.02] {
            let d = box_margin(3, delta).unwrap();
            assert!((removed_measure(3, d).unwrap() - delta).abs() < 1e-12);
        }
        assert!(matches!(box_margin(4, 0.1), Err(LabError::Unsupported(_))));
    }

    #[test]
    fn coefficient_examples() {
        let c = coefficients_at(2, &[0.3]).unwrap();
        assert_eq!(c.q[0], 1.0);
        let eq = coefficients_at(3, &[0.4, 0.0]).unwrap();
        assert_eq!(eq.q, [1.0, 1.0]);
        assert_eq!(eq.connection(1), 0.0);
        let mid = coefficients_at(3, &[0.4, std::f64::consts::FRAC_PI_4]).unwrap();
        assert!((mid.q[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            coefficients_at(3, &[0.4, FRAC_PI_2]),
            Err(LabError::CoefficientBlowup(_))
        ));
        assert!(coefficients_at(2, &[0.0]).is_err());
    }

    #[test]
    fn mesh_spacing_and_interior() {
        let m = SectorMesh::standard(3, 0.1).unwrap();
        assert!(m.spacing <= MAX_SPACING + 1e-15);
        let b = m.bounds();
        assert!((m.theta_of(m.n1, 0)[0] - b[1]).abs() < 1e-12);
        assert!((m.theta_of(0, m.n2)[1] - b[3]).abs() < 1e-12);
        assert_eq!(m.interior().len(), (m.n1 - 1) * (m.n2 - 1));
        let f = m.field(|t| t[0]);
        assert!(m.interior().iter().all(|&k| f.values[k] > 0.0));
        assert_eq!(coefficients(&m).unwrap().len(), m.node_count());
    }
}
