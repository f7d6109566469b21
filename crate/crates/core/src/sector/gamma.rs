//! Barrier exponent: the fixed point of
//! `a gamma (gamma + N - 2) = epsilon + lambda_bar(H^gamma)`.

use serde::{Deserialize, Serialize};

use super::eigen::{sector_principal_eigenvalue_with, SectorEigenOptions};
use super::mesh::{SectorField, SectorMesh};
use super::operator::SectorOperatorParams;
use crate::error::{LabError, Result};

/// Positive root of `a g (g + N - 2) = rhs`.
pub fn gamma_root(a: f64, dim: usize, rhs: f64) -> f64 {
    let m = dim as f64 - 2.0;
    0.5 * (-m + (m * m + 4.0 * rhs / a).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GammaOptions {
    /// Weight of the new root in each update.
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Relative tolerance of each eigenvalue solve.
    pub eigen_rel_tol: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self {
            damping: 0.8,
            tol: 1e-6,
            max_iters: 100,
            eigen_rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaResult {
    pub gamma: f64,
    /// `lambda_bar(H^gamma)` at the returned exponent.
    pub lambda_bar: f64,
    pub field: SectorField,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// Exponent on the standard mesh of `S_delta`.
pub fn gamma_exponent(a: f64, big_a: f64, epsilon: f64, delta: f64, dim: usize) -> Result<f64> {
    let mesh = SectorMesh::standard(dim, delta)?;
    gamma_exponent_with(a, big_a, epsilon, &mesh, &GammaOptions::default()).map(|g| g.gamma)
}

/// Damped fixed-point iteration started at `gamma = 2`. Roots below 2 are
/// clamped to 2 (they cannot occur: `lambda_bar` exceeds `2 N A` on `S_delta`).
pub fn gamma_exponent_with(
    a: f64,
    big_a: f64,
    epsilon: f64,
    mesh: &SectorMesh,
    opts: &GammaOptions,
) -> Result<GammaResult> {
    SectorOperatorParams::new(a, big_a, 2.0, epsilon)?;
    let mut gamma = 2.0;
    let mut history = vec![gamma];
    let mut field: Option<SectorField> = None;
    for it in 0..opts.max_iters {
        let p = SectorOperatorParams::new(a, big_a, gamma, epsilon)?;
        let eopts = SectorEigenOptions {
            rel_tol: opts.eigen_rel_tol,
            initial: field.take(),
            ..SectorEigenOptions::default()
        };
        let eig = sector_principal_eigenvalue_with(&p, mesh, &eopts)?;
        let root = gamma_root(a, mesh.dim, epsilon + eig.lambda).max(2.0);
        let next = (1.0 - opts.damping) * gamma + opts.damping * root;
        history.push(next);
        // The fixed point is reached once the root reproduces its input.
        if (root - gamma).abs() <= opts.tol {
            return Ok(GammaResult {
                gamma,
                lambda_bar: eig.lambda,
                field: eig.field,
                iterations: it + 1,
                history,
            });
        }
        field = Some(eig.field);
        gamma = next;
    }
    Err(LabError::IterationLimit {
        iterations: opts.max_iters,
        residual: history
            .windows(2)
            .last()
            .map(|w| (w[1] - w[0]).abs())
            .unwrap_or(f64::NAN),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::eigen::sector_principal_eigenvalue;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn root_examples() {
        assert!((gamma_root(1.0, 2, 4.0) - 2.0).abs() < 1e-15);
        assert!((gamma_root(1.0, 3, 6.0) - 2.0).abs() < 1e-15);
        assert!((gamma_root(2.0, 2, 8.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn equal_ellipticity_on_an_arc() {
        // lambda_bar = (pi / (pi/2 - delta))^2, so gamma = pi / (pi/2 - delta).
        let delta = 0.05;
        let g = gamma_exponent(1.0, 1.0, 0.0, delta, 2).unwrap();
        let want = PI / (FRAC_PI_2 - delta);
        assert!((g - want).abs() < 1e-4, "{g} {want}");
    }

    #[test]
    fn fixed_point_identity() {
        let (a, big_a, eps) = (0.95, 1.0, 0.01);
        let mesh = SectorMesh::standard(2, 0.05).unwrap();
        let r = gamma_exponent_with(a, big_a, eps, &mesh, &GammaOptions::default()).unwrap();
        assert!(r.gamma > 2.0 && r.gamma < 2.5, "{}", r.gamma);
        let p = SectorOperatorParams::new(a, big_a, r.gamma, eps).unwrap();
        let (lambda, _) = sector_principal_eigenvalue(&p, &mesh).unwrap();
        let defect = a * r.gamma * r.gamma - lambda - eps;
        assert!(defect.abs() < 1e-5, "{defect}");
    }
}
