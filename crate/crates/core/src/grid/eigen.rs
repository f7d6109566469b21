//! Principal eigenvalue of the discrete operator by inverse power iteration.

use serde::{Deserialize, Serialize};

use super::domain::{GridDomain, GridField};
use super::solve::{solve_dirichlet_with, BoundaryData, GridSource, SolveOptions};
use crate::error::{LabError, Result};
use crate::pucci::PucciParams;

/// Interior values below this (after normalization) count as a sign change.
pub const POSITIVITY_THRESHOLD: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridEigenOptions {
    /// Stop when `|lambda_k - lambda_{k-1}| <= rel_tol * lambda_k`.
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Tolerance of each inner Dirichlet solve.
    pub solve_tol: f64,
}

impl Default for GridEigenOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_iters: 500,
            solve_tol: 1e-10,
        }
    }
}

/// Result with iteration metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEigen {
    pub lambda: f64,
    /// Sup-normalized positive eigenfield.
    pub field: GridField,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// `(lambda, phi)` with `F(phi) + lambda phi = 0`, `phi > 0`, `sup phi = 1`.
pub fn principal_eigenvalue_grid(params: &PucciParams, dom: &GridDomain) -> Result<(f64, GridField)> {
    principal_eigenvalue_grid_with(params, dom, &GridEigenOptions::default()).map(|e| (e.lambda, e.field))
}

/// Each step solves `F(phi_{k+1}) = -phi_k` with zero boundary data, warm
/// started from `phi_k / lambda_{k-1}`, and sets `lambda_k = 1/|phi_{k+1}|_inf`.
pub fn principal_eigenvalue_grid_with(
    params: &PucciParams,
    dom: &GridDomain,
    opts: &GridEigenOptions,
) -> Result<GridEigen> {
    params.validate()?;
    if params.alpha != 0.0 {
        return Err(LabError::Unsupported(
            "grid eigenvalues are computed for alpha = 0".into(),
        ));
    }
    let zero = BoundaryData::zero();
    let mut psi = dom.zeros();
    for &k in &dom.interior {
        psi.values[k] = 1.0;
    }
    let mut lambda_prev = f64::NAN;
    let mut history: Vec<f64> = Vec::new();
    let mut guess: Option<GridField> = None;
    for it in 0..opts.max_iters {
        // Inexact inner solves while lambda is still moving.
        let change: f64 = if it < 2 {
            1e-2
        } else {
            let n = history.len();
            (history[n - 1] - history[n - 2]).abs() / history[n - 1]
        };
        let solve_opts = SolveOptions {
            tol: (1e-3 * change).max(opts.solve_tol),
            initial: guess.take(),
            ..SolveOptions::default()
        };
        let (phi, _) = solve_dirichlet_with(
            params,
            dom,
            &GridSource::Field(psi.values.clone()),
            &zero,
            &solve_opts,
        )?;
        let norm = phi.sup_norm(dom);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(LabError::PositivityLoss {
                iteration: it,
                min_value: norm,
            });
        }
        let lambda = 1.0 / norm;
        let next = phi.scaled(lambda);
        let min_value = dom
            .interior
            .iter()
            .map(|&k| next.values[k])
            .fold(f64::INFINITY, f64::min);
        if min_value < POSITIVITY_THRESHOLD {
            return Err(LabError::PositivityLoss {
                iteration: it,
                min_value,
            });
        }
        history.push(lambda);
        let done = (lambda - lambda_prev).abs() <= opts.rel_tol * lambda;
        guess = Some(next.scaled(1.0 / lambda));
        psi = next;
        lambda_prev = lambda;
        if done {
            return Ok(GridEigen {
                lambda,
                field: psi,
                iterations: it + 1,
                history,
            });
        }
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
    use crate::grid::domain::{build_domain, Shape};
    use crate::pucci::Variant;

    #[test]
    fn square_laplacian_eigenvalue() {
        // Unit square: 2 pi^2; the extremal pair picks the largest of several
        // second-order Laplacians, so the error is O(h^2) with the widest arm.
        let dom = build_domain(&Shape::square(1.0), 1.0 / 64.0).unwrap();
        let (lambda, phi) = principal_eigenvalue_grid(&PucciParams::laplacian(), &dom).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((lambda - exact).abs() / exact < 0.01, "{lambda}");
        assert!(dom.interior.iter().all(|&k| phi.values[k] > 0.0));
        assert!((phi.sup_norm(&dom) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_decreases_with_domain() {
        let p = PucciParams::new(1.0, 1.5, Variant::Plus, 0.0).unwrap();
        let small = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        let large = build_domain(&Shape::Disk { radius: 1.1 }, 0.05).unwrap();
        let (l1, _) = principal_eigenvalue_grid(&p, &small).unwrap();
        let (l2, _) = principal_eigenvalue_grid(&p, &large).unwrap();
        assert!(l1 > l2 && l2 > 0.0, "{l1} {l2}");
    }

    #[test]
    fn nonzero_alpha_rejected() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.1).unwrap();
        let p = PucciParams::new(1.0, 1.0, Variant::Plus, 0.5).unwrap();
        assert!(matches!(
            principal_eigenvalue_grid(&p, &dom),
            Err(LabError::Unsupported(_))
        ));
    }
}
