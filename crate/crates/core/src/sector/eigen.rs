//! Principal eigenvalue of the sector operator.

use serde::{Deserialize, Serialize};

use super::mesh::{coefficients, NodeCoefficients, SectorField, SectorMesh};
use super::operator::{assemble_h, linearize, SectorOperatorParams};
use crate::error::{LabError, Result};
use crate::sparse::{bicgstab, Factored, KRYLOV_TOL};

/// Krylov iterations allowed before the stale factorization is renewed.
const STALE_ITERS: usize = 60;

/// Interior values below this (after sup-normalization) count as a sign change.
pub const POSITIVITY_THRESHOLD: f64 = -1e-8;

const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorEigenOptions {
    /// Stop when `|lambda_k - lambda_{k-1}| <= rel_tol * lambda_k`.
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Residual target of each inner solve, relative to `|psi_k|_inf`.
    pub solve_tol: f64,
    /// Starting field; all ones in the interior by default.
    #[serde(skip)]
    pub initial: Option<SectorField>,
}

impl Default for SectorEigenOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_iters: 500,
            solve_tol: 1e-10,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorEigen {
    pub lambda: f64,
    /// Positive eigenfield with sup norm 1.
    pub field: SectorField,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// `(lambda_bar, psi)` with `H(psi) + lambda_bar psi = 0`, `psi > 0`, `sup psi = 1`.
pub fn sector_principal_eigenvalue(p: &SectorOperatorParams, mesh: &SectorMesh) -> Result<(f64, SectorField)> {
    sector_principal_eigenvalue_with(p, mesh, &SectorEigenOptions::default()).map(|e| (e.lambda, e.field))
}

/// Solver for `H(phi) = -rhs` on the interior unknowns.
struct InnerSolver<'a> {
    p: &'a SectorOperatorParams,
    mesh: &'a SectorMesh,
    coef: Vec<NodeCoefficients>,
    /// Reused factorization when `H` is linear.
    fixed: Option<(Vec<usize>, Factored)>,
    /// Factorization of an earlier linearization, used as a preconditioner.
    stale: Option<Factored>,
}

impl<'a> InnerSolver<'a> {
    fn new(p: &'a SectorOperatorParams, mesh: &'a SectorMesh) -> Result<Self> {
        let coef = coefficients(mesh)?;
        let fixed = if p.is_linear() {
            let zero = vec![0.0; mesh.node_count()];
            let lin = linearize(p, mesh, &coef, &zero)?;
            Some((lin.interior, lin.system.factor()?))
        } else {
            None
        };
        Ok(Self {
            p,
            mesh,
            coef,
            fixed,
            stale: None,
        })
    }

    fn scatter(&self, interior: &[usize], x: &[f64]) -> SectorField {
        let mut values = vec![0.0; self.mesh.node_count()];
        for (&k, v) in interior.iter().zip(x) {
            values[k] = *v;
        }
        SectorField { values }
    }

    /// Policy iteration from `guess`; stops when `|H(phi) + rhs|_inf <= tol`.
    fn solve(&mut self, rhs: &SectorField, guess: SectorField, tol: f64) -> Result<SectorField> {
        if let Some((interior, lu)) = &self.fixed {
            let b: Vec<f64> = interior.iter().map(|&k| -rhs.values[k]).collect();
            return Ok(self.scatter(interior, &lu.solve(&b)?));
        }
        let mut phi = guess;
        let mut history = Vec::new();
        for _ in 0..MAX_NEWTON {
            let lin = linearize(self.p, self.mesh, &self.coef, &phi.values)?;
            let b: Vec<f64> = lin.interior.iter().map(|&k| -rhs.values[k]).collect();
            let a = lin.system.csr();
            let x = match self.stale.as_ref().and_then(|m| bicgstab(&a, m, &b, KRYLOV_TOL, STALE_ITERS)) {
                Some(x) => x,
                None => {
                    let lu = lin.system.factor()?;
                    let x = lu.solve(&b)?;
                    self.stale = Some(lu);
                    x
                }
            };
            let next = self.scatter(&lin.interior, &x);
            let h = assemble_h(self.p, self.mesh, &next)?;
            let res = lin
                .interior
                .iter()
                .map(|&k| (h.values[k] + rhs.values[k]).abs())
                .fold(0.0, f64::max);
            history.push(res);
            phi = next;
            if res <= tol {
                return Ok(phi);
            }
        }
        Err(LabError::IterationLimit {
            iterations: MAX_NEWTON,
            residual: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }
}

/// Inverse power iteration: solve `H(phi_{k+1}) = -psi_k`, then
/// `lambda_k = 1/|phi_{k+1}|_inf` and `psi_{k+1} = lambda_k phi_{k+1}`.
pub fn sector_principal_eigenvalue_with(
    p: &SectorOperatorParams,
    mesh: &SectorMesh,
    opts: &SectorEigenOptions,
) -> Result<SectorEigen> {
    p.validate()?;
    let mut solver = InnerSolver::new(p, mesh)?;
    let mut psi = match &opts.initial {
        Some(f) if f.values.len() == mesh.node_count() => f.clone(),
        _ => mesh.field(|_| 1.0),
    };
    let mut history: Vec<f64> = Vec::new();
    let mut lambda_prev = f64::NAN;
    let mut guess = psi.scaled(0.0);
    for it in 0..opts.max_iters {
        let change: f64 = if it < 2 {
            1e-2
        } else {
            let n = history.len();
            (history[n - 1] - history[n - 2]).abs() / history[n - 1]
        };
        let tol = (1e-3 * change).max(opts.solve_tol) * psi.sup_norm().max(1.0);
        let phi = solver.solve(&psi, guess, tol)?;
        let norm = phi.sup_norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(LabError::PositivityLoss {
                iteration: it,
                min_value: norm,
            });
        }
        let lambda = 1.0 / norm;
        let next = phi.scaled(lambda);
        let min_value = next.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min_value < POSITIVITY_THRESHOLD {
            return Err(LabError::PositivityLoss {
                iteration: it,
                min_value,
            });
        }
        history.push(lambda);
        let done = (lambda - lambda_prev).abs() <= opts.rel_tol * lambda;
        guess = next.scaled(1.0 / lambda);
        psi = next;
        lambda_prev = lambda;
        if done {
            return Ok(SectorEigen {
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

/// Value at zero of the quadratic through `(x_i, y_i)`, `i = 0, 1, 2`.
pub fn richardson_limit(x: [f64; 3], y: [f64; 3]) -> Result<f64> {
    if x[0] == x[1] || x[1] == x[2] || x[0] == x[2] {
        return Err(LabError::InvalidParams("extrapolation abscissae must differ".into()));
    }
    let mut s = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if j != i {
                w *= x[j] / (x[j] - x[i]);
            }
        }
        s += w * y[i];
    }
    Ok(s)
}

/// Shrink parameters used for the `delta -> 0` limit.
pub const EXTRAPOLATION_DELTAS: [f64; 3] = [0.2, 0.1, 0.05];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub deltas: [f64; 3],
    pub values: [f64; 3],
    pub limit: f64,
}

/// `lambda_bar` on `S_delta` for each shrink parameter and its limit.
pub fn extrapolated_eigenvalue(
    p: &SectorOperatorParams,
    dim: usize,
    deltas: [f64; 3],
    spacing: f64,
) -> Result<Extrapolation> {
    let mut values = [0.0; 3];
    for (v, &d) in values.iter_mut().zip(&deltas) {
        let mesh = SectorMesh::new(dim, d, spacing)?;
        *v = sector_principal_eigenvalue(p, &mesh)?.0;
    }
    Ok(Extrapolation {
        deltas,
        values,
        limit: richardson_limit(deltas, values)?,
    })
}
