//! The barrier `w = r^gamma psi(theta)` and a Cartesian check of
//! `M^-(D^2 w) >= epsilon r^-2 w`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mesh::{coefficients_at, SectorField, SectorMesh};
use super::operator::SectorOperatorParams;
use crate::error::{LabError, Result};
use crate::grid::trace::lagrange4;
use crate::pucci::{pucci, PucciParams, SymMatrix, Variant};

/// Fractional mesh coordinates of `theta`, or `OutOfDomain`.
fn locate(mesh: &SectorMesh, theta: &[f64]) -> Result<[f64; 2]> {
    if theta.len() != mesh.dim - 1 {
        return Err(LabError::InvalidParams(format!("expected {} angles", mesh.dim - 1)));
    }
    let b = mesh.bounds();
    let mut out = [0.0; 2];
    for (d, &t) in theta.iter().enumerate() {
        let (lo, hi, h) = if d == 0 { (b[0], b[1], mesh.h1) } else { (b[2], b[3], mesh.h2) };
        if !(t >= lo && t <= hi) {
            return Err(LabError::OutOfDomain { value: t, lo, hi });
        }
        out[d] = (t - lo) / h;
    }
    Ok(out)
}

fn bilinear(mesh: &SectorMesh, v: &[f64], f: [f64; 2]) -> f64 {
    let i = (f[0].floor() as usize).min(mesh.n1 - 1);
    let s = f[0] - i as f64;
    if mesh.dim == 2 {
        return (1.0 - s) * v[i] + s * v[i + 1];
    }
    let j = (f[1].floor() as usize).min(mesh.n2 - 1);
    let t = f[1] - j as f64;
    let at = |i, j| v[mesh.index(i, j)];
    (1.0 - t) * ((1.0 - s) * at(i, j) + s * at(i + 1, j)) + t * ((1.0 - s) * at(i, j + 1) + s * at(i + 1, j + 1))
}

/// Bilinear interpolation of a sector field.
pub fn interpolate(mesh: &SectorMesh, psi: &SectorField, theta: &[f64]) -> Result<f64> {
    let f = locate(mesh, theta)?;
    Ok(bilinear(mesh, &psi.values, f))
}

/// Cubic Lagrange interpolation, with the 4-node stencil shifted inside the mesh.
fn cubic(mesh: &SectorMesh, v: &[f64], f: [f64; 2]) -> f64 {
    let start = |x: f64, n: usize| (x.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
    let i0 = start(f[0], mesh.n1);
    let wx = lagrange4(f[0] - i0 as f64 - 1.0);
    if mesh.dim == 2 {
        return (0..4).map(|a| wx[a] * v[i0 + a]).sum();
    }
    let j0 = start(f[1], mesh.n2);
    let wy = lagrange4(f[1] - j0 as f64 - 1.0);
    let mut s = 0.0;
    for b in 0..4 {
        for a in 0..4 {
            s += wx[a] * wy[b] * v[mesh.index(i0 + a, j0 + b)];
        }
    }
    s
}

/// Nodal angular gradient by centered (one-sided at the edges) differences.
fn nodal_gradient(mesh: &SectorMesh, v: &[f64], axis: usize) -> Vec<f64> {
    let (n, h, step) = if axis == 0 {
        (mesh.n1, mesh.h1, 1)
    } else {
        (mesh.n2, mesh.h2, mesh.stride())
    };
    (0..mesh.node_count())
        .map(|k| {
            let (i, j) = mesh.split(k);
            let pos = if axis == 0 { i } else { j };
            if pos == 0 {
                (v[k + step] - v[k]) / h
            } else if pos == n {
                (v[k] - v[k - step]) / h
            } else {
                (v[k + step] - v[k - step]) / (2.0 * h)
            }
        })
        .collect()
}

/// `(w, |grad w|)` at the point with radius `r` and angles `theta`:
/// `w = r^gamma psi`, `|grad w| = r^(gamma-1) sqrt(gamma^2 psi^2 + |Gamma grad_theta psi|^2)`.
pub fn barrier_eval(gamma: f64, psi: &SectorField, mesh: &SectorMesh, r: f64, theta: &[f64]) -> Result<(f64, f64)> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(LabError::InvalidParams(format!("radius must be nonnegative, got {r}")));
    }
    let f = locate(mesh, theta)?;
    let value = bilinear(mesh, &psi.values, f);
    let c = coefficients_at(mesh.dim, theta)?;
    let mut tangential = 0.0;
    for axis in 0..mesh.dim - 1 {
        let g = bilinear(mesh, &nodal_gradient(mesh, &psi.values, axis), f);
        tangential += (c.q[axis] * g).powi(2);
    }
    if r == 0.0 {
        return Ok((0.0, if gamma > 1.0 { 0.0 } else { f64::INFINITY }));
    }
    let w = r.powf(gamma) * value;
    let grad = r.powf(gamma - 1.0) * (gamma * gamma * value * value + tangential).sqrt();
    Ok((w, grad))
}

/// Radius and angles of a Cartesian point.
fn to_polar(x: &[f64]) -> (f64, Vec<f64>) {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let t1 = x[1].atan2(x[0]);
    if x.len() == 2 {
        (r, vec![t1])
    } else {
        (r, vec![t1, x[2].atan2(x[0].hypot(x[1]))])
    }
}

fn from_polar(r: f64, theta: &[f64]) -> Vec<f64> {
    if theta.len() == 1 {
        vec![r * theta[0].cos(), r * theta[0].sin()]
    } else {
        let (c2, s2) = (theta[1].cos(), theta[1].sin());
        vec![r * c2 * theta[0].cos(), r * c2 * theta[0].sin(), r * s2]
    }
}

/// Worst sampled defect of the barrier inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierCheck {
    pub samples: usize,
    /// Minimum over samples of `(M^-(D^2 w) - epsilon r^-2 w) / r^(gamma-2)`.
    pub min_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Allowed negative defect in units of the mesh spacing.
pub const DEFECT_PER_SPACING: f64 = 20.0;

/// Evaluates `M^-(D^2 w) - epsilon r^-2 w` by Cartesian second differences
/// of step `2 r spacing` at `samples` random points with `r` in `[0.5, 2]`
/// and angles at least `0.1` inside the box. `psi` is interpolated by
/// cubics, so the difference step spans several cells.
pub fn barrier_check(
    p: &SectorOperatorParams,
    mesh: &SectorMesh,
    psi: &SectorField,
    samples: usize,
    seed: u64,
) -> Result<BarrierCheck> {
    p.validate()?;
    let pm = PucciParams::new(p.a, p.big_a, Variant::Minus, 0.0)?;
    let b = mesh.bounds();
    let inset = 0.1;
    let w = |x: &[f64]| -> Result<f64> {
        let (r, theta) = to_polar(x);
        let f = locate(mesh, &theta)?;
        Ok(r.powf(p.gamma) * cubic(mesh, &psi.values, f))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_defect = f64::INFINITY;
    let n = mesh.dim;
    for _ in 0..samples {
        let r = rng.random_range(0.5..2.0);
        let mut theta = vec![rng.random_range(b[0] + inset..b[1] - inset)];
        if n == 3 {
            theta.push(rng.random_range(b[2] + inset..b[3] - inset));
        }
        let x = from_polar(r, &theta);
        let eta = 2.0 * r * mesh.spacing;
        let shifted = |d: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(i, s) in d {
                y[i] += s * eta;
            }
            w(&y)
        };
        let w0 = w(&x)?;
        let mut hess = SymMatrix::zeros(n);
        for i in 0..n {
            let d = (shifted(&[(i, 1.0)])? - 2.0 * w0 + shifted(&[(i, -1.0)])?) / (eta * eta);
            hess.set(i, i, d);
            for j in i + 1..n {
                let d = (shifted(&[(i, 1.0), (j, 1.0)])? - shifted(&[(i, 1.0), (j, -1.0)])?
                    - shifted(&[(i, -1.0), (j, 1.0)])?
                    + shifted(&[(i, -1.0), (j, -1.0)])?)
                    / (4.0 * eta * eta);
                hess.set(i, j, d);
            }
        }
        let defect = (pucci(&pm, &hess)? - p.epsilon * w0 / (r * r)) / r.powf(p.gamma - 2.0);
        min_defect = min_defect.min(defect);
    }
    let tolerance = DEFECT_PER_SPACING * mesh.spacing * psi.sup_norm();
    Ok(BarrierCheck {
        samples,
        min_defect,
        tolerance,
        pass: min_defect >= -tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::gamma::{gamma_exponent_with, GammaOptions};

    #[test]
    fn homogeneity_and_origin() {
        let mesh = SectorMesh::standard(2, 0.1).unwrap();
        let psi = mesh.field(|t| (2.0 * t[0]).sin());
        let g = 2.3;
        let (w1, d1) = barrier_eval(g, &psi, &mesh, 0.7, &[0.6]).unwrap();
        let (w2, d2) = barrier_eval(g, &psi, &mesh, 1.4, &[0.6]).unwrap();
        assert!((w2 / w1 - 2f64.powf(g)).abs() < 1e-12);
        assert!((d2 / d1 - 2f64.powf(g - 1.0)).abs() < 1e-12);
        assert_eq!(barrier_eval(g, &psi, &mesh, 0.0, &[0.6]).unwrap().0, 0.0);
        assert!(barrier_eval(g, &psi, &mesh, 1e-6, &[0.6]).unwrap().0 < 1e-12);
        assert!(matches!(
            barrier_eval(g, &psi, &mesh, 1.0, &[1.6]),
            Err(LabError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn gradient_of_harmonic_barrier() {
        // r^2 sin(2 theta) = 2 x y has |grad| = 2 r.
        let mesh = SectorMesh::standard(2, 0.1).unwrap();
        let psi = mesh.field(|t| (2.0 * t[0]).sin());
        let (w, d) = barrier_eval(2.0, &psi, &mesh, 1.5, &[0.4]).unwrap();
        assert!((w - 2.25 * 0.8f64.sin()).abs() < 1e-4);
        assert!((d - 3.0).abs() < 1e-3, "{d}");
    }

    #[test]
    fn barrier_inequality_holds() {
        let mesh = SectorMesh::standard(2, 0.05).unwrap();
        let (a, big_a, eps) = (0.9, 1.0, 0.05);
        let g = gamma_exponent_with(a, big_a, eps, &mesh, &GammaOptions::default()).unwrap();
        let p = SectorOperatorParams::new(a, big_a, g.gamma, eps).unwrap();
        let check = barrier_check(&p, &mesh, &g.field, 100, 7).unwrap();
        assert!(check.pass, "{check:?}");
    }
}
