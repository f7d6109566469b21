//! Ball eigenvalues by shooting next to grid eigenvalues on the disk.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{typed, Outcome};
use crate::report::{Check, Table};
use pucci_lab::grid::{build_domain, principal_eigenvalue_grid_with, GridEigenOptions, Shape};
use pucci_lab::radial::principal_eigenvalue_ball;
use pucci_lab::{PucciParams, Variant};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenConfig {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub variant: Variant,
    pub alpha: f64,
    /// Dimension of the shooting computation; the grid is planar.
    pub dim: usize,
    pub radius: f64,
    pub h: f64,
    /// Relative agreement required between grid and shooting.
    pub agreement_tol: f64,
    /// Radii for the scaling law `lambda R^(2+alpha) = const`.
    pub scaling_radii: Vec<f64>,
    pub scaling_tol: f64,
    pub export_field: bool,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            big_a: 1.0,
            variant: Variant::Plus,
            alpha: 0.0,
            dim: 2,
            radius: 1.0,
            h: 0.01,
            agreement_tol: 0.03,
            scaling_radii: vec![0.5, 1.0, 2.0],
            scaling_tol: 1e-4,
            export_field: true,
        }
    }
}

pub fn run(raw: &Value) -> Result<(Value, Outcome)> {
    let (cfg, effective): (EigenConfig, Value) = typed(raw)?;
    let p = PucciParams::new(cfg.a, cfg.big_a, cfg.variant, cfg.alpha)?;
    if cfg.dim < 1 || !(cfg.radius > 0.0) || !(cfg.h > 0.0) || cfg.scaling_radii.iter().any(|r| !(*r > 0.0)) {
        bail!("need dim >= 1 and positive radius, h and scaling radii");
    }

    let mut out = Outcome::default();
    let ball = principal_eigenvalue_ball(&p, cfg.dim, cfg.radius)?;

    let mut scaled = Vec::new();
    for &r in &cfg.scaling_radii {
        let l = principal_eigenvalue_ball(&p, cfg.dim, r)?;
        scaled.push(json!({"R": r, "lambda": l, "lambda_R_pow": l * r.powf(2.0 + p.alpha)}));
    }
    let invariants: Vec<f64> = scaled.iter().map(|s| s["lambda_R_pow"].as_f64().unwrap_or(f64::NAN)).collect();
    let reference = ball * cfg.radius.powf(2.0 + p.alpha);
    let spread = invariants
        .iter()
        .map(|v| (v - reference).abs() / reference)
        .fold(0.0, f64::max);
    out.checks.push(Check::new("scaling lambda R^(2+alpha)", spread, "<=", cfg.scaling_tol));

    let mut grid = json!(null);
    if p.alpha == 0.0 && cfg.dim == 2 {
        let dom = build_domain(&Shape::Disk { radius: cfg.radius }, cfg.h)?;
        let e = principal_eigenvalue_grid_with(&p, &dom, &GridEigenOptions::default())?;
        let rel = (e.lambda - ball).abs() / ball;
        out.checks.push(Check::new("grid vs shooting", rel, "<=", cfg.agreement_tol));
        grid = json!({"lambda": e.lambda, "iterations": e.iterations, "relative_difference": rel});
        if cfg.export_field {
            let mut t = Table::new("eigen_field.csv", &["x", "y", "phi"]);
            for &k in &dom.interior {
                let [x, y] = dom.xy(k);
                t.push_numbers(&[x, y, e.field.values[k]]);
            }
            out.tables.push(t);
        }
    }
    out.results = json!({
        "ball_lambda": ball,
        "grid": grid,
        "scaling": scaled,
        "normalization": "sup",
    });
    Ok((effective, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_disk() {
        let (_, out) = run(&json!({"h": 0.05, "agreement_tol": 0.05})).unwrap();
        assert!(out.checks.iter().all(|c| c.pass), "{:?}", out.checks);
    }

    #[test]
    fn inverted_ellipticity_rejected() {
        assert!(run(&json!({"a": 2.0, "A": 1.0})).is_err());
    }
}
