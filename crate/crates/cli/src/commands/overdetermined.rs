//! The Neumann constant and the radius of the overdetermined ball.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{typed, Outcome};
use crate::report::{Check, Table};
use pucci_lab::radial::{
    closed_form_constant, neumann_constant, neumann_for_radius, overdetermined_radius, shoot, SourceSpec,
};
use pucci_lab::{PucciParams, Variant};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverdeterminedConfig {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub alphas: Vec<f64>,
    pub dims: Vec<usize>,
    pub radii: Vec<f64>,
    /// Neumann data `c < 0` mapped to radii.
    pub neumann: Vec<f64>,
    pub step: f64,
    pub tol: f64,
    /// Tolerance of the Laplacian identity `c = -R/N`.
    pub laplacian_tol: f64,
}

impl Default for OverdeterminedConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            big_a: 1.0,
            alphas: vec![-0.5, 0.0, 1.0],
            dims: vec![2, 3],
            radii: vec![0.5, 1.0, 2.0],
            neumann: vec![-0.5],
            step: 1e-4,
            tol: 1e-5,
            laplacian_tol: 1e-10,
        }
    }
}

pub fn run(raw: &Value) -> Result<(Value, Outcome)> {
    let (cfg, effective): (OverdeterminedConfig, Value) = typed(raw)?;
    let params: Vec<PucciParams> = cfg
        .alphas
        .iter()
        .map(|&alpha| PucciParams::new(cfg.a, cfg.big_a, Variant::Plus, alpha))
        .collect::<Result<_, _>>()?;
    if let Some(c) = cfg.neumann.iter().find(|c| !(**c < 0.0)) {
        bail!("Neumann data must be negative, got {c}");
    }
    if cfg.radii.iter().any(|r| !(*r > 0.0)) || cfg.dims.iter().any(|n| *n < 1) || !(cfg.step > 0.0) {
        bail!("radii and step must be positive and dimensions at least 1");
    }

    let mut out = Outcome::default();
    let mut table = Table::new(
        "overdetermined.csv",
        &["alpha", "N", "R", "c", "R_roundtrip", "c_shooting"],
    );
    let mut worst_roundtrip: f64 = 0.0;
    let mut worst_shooting: f64 = 0.0;
    let mut maps = Vec::new();
    for p in &params {
        for &n in &cfg.dims {
            for &r in &cfg.radii {
                let c = neumann_for_radius(p, n, r)?;
                let back = overdetermined_radius(p, n, c)?;
                let m = closed_form_constant(p, n, r, 0.0)?;
                let prof = shoot(p, n, &SourceSpec::Constant { k: 1.0 }, m, 1.5 * r, cfg.step * r)?;
                let c_shoot = neumann_constant(&prof)?;
                worst_roundtrip = worst_roundtrip.max((back - r).abs());
                worst_shooting = worst_shooting.max((c_shoot - c).abs());
                table.push_numbers(&[p.alpha, n as f64, r, c, back, c_shoot]);
            }
            for &c in &cfg.neumann {
                let radius = overdetermined_radius(p, n, c)?;
                let back = neumann_for_radius(p, n, radius)?;
                worst_roundtrip = worst_roundtrip.max((back - c).abs());
                maps.push(json!({"alpha": p.alpha, "N": n, "c": c, "R": radius}));
            }
        }
    }
    out.checks.push(Check::new("round-trip residual", worst_roundtrip, "<=", cfg.tol));
    out.checks.push(Check::new("shooting Neumann residual", worst_shooting, "<=", cfg.tol));

    // Laplacian: c = -R / N.
    let lap = PucciParams::laplacian();
    let mut lap_err: f64 = 0.0;
    for &n in &cfg.dims {
        for &r in &cfg.radii {
            lap_err = lap_err.max((neumann_for_radius(&lap, n, r)? + r / n as f64).abs());
        }
    }
    out.checks.push(Check::new("Laplacian c = -R/N", lap_err, "<=", cfg.laplacian_tol));

    out.results = json!({
        "max_roundtrip_residual": worst_roundtrip,
        "max_shooting_residual": worst_shooting,
        "laplacian_error": lap_err,
        "radius_of_neumann": maps,
    });
    out.tables.push(table);
    Ok((effective, out))
}
