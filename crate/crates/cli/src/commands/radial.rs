//! Shooting solutions against the closed form for a constant source.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{typed, Outcome};
use crate::report::{Check, Table};
use pucci_lab::radial::{closed_form_constant, shoot, SourceSpec};
use pucci_lab::{PucciParams, Variant};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialConfig {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub variant: Variant,
    pub alpha: f64,
    /// Exponents to sweep; `alpha` is used when empty.
    pub alphas: Vec<f64>,
    pub dims: Vec<usize>,
    pub radius: f64,
    /// Constant source `f = k`.
    pub k: f64,
    pub step: f64,
    pub tol: f64,
    /// Every `csv_stride`-th profile sample goes to the CSV.
    pub csv_stride: usize,
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            big_a: 1.0,
            variant: Variant::Plus,
            alpha: 0.0,
            alphas: Vec::new(),
            dims: vec![2],
            radius: 1.0,
            k: 1.0,
            step: 1e-4,
            tol: 1e-5,
            csv_stride: 100,
        }
    }
}

pub fn run(raw: &Value) -> Result<(Value, Outcome)> {
    let (cfg, effective): (RadialConfig, Value) = typed(raw)?;
    let alphas = if cfg.alphas.is_empty() {
        vec![cfg.alpha]
    } else {
        cfg.alphas.clone()
    };
    // Validate everything before any compute.
    let mut cases = Vec::new();
    for &alpha in &alphas {
        let p = PucciParams::new(cfg.a, cfg.big_a, cfg.variant, alpha)?;
        for &n in &cfg.dims {
            if n < 1 {
                bail!("dimension must be at least 1");
            }
            cases.push((p, n));
        }
    }
    if !(cfg.radius > 0.0 && cfg.step > 0.0 && cfg.k >= 0.0 && cfg.csv_stride > 0) {
        bail!("need radius > 0, step > 0, k >= 0 and csv_stride > 0");
    }

    let mut out = Outcome::default();
    let mut table = Table::new("radial_profile.csv", &["alpha", "N", "r", "u", "du", "closed_form"]);
    let mut rows = Vec::new();
    let source = SourceSpec::Constant { k: cfg.k };
    for (p, n) in cases {
        if cfg.k == 0.0 {
            // f = 0: the profile stays at its center value.
            let m = 1.0;
            let prof = shoot(&p, n, &source, m, cfg.radius, cfg.step)?;
            let flat = prof.u.iter().all(|u| *u == m) && prof.first_zero.is_none();
            out.checks.push(Check::flag(format!("constant profile alpha={} N={n}", p.alpha), flat));
            rows.push(json!({"alpha": p.alpha, "N": n, "degenerate": true}));
            continue;
        }
        // Closed form for f = k: scale the f = 1 solution by k^(1/(1+alpha)).
        let scale = cfg.k.powf(1.0 / (1.0 + p.alpha));
        let closed = |r: f64| closed_form_constant(&p, n, cfg.radius, r).map(|v| scale * v);
        let m = closed(0.0)?;
        let prof = shoot(&p, n, &source, m, 1.5 * cfg.radius, cfg.step)?;
        let mut err: f64 = 0.0;
        for (i, ((r, u), du)) in prof.radii.iter().zip(&prof.u).zip(&prof.du).enumerate() {
            if *r > cfg.radius {
                break;
            }
            let c = closed(*r)?;
            err = err.max((u - c).abs());
            if i % cfg.csv_stride == 0 {
                table.push_numbers(&[p.alpha, n as f64, *r, *u, *du, c]);
            }
        }
        let zero = prof.first_zero.unwrap_or(f64::NAN);
        out.checks.push(Check::new(format!("sup error alpha={} N={n}", p.alpha), err, "<=", cfg.tol));
        rows.push(json!({
            "alpha": p.alpha,
            "N": n,
            "degenerate": false,
            "center_value": m,
            "first_zero": zero,
            "sup_error": err,
        }));
    }
    out.results = json!({ "cases": rows });
    out.tables.push(table);
    Ok((effective, out))
}
