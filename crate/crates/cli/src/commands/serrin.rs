//! Symmetry diagnostics: Neumann traces, moving-plane gaps and boundary
//! Hessians on a disk and an ellipse.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{typed, Outcome};
use crate::report::{Check, Table};
use pucci_lab::grid::{
    build_domain, neumann_trace, reflection_gap_partial, reflection_sweep, solve_dirichlet, trace_stats,
    BoundaryData, GridDomain, GridField, GridSource, Shape, TraceSample,
};
use pucci_lab::pucci::boundary_hessian;
use pucci_lab::radial::{closed_form_constant, closed_form_slope, SourceSpec};
use pucci_lab::{PucciParams, SymMatrix, Variant};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SerrinConfig {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub variant: Variant,
    pub alpha: f64,
    /// Constant source `f = k`.
    pub k: f64,
    pub h: f64,
    pub disk_radius: f64,
    /// Semi-axes of the ellipse.
    pub ellipse: [f64; 2],
    /// Sweep directions, evenly spaced in `[0, pi)`.
    pub directions: usize,
    /// Positions per sweep.
    pub positions: usize,
    pub trace_std_tol: f64,
    pub spread_min: f64,
    /// Gap tolerance in units of `h`.
    pub gap_factor: f64,
    /// Largest deviation of the ellipse trace from the exact solution (equal ellipticity only).
    pub ellipse_oracle_tol: f64,
    /// `(a, A)` pairs for the boundary Hessian cross-check, with tolerances.
    pub hessian_pairs: Vec<[f64; 2]>,
    pub hessian_tols: Vec<f64>,
    pub hessian_points: usize,
    /// Step of the second differences of the closed form.
    pub hessian_step: f64,
}

impl Default for SerrinConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            big_a: 1.0,
            variant: Variant::Plus,
            alpha: 0.0,
            k: 1.0,
            h: 0.01,
            disk_radius: 1.0,
            ellipse: [2.0, 1.0],
            directions: 8,
            positions: 10,
            trace_std_tol: 5e-3,
            spread_min: 0.2,
            gap_factor: 2.0,
            ellipse_oracle_tol: 0.02,
            hessian_pairs: vec![[1.0, 1.0], [1.0, 1.5]],
            hessian_tols: vec![5e-3, 2e-2],
            hessian_points: 16,
            hessian_step: 1e-3,
        }
    }
}

fn solve(p: &PucciParams, shape: &Shape, h: f64, k: f64) -> Result<(GridDomain, GridField)> {
    let dom = build_domain(shape, h)?;
    let u = solve_dirichlet(p, &dom, &GridSource::Spec(SourceSpec::Constant { k }), &BoundaryData::zero())?;
    Ok((dom, u))
}

fn push_trace(t: &mut Table, shape: &str, trace: &[TraceSample], exact: impl Fn(&TraceSample) -> f64) {
    for s in trace {
        t.push(vec![
            shape.to_string(),
            s.arc.to_string(),
            s.point[0].to_string(),
            s.point[1].to_string(),
            s.value.to_string(),
            exact(s).to_string(),
        ]);
    }
}

/// Largest entry difference between the boundary Hessian and second
/// differences of the closed form at `points` boundary points of the disk.
/// Also reports whether the sign patterns agree.
fn hessian_cross_check(p: &PucciParams, radius: f64, k: f64, points: usize, step: f64) -> Result<(f64, bool)> {
    let scale = k.powf(1.0 / (1.0 + p.alpha));
    let c = scale * closed_form_slope(p, 2, radius)?;
    let bh = boundary_hessian(p, c, k, &SymMatrix::diag(&[1.0 / radius]))?;
    // The closed form on a larger ball, shifted to vanish on |x| = radius,
    // extends the solution smoothly across the boundary.
    let outer = 2.0 * radius;
    let shift = closed_form_constant(p, 2, outer, radius)?;
    let u = |x: f64, y: f64| -> Result<f64> { Ok(scale * (closed_form_constant(p, 2, outer, x.hypot(y))? - shift)) };
    let mut worst: f64 = 0.0;
    let mut signs = true;
    for i in 0..points {
        let th = 2.0 * PI * i as f64 / points as f64;
        let (ct, st) = (th.cos(), th.sin());
        let x0 = [radius * ct, radius * st];
        // Frame: tangent first, inner normal last.
        let frame = [[-st, ct], [-ct, -st]];
        let at = |s: f64, e: [f64; 2], t: f64, f: [f64; 2]| u(x0[0] + s * e[0] + t * f[0], x0[1] + s * e[1] + t * f[1]);
        let mut fd = SymMatrix::zeros(2);
        for a in 0..2 {
            let e = frame[a];
            let d = (at(step, e, 0.0, e)? - 2.0 * at(0.0, e, 0.0, e)? + at(-step, e, 0.0, e)?) / (step * step);
            fd.set(a, a, d);
        }
        let (e, f) = (frame[0], frame[1]);
        let mixed = (at(step, e, step, f)? - at(step, e, -step, f)? - at(-step, e, step, f)? + at(-step, e, -step, f)?)
            / (4.0 * step * step);
        fd.set(0, 1, mixed);
        for a in 0..2 {
            for b in a..2 {
                worst = worst.max((fd.get(a, b) - bh.get(a, b)).abs());
            }
            signs &= fd.get(a, a).signum() == bh.get(a, a).signum();
        }
    }
    Ok((worst, signs))
}

pub fn run(raw: &Value) -> Result<(Value, Outcome)> {
    let (cfg, effective): (SerrinConfig, Value) = typed(raw)?;
    let p = PucciParams::new(cfg.a, cfg.big_a, cfg.variant, cfg.alpha)?;
    if !(cfg.h > 0.0 && cfg.disk_radius > 0.0 && cfg.k > 0.0) {
        bail!("need h > 0, disk_radius > 0 and k > 0");
    }
    if cfg.hessian_pairs.len() != cfg.hessian_tols.len() {
        bail!("hessian_pairs and hessian_tols must have equal length");
    }
    let hessian_params: Vec<PucciParams> = cfg
        .hessian_pairs
        .iter()
        .map(|[a, b]| PucciParams::new(*a, *b, Variant::Plus, cfg.alpha))
        .collect::<Result<_, _>>()?;
    let disk = Shape::Disk { radius: cfg.disk_radius }.normalized()?;
    let ellipse = Shape::Ellipse {
        ax: cfg.ellipse[0],
        ay: cfg.ellipse[1],
    }
    .normalized()?;

    let mut out = Outcome::default();
    let mut traces = Table::new("serrin_traces.csv", &["shape", "arc", "x", "y", "normal_derivative", "exact"]);
    let mut gaps_table = Table::new("serrin_gaps.csv", &["ex", "ey", "t", "gap"]);

    // Disk.
    let (ddom, du) = solve(&p, &disk, cfg.h, cfg.k)?;
    let dtrace = neumann_trace(&du, &ddom);
    let dstats = trace_stats(&dtrace);
    out.checks.push(Check::new("disk trace std", dstats.std_dev, "<=", cfg.trace_std_tol));
    let disk_exact = if p.a == p.big_a && p.alpha == 0.0 {
        Some(-cfg.k * cfg.disk_radius / (2.0 * p.a))
    } else {
        None
    };
    push_trace(&mut traces, "disk", &dtrace, |_| disk_exact.unwrap_or(f64::NAN));

    let mut worst_gap = f64::NEG_INFINITY;
    let mut sweeps = Vec::new();
    for i in 0..cfg.directions {
        let th = PI * i as f64 / cfg.directions.max(1) as f64;
        let (samples, t_star) = reflection_sweep(&du, &ddom, [th.cos(), th.sin()], cfg.positions)?;
        for s in &samples {
            worst_gap = worst_gap.max(s.gap);
            gaps_table.push_numbers(&[s.direction[0], s.direction[1], s.t, s.gap]);
        }
        sweeps.push(json!({"angle": th, "critical_position": t_star, "samples": samples.len()}));
    }
    out.checks.push(Check::new("disk reflection gaps", worst_gap, "<=", cfg.gap_factor * cfg.h));

    // Ellipse.
    let (edom, eu) = solve(&p, &ellipse, cfg.h, cfg.k)?;
    let etrace = neumann_trace(&eu, &edom);
    let estats = trace_stats(&etrace);
    out.checks.push(Check::new("ellipse trace spread", estats.spread, ">=", cfg.spread_min));
    let (ax, ay) = (cfg.ellipse[0], cfg.ellipse[1]);
    let ellipse_exact = |s: &TraceSample| {
        // u = q (1 - x^2/ax^2 - y^2/ay^2) solves a Delta u + k = 0.
        let q = cfg.k / p.a * ax * ax * ay * ay / (2.0 * (ax * ax + ay * ay));
        let [x, y] = s.point;
        let g = [-2.0 * q * x / (ax * ax), -2.0 * q * y / (ay * ay)];
        g[0] * s.normal[0] + g[1] * s.normal[1]
    };
    let mut oracle = json!(null);
    if p.a == p.big_a && p.alpha == 0.0 {
        let dev = etrace
            .iter()
            .map(|s| (s.value - ellipse_exact(s)).abs())
            .fold(0.0, f64::max);
        out.checks.push(Check::new("ellipse trace vs exact", dev, "<=", cfg.ellipse_oracle_tol));
        oracle = json!(dev);
        push_trace(&mut traces, "ellipse", &etrace, ellipse_exact);
    } else {
        push_trace(&mut traces, "ellipse", &etrace, |_| f64::NAN);
    }
    // Reflection across the diagonal is no symmetry of the ellipse; the
    // gap restricted to the domain exposes it.
    let diagonal_gap = reflection_gap_partial(&eu, &edom, [1.0, 1.0], 0.0)?;
    out.checks.push(Check::new("ellipse diagonal gap", diagonal_gap, ">", cfg.gap_factor * cfg.h));

    // Boundary Hessians.
    let mut hess = Vec::new();
    for (hp, tol) in hessian_params.iter().zip(&cfg.hessian_tols) {
        let (err, signs) = hessian_cross_check(hp, cfg.disk_radius, cfg.k, cfg.hessian_points, cfg.hessian_step)?;
        let label = format!("a={} A={}", hp.a, hp.big_a);
        out.checks.push(Check::new(format!("boundary Hessian {label}"), err, "<=", *tol));
        out.checks.push(Check::flag(format!("boundary Hessian signs {label}"), signs));
        hess.push(json!({"a": hp.a, "A": hp.big_a, "max_error": err, "signs_agree": signs}));
    }

    out.results = json!({
        "disk": {"trace": dstats, "exact_trace": disk_exact, "max_gap": worst_gap, "sweeps": sweeps},
        "ellipse": {"trace": estats, "max_oracle_deviation": oracle, "diagonal_gap": diagonal_gap},
        "boundary_hessian": hess,
    });
    out.tables.push(traces);
    out.tables.push(gaps_table);
    Ok((effective, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hessian_matches_closed_form() {
        for big_a in [1.0, 1.5] {
            let p = PucciParams::new(1.0, big_a, Variant::Plus, 0.0).unwrap();
            let (err, signs) = hessian_cross_check(&p, 1.0, 1.0, 8, 1e-3).unwrap();
            assert!(err < 1e-4 && signs, "{err}");
        }
    }

    #[test]
    fn coarse_run() {
        let cfg = json!({"h": 0.04, "trace_std_tol": 0.05, "gap_factor": 2.0, "ellipse_oracle_tol": 0.1,
            "directions": 3, "positions": 4});
        let (_, out) = run(&cfg).unwrap();
        assert!(out.checks.iter().all(|c| c.pass), "{:?}", out.checks);
    }
}
