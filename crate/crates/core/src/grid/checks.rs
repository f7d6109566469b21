//! Discrete comparison, small-domain maximum principle and randomized
//! property suites for the scheme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::domain::{build_domain, GridDomain, GridField, Link, Shape};
use super::scheme::{default_floor, discretize_f, node_value, SchemeKind};
use super::solve::{solve_dirichlet, BoundaryData, GridSource};
use crate::error::{LabError, Result};
use crate::pucci::{PucciParams, Variant};
use crate::radial::SourceSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `max (u1 - u2)^+` over interior nodes.
    pub max_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Solves with data `g1 <= g2` and checks `u1 <= u2` up to `2h |u2|_inf`.
pub fn comparison_check(
    params: &PucciParams,
    spec: &SourceSpec,
    dom: &GridDomain,
    g1: &BoundaryData,
    g2: &BoundaryData,
) -> Result<ComparisonReport> {
    if spec.case(params.alpha).is_none() {
        return Err(LabError::InvalidParams(format!(
            "source {spec:?} meets neither comparison hypothesis"
        )));
    }
    for b in &dom.boundary {
        let [x, y] = b.point;
        if g1.eval(x, y) > g2.eval(x, y) {
            return Err(LabError::InvalidParams(format!(
                "boundary data are not ordered at ({x}, {y})"
            )));
        }
    }
    let f = GridSource::Spec(*spec);
    let u1 = solve_dirichlet(params, dom, &f, g1)?;
    let u2 = solve_dirichlet(params, dom, &f, g2)?;
    let max_gap = u1.max_difference(&u2, dom).max(0.0);
    let tolerance = 2.0 * dom.h * u2.sup_norm(dom);
    Ok(ComparisonReport {
        max_gap,
        tolerance,
        pass: max_gap <= tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallDomainLevel {
    pub side: f64,
    pub area: f64,
    /// Largest interior value of `w`; `NaN` when the solve failed.
    pub max_w: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallDomainReport {
    pub levels: Vec<SmallDomainLevel>,
    /// Largest side from which every smaller square passes.
    pub threshold_side: Option<f64>,
    pub tolerance: f64,
}

/// Controls for [`small_domain_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmallDomainOptions {
    pub initial_side: f64,
    pub levels: usize,
    pub cells_per_side: usize,
    /// Nonnegative right-hand side `rho`.
    pub rho: f64,
    /// Boundary value `-g <= 0`.
    pub boundary_value: f64,
}

impl Default for SmallDomainOptions {
    fn default() -> Self {
        Self {
            initial_side: 4.0,
            levels: 5,
            cells_per_side: 32,
            rho: 1.0,
            boundary_value: 0.0,
        }
    }
}

/// On squares shrinking by halves, solves `M+ w + L w = rho >= 0` with
/// `w = boundary_value <= 0` on the boundary, so `w` satisfies
/// `M+ w + L w >= 0`, and checks `w <= tol` inside.
pub fn small_domain_check(params: &PucciParams, l: f64, opts: &SmallDomainOptions) -> Result<SmallDomainReport> {
    if opts.rho < 0.0 || opts.boundary_value > 0.0 {
        return Err(LabError::InvalidParams(
            "need rho >= 0 and nonpositive boundary values".into(),
        ));
    }
    let plus = params.with_variant(Variant::Plus);
    let f = GridSource::Spec(SourceSpec::Affine { k: -opts.rho, slope: -l });
    let g = BoundaryData::Constant {
        value: opts.boundary_value,
    };
    let tolerance = 1e-9;
    let mut levels = Vec::new();
    for k in 0..opts.levels {
        let side = opts.initial_side / 2f64.powi(k as i32);
        let shape = Shape::square(side);
        let dom = build_domain(&shape, side / opts.cells_per_side as f64)?;
        let (max_w, pass) = match solve_dirichlet(&plus, &dom, &f, &g) {
            Ok(w) => {
                let m = dom
                    .interior
                    .iter()
                    .map(|&n| w.values[n])
                    .fold(f64::NEG_INFINITY, f64::max);
                (m, m <= tolerance * w.sup_norm(&dom).max(1.0))
            }
            Err(_) => (f64::NAN, false),
        };
        levels.push(SmallDomainLevel {
            side,
            area: side * side,
            max_w,
            pass,
        });
    }
    let mut threshold_side = None;
    for lv in levels.iter().rev() {
        if !lv.pass {
            break;
        }
        threshold_side = Some(lv.side);
    }
    Ok(SmallDomainReport {
        levels,
        threshold_side,
        tolerance,
    })
}

/// Largest `|u(x, y) - u(-y, x)|` over interior nodes; the grid and the
/// stencil are invariant under the quarter turn.
pub fn quarter_turn_defect(u: &GridField, dom: &GridDomain) -> f64 {
    let mut worst: f64 = 0.0;
    for &k in &dom.interior {
        let (i, j) = dom.offsets(k);
        match dom.node_at(-j, i) {
            Some(r) if dom.mask[r] => worst = worst.max((u.values[k] - u.values[r]).abs()),
            _ => return f64::INFINITY,
        }
    }
    worst
}

/// Outcome of one randomized property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Worst observed violation (property-specific units).
    pub worst: f64,
    pub pass: bool,
}

impl PropertyOutcome {
    fn new(name: &str, trials: usize, failures: usize, worst: f64) -> Self {
        Self {
            name: name.to_string(),
            trials,
            failures,
            worst,
            pass: failures == 0,
        }
    }
}

fn random_params(rng: &mut ChaCha8Rng, alpha: f64) -> PucciParams {
    let a = rng.random_range(0.2..1.0);
    let big_a = a * rng.random_range(1.0..4.0);
    let variant = if rng.random_bool(0.5) { Variant::Plus } else { Variant::Minus };
    PucciParams::new(a, big_a, variant, alpha).expect("valid random parameters")
}

fn test_domains() -> Result<Vec<GridDomain>> {
    Ok(vec![
        build_domain(&Shape::Disk { radius: 1.0 }, 0.1)?,
        build_domain(&Shape::Ellipse { ax: 1.5, ay: 0.8 }, 0.1)?,
        build_domain(&Shape::square(1.6), 0.1)?,
    ])
}

fn random_field(rng: &mut ChaCha8Rng, dom: &GridDomain) -> GridField {
    let mut u = dom.zeros();
    for &k in &dom.interior {
        u.values[k] = rng.random_range(-1.0..1.0);
    }
    for v in u.boundary_values.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    u
}

/// Raises one stencil neighbor of a random cell and checks that the
/// operator at that cell does not decrease. Counts violations.
pub fn monotonicity_trials(seed: u64, trials: usize, kind: SchemeKind) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doms = test_domains()?;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let dom = &doms[rng.random_range(0..doms.len())];
        let params = random_params(&mut rng, 0.0);
        let u = random_field(&mut rng, dom);
        let p = rng.random_range(0..dom.interior_count());
        let l = rng.random_range(0..dom.stencil.len());
        let plus = rng.random_bool(0.5);
        let bump = rng.random_range(0.01..1.0);
        let mut v = u.clone();
        match dom.link(p, l, plus) {
            Link::Node(q) => v.values[dom.interior[q as usize]] += bump,
            Link::Cut { index, .. } => v.boundary_values[index as usize] += bump,
        }
        let before = node_value(&params, dom, &u, p, kind, 0.0);
        let after = node_value(&params, dom, &v, p, kind, 0.0);
        let drop = before - after;
        if drop > 1e-9 * before.abs().max(1.0) {
            failures += 1;
            worst = worst.max(drop);
        }
    }
    let name = match kind {
        SchemeKind::WideStencil => "monotone_scheme",
        SchemeKind::CentralHessian => "monotone_scheme_negative_control",
    };
    Ok(PropertyOutcome::new(name, trials, failures, worst))
}

/// `discretize_f(Minus, u) == -discretize_f(Plus, -u)` bitwise.
pub fn duality_trials(seed: u64, trials: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doms = test_domains()?;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let dom = &doms[rng.random_range(0..doms.len())];
        let alpha = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(-0.5..2.0) };
        let plus = random_params(&mut rng, alpha).with_variant(Variant::Plus);
        let u = random_field(&mut rng, dom);
        let a = discretize_f(&plus.with_variant(Variant::Minus), dom, &u);
        let b = discretize_f(&plus, dom, &u.negated());
        let d = dom
            .interior
            .iter()
            .map(|&k| (a.values[k] + b.values[k]).abs())
            .fold(0.0, f64::max);
        if d != 0.0 {
            failures += 1;
            worst = worst.max(d);
        }
    }
    Ok(PropertyOutcome::new("plus_minus_duality", trials, failures, worst))
}

/// `F(s u) = s^(1+alpha) F(u)` for `s > 0`, relative error `1e-10`.
pub fn homogeneity_trials(seed: u64, trials: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doms = test_domains()?;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let dom = &doms[rng.random_range(0..doms.len())];
        let alpha = rng.random_range(-0.5..2.0);
        let params = random_params(&mut rng, alpha);
        let s = rng.random_range(0.1..10.0);
        let u = random_field(&mut rng, dom);
        let a = discretize_f(&params, dom, &u.scaled(s));
        let b = discretize_f(&params, dom, &u);
        let floor = default_floor(alpha);
        let factor = s.powf(1.0 + alpha);
        let mut rel: f64 = 0.0;
        for (p, &k) in dom.interior.iter().enumerate() {
            // Skip cells where the gradient floor is active.
            let g = super::scheme::gradient(dom, &u, p);
            if floor > 0.0 && g[0].hypot(g[1]) * s.min(1.0) <= floor {
                continue;
            }
            let want = factor * b.values[k];
            rel = rel.max((a.values[k] - want).abs() / want.abs().max(1e-300));
        }
        if rel > 1e-10 {
            failures += 1;
        }
        worst = worst.max(rel);
    }
    Ok(PropertyOutcome::new("f_homogeneity", trials, failures, worst))
}

/// Random ordered constant data and sources from both comparison cases.
pub fn comparison_trials(seed: u64, trials: usize) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doms = test_domains()?;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let dom = &doms[rng.random_range(0..doms.len())];
        let params = random_params(&mut rng, 0.0);
        let (spec, lo) = match rng.random_range(0..3) {
            0 => (SourceSpec::Constant { k: rng.random_range(-1.0..2.0) }, -1.0),
            1 => (
                SourceSpec::Affine {
                    k: rng.random_range(-1.0..2.0),
                    slope: rng.random_range(0.0..3.0),
                },
                -1.0,
            ),
            // Positive solutions for the power split: nonnegative data.
            _ => (
                SourceSpec::PowerPair {
                    lambda: rng.random_range(0.0..1.0),
                    mu: rng.random_range(0.0..2.0),
                    beta: 3.0,
                },
                0.0,
            ),
        };
        let c1 = rng.random_range(lo..0.5);
        let c2 = c1 + rng.random_range(0.0..0.5);
        let r = comparison_check(
            &params,
            &spec,
            dom,
            &BoundaryData::Constant { value: c1 },
            &BoundaryData::Constant { value: c2 },
        )?;
        if !r.pass {
            failures += 1;
        }
        worst = worst.max(r.max_gap);
    }
    Ok(PropertyOutcome::new("comparison", trials, failures, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_examples() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.1).unwrap();
        let lap = PucciParams::laplacian();
        let zero = BoundaryData::zero();
        let up = BoundaryData::Constant { value: 0.1 };
        let r = comparison_check(&lap, &SourceSpec::Affine { k: 1.0, slope: 1.0 }, &dom, &zero, &up).unwrap();
        assert!(r.pass);
        let pair = SourceSpec::PowerPair { lambda: 0.5, mu: 1.0, beta: 3.0 };
        assert!(comparison_check(&lap, &pair, &dom, &zero, &up).unwrap().pass);
        let same = comparison_check(&lap, &SourceSpec::Constant { k: 1.0 }, &dom, &up, &up).unwrap();
        assert_eq!(same.max_gap, 0.0);
        assert!(comparison_check(&lap, &SourceSpec::Constant { k: 1.0 }, &dom, &up, &zero).is_err());
        let rising = SourceSpec::Affine { k: 0.0, slope: -1.0 };
        assert!(comparison_check(&lap, &rising, &dom, &zero, &up).is_err());
    }

    #[test]
    fn small_domain_threshold_for_laplacian() {
        // First Dirichlet eigenvalue of a square of side s is 2 pi^2 / s^2,
        // so L = 10 fails above s = pi sqrt(1/5) ~ 1.405 and passes below.
        let opts = SmallDomainOptions {
            cells_per_side: 16,
            ..SmallDomainOptions::default()
        };
        let r = small_domain_check(&PucciParams::laplacian(), 10.0, &opts).unwrap();
        assert_eq!(r.threshold_side, Some(1.0), "{r:?}");
        let r0 = small_domain_check(&PucciParams::laplacian(), 0.0, &opts).unwrap();
        assert_eq!(r0.threshold_side, Some(4.0));
    }

    #[test]
    fn property_suites_are_green() {
        for out in [
            monotonicity_trials(7, 100, SchemeKind::WideStencil).unwrap(),
            duality_trials(7, 20).unwrap(),
            homogeneity_trials(7, 20).unwrap(),
            comparison_trials(7, 10).unwrap(),
        ] {
            assert!(out.pass, "{out:?}");
        }
    }

    #[test]
    fn negative_control_is_detected() {
        let out = monotonicity_trials(7, 200, SchemeKind::CentralHessian).unwrap();
        assert!(out.failures > 0);
    }

    #[test]
    fn disk_solution_is_quarter_turn_invariant() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        let p = PucciParams::new(0.5, 2.0, Variant::Minus, 0.0).unwrap();
        let u = solve_dirichlet(&p, &dom, &GridSource::Spec(SourceSpec::Constant { k: 1.0 }), &BoundaryData::zero())
            .unwrap();
        assert!(quarter_turn_defect(&u, &dom) <= 2.0 * dom.h);
    }
}
