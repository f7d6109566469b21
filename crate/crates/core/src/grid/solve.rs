//! Dirichlet solves for `|Du|^alpha M(D^2 u) + f(u) = 0`.
//!
//! The default strategy is policy iteration: freeze the extremal pair and
//! the coefficient of each second difference, add `f'(u)` on the diagonal
//! and take a Newton step with a sparse direct solve. For `alpha != 0` the
//! gradient factor is frozen at the current iterate as well. It is built
//! from one-sided differences (floored at [`GRADIENT_FLOOR`]) so that the
//! factor does not vanish at a symmetric maximum when `alpha > 0`; this is
//! a regularization of the experimental `alpha != 0` mode and the reported
//! residual refers to it. The explicit damped
//! iteration is kept for cross-checks on coarse grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::{GridDomain, GridField, Link};
use super::scheme::{gradient_factor, one_sided_gradient_norm, pucci_part, second_difference_weights, GRADIENT_FLOOR};
use crate::error::{LabError, Result};
use crate::pucci::PucciParams;
use crate::radial::SourceSpec;
use crate::sparse::SystemBuilder;

/// Zeroth-order term on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSource {
    Spec(SourceSpec),
    /// Fixed values aligned with grid nodes (independent of `u`).
    Field(Vec<f64>),
}

impl GridSource {
    #[inline]
    fn eval(&self, node: usize, u: f64, alpha: f64) -> f64 {
        match self {
            GridSource::Spec(s) => s.eval(u, alpha),
            GridSource::Field(v) => v[node],
        }
    }

    #[inline]
    fn derivative(&self, u: f64, alpha: f64) -> f64 {
        match self {
            GridSource::Spec(s) => s.derivative(u, alpha),
            GridSource::Field(_) => 0.0,
        }
    }
}

/// Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryData {
    Constant { value: f64 },
    /// `value + gx x + gy y`.
    Linear { value: f64, gx: f64, gy: f64 },
}

impl BoundaryData {
    pub fn zero() -> Self {
        BoundaryData::Constant { value: 0.0 }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            BoundaryData::Constant { value } => value,
            BoundaryData::Linear { value, gx, gy } => value + gx * x + gy * y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Policy,
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub strategy: Strategy,
    /// Converged when the sup residual is at most `tol * max(1, |u|_inf)`.
    pub tol: f64,
    pub max_iters: usize,
    /// Starting guess; its boundary values are overwritten by the data.
    pub initial: Option<GridField>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Policy,
            tol: 1e-8,
            max_iters: 200,
            initial: None,
        }
    }
}

impl SolveOptions {
    pub fn explicit(max_iters: usize) -> Self {
        Self {
            strategy: Strategy::Explicit,
            max_iters,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Solves with default options.
pub fn solve_dirichlet(
    params: &PucciParams,
    dom: &GridDomain,
    f: &GridSource,
    g: &BoundaryData,
) -> Result<GridField> {
    solve_dirichlet_with(params, dom, f, g, &SolveOptions::default()).map(|(u, _)| u)
}

pub fn solve_dirichlet_with(
    params: &PucciParams,
    dom: &GridDomain,
    f: &GridSource,
    g: &BoundaryData,
    opts: &SolveOptions,
) -> Result<(GridField, SolveInfo)> {
    params.validate()?;
    if let GridSource::Spec(s) = f {
        s.validate(params.alpha)?;
    }
    if let GridSource::Field(v) = f {
        if v.len() != dom.node_count() {
            return Err(LabError::InvalidParams(format!(
                "source field has {} values, grid has {} nodes",
                v.len(),
                dom.node_count()
            )));
        }
    }
    let mut u = match &opts.initial {
        Some(init) if init.values.len() == dom.node_count() => init.clone(),
        Some(_) => return Err(LabError::InvalidParams("initial field does not match grid".into())),
        None => dom.zeros(),
    };
    u.boundary_values = dom.boundary.iter().map(|b| g.eval(b.point[0], b.point[1])).collect();
    match opts.strategy {
        Strategy::Policy => policy_iteration(params, dom, f, u, opts),
        Strategy::Explicit => explicit_iteration(params, dom, f, u, opts),
    }
}

/// Gradient floor used inside the solver.
fn solver_floor(alpha: f64) -> f64 {
    if alpha == 0.0 {
        0.0
    } else {
        GRADIENT_FLOOR
    }
}

/// Residual `G M(u) + f(u)` at every interior position, with the frozen
/// gradient factors and extremal pairs.
fn residual(
    params: &PucciParams,
    dom: &GridDomain,
    f: &GridSource,
    u: &GridField,
) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let floor = solver_floor(params.alpha);
    let parts: Vec<(f64, f64, usize)> = (0..dom.interior_count())
        .into_par_iter()
        .map(|p| {
            let factor = if params.alpha == 0.0 {
                1.0
            } else {
                gradient_factor(params.alpha, one_sided_gradient_norm(dom, u, p), floor)
            };
            let (m, pair) = pucci_part(params, dom, u, p);
            let node = dom.interior[p];
            (factor * m + f.eval(node, u.values[node], params.alpha), factor, pair)
        })
        .collect();
    let mut r = Vec::with_capacity(parts.len());
    let mut factors = Vec::with_capacity(parts.len());
    let mut pairs = Vec::with_capacity(parts.len());
    for (a, b, c) in parts {
        r.push(a);
        factors.push(b);
        pairs.push(c);
    }
    (r, factors, pairs)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn policy_iteration(
    params: &PucciParams,
    dom: &GridDomain,
    f: &GridSource,
    mut u: GridField,
    opts: &SolveOptions,
) -> Result<(GridField, SolveInfo)> {
    let n = dom.interior_count();
    let mut history = Vec::new();
    let (mut r, mut factors, mut pairs) = residual(params, dom, f, &u);
    let mut res = sup(&r);
    for it in 0..opts.max_iters {
        history.push(res);
        if !res.is_finite() {
            break;
        }
        if res <= opts.tol * u.sup_norm(dom).max(1.0) {
            return Ok((u, SolveInfo { iterations: it, residual: res, history }));
        }
        let mut sys = SystemBuilder::new(n);
        for p in 0..n {
            let node = dom.interior[p];
            let (l1, l2) = dom.stencil.pairs[pairs[p]];
            let mut diag = f.derivative(u.values[node], params.alpha);
            for l in [l1, l2] {
                let delta = super::scheme::line_second_difference(dom, &u, p, l);
                let w = factors[p] * params.weight(delta);
                let step = dom.stencil.length(l) * dom.h;
                let tp = fraction(dom.link(p, l, true));
                let tm = fraction(dom.link(p, l, false));
                let (cp, cm) = second_difference_weights(step, tp, tm);
                diag -= w * (cp + cm);
                for (link, c) in [(dom.link(p, l, true), cp), (dom.link(p, l, false), cm)] {
                    if let Link::Node(q) = link {
                        sys.add(p, q as usize, w * c);
                    }
                }
            }
            sys.add(p, p, diag);
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let du = sys.solve(&neg)?;

        // Full policy steps need not decrease the sup residual, so for
        // alpha = 0 only steps that blow it up are shortened. With a frozen
        // gradient factor the step is a Picard update and must decrease it.
        // The last trial is accepted either way.
        let growth = if params.alpha == 0.0 { 10.0 } else { 1.0 };
        let mut theta = 1.0;
        loop {
            let mut trial = u.clone();
            for p in 0..n {
                trial.values[dom.interior[p]] += theta * du[p];
            }
            let (tr, tf, tp) = residual(params, dom, f, &trial);
            let tres = sup(&tr);
            if tres < growth * res || theta < 1.0 / 64.0 {
                u = trial;
                r = tr;
                factors = tf;
                pairs = tp;
                res = tres;
                break;
            }
            theta *= 0.5;
        }
    }
    Err(LabError::IterationLimit {
        iterations: opts.max_iters,
        residual: res,
        history,
    })
}

#[inline]
fn fraction(link: Link) -> f64 {
    match link {
        Link::Node(_) => 1.0,
        Link::Cut { t, .. } => t,
    }
}

/// Fixed step from the largest diagonal weight over all pairs.
pub fn explicit_step(params: &PucciParams, dom: &GridDomain) -> f64 {
    let mut worst: f64 = 0.0;
    for p in 0..dom.interior_count() {
        for &(l1, l2) in &dom.stencil.pairs {
            let mut s = 0.0;
            for l in [l1, l2] {
                let step = dom.stencil.length(l) * dom.h;
                let (cp, cm) = second_difference_weights(
                    step,
                    fraction(dom.link(p, l, true)),
                    fraction(dom.link(p, l, false)),
                );
                s += params.big_a * (cp + cm);
            }
            worst = worst.max(s);
        }
    }
    0.9 / worst
}

fn explicit_iteration(
    params: &PucciParams,
    dom: &GridDomain,
    f: &GridSource,
    mut u: GridField,
    opts: &SolveOptions,
) -> Result<(GridField, SolveInfo)> {
    if params.alpha != 0.0 {
        return Err(LabError::Unsupported(
            "the explicit iteration is implemented for alpha = 0".into(),
        ));
    }
    let tau = explicit_step(params, dom);
    let mut history = Vec::new();
    let mut res = f64::INFINITY;
    for it in 0..opts.max_iters {
        let (r, _, _) = residual(params, dom, f, &u);
        res = sup(&r);
        if it % 100 == 0 {
            history.push(res);
        }
        if !res.is_finite() {
            break;
        }
        if res <= opts.tol * u.sup_norm(dom).max(1.0) {
            history.push(res);
            return Ok((u, SolveInfo { iterations: it, residual: res, history }));
        }
        for (p, rp) in r.iter().enumerate() {
            u.values[dom.interior[p]] += tau * rp;
        }
    }
    Err(LabError::IterationLimit {
        iterations: opts.max_iters,
        residual: res,
        history,
    })
}
