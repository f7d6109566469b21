//! Wide-stencil discretization of `|Du|^alpha M(D^2 u)`.
//!
//! Along each stencil line the second difference uses the two neighbors
//! or, when an arm leaves the domain, the boundary crossing at fraction `t`
//! of the step. The Pucci term is the max (Plus) or min (Minus) over
//! orthogonal pairs of `sum w(delta) delta`. Every coefficient multiplying
//! a neighbor is nonnegative, so the scheme is monotone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::{GridDomain, GridField, Link};
use crate::pucci::{pucci, PucciParams, SymMatrix, Variant};

/// Gradient floor used when `alpha < 0`.
pub const GRADIENT_FLOOR: f64 = 1e-8;

/// Discretization variant. `CentralHessian` assembles the full Hessian from
/// centered differences; its cross term breaks monotonicity and it exists
/// only as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    #[default]
    WideStencil,
    CentralHessian,
}

/// Neighbor value and fraction of the full step on one side of a line.
#[inline]
pub(crate) fn arm(dom: &GridDomain, u: &GridField, p: usize, l: usize, plus: bool) -> (f64, f64, Option<usize>) {
    match dom.link(p, l, plus) {
        Link::Node(q) => (1.0, u.values[dom.interior[q as usize]], Some(q as usize)),
        Link::Cut { t, index } => (t, u.boundary_values[index as usize], None),
    }
}

/// Coefficients `(c_plus, c_minus)` of the non-uniform three-point second
/// difference; the center coefficient is `-(c_plus + c_minus)`.
#[inline]
pub(crate) fn second_difference_weights(step: f64, tp: f64, tm: f64) -> (f64, f64) {
    let s = 2.0 / (step * step * (tp + tm));
    (s / tp, s / tm)
}

/// Second difference of `u` at interior position `p` along line `l`.
#[inline]
pub fn line_second_difference(dom: &GridDomain, u: &GridField, p: usize, l: usize) -> f64 {
    let u0 = u.values[dom.interior[p]];
    let (tp, up, _) = arm(dom, u, p, l, true);
    let (tm, um, _) = arm(dom, u, p, l, false);
    let (cp, cm) = second_difference_weights(dom.stencil.length(l) * dom.h, tp, tm);
    cp * (up - u0) + cm * (um - u0)
}

/// Centered (non-uniform near the boundary) gradient at interior position `p`.
pub fn gradient(dom: &GridDomain, u: &GridField, p: usize) -> [f64; 2] {
    let u0 = u.values[dom.interior[p]];
    let mut g = [0.0; 2];
    for (c, &l) in dom.axis_lines().iter().enumerate() {
        let (tp, up, _) = arm(dom, u, p, l, true);
        let (tm, um, _) = arm(dom, u, p, l, false);
        g[c] = (tm * tm * (up - u0) - tp * tp * (um - u0)) / (dom.h * tp * tm * (tp + tm));
    }
    g
}

/// Gradient magnitude from the larger one-sided difference on each axis.
/// It vanishes only where `u` is locally flat, unlike the centered gradient
/// at a symmetric extremum.
pub fn one_sided_gradient_norm(dom: &GridDomain, u: &GridField, p: usize) -> f64 {
    let u0 = u.values[dom.interior[p]];
    let mut s = 0.0;
    for &l in dom.axis_lines().iter() {
        let (tp, up, _) = arm(dom, u, p, l, true);
        let (tm, um, _) = arm(dom, u, p, l, false);
        let d = ((up - u0) / (tp * dom.h)).abs().max(((u0 - um) / (tm * dom.h)).abs());
        s += d * d;
    }
    s.sqrt()
}

/// `|g|^alpha`, with the magnitude floored at `floor` when it is positive.
#[inline]
pub fn gradient_factor(alpha: f64, grad_norm: f64, floor: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        grad_norm.max(floor).powf(alpha)
    }
}

/// Floor applied by [`discretize_f`]: active only for `alpha < 0`.
#[inline]
pub(crate) fn default_floor(alpha: f64) -> f64 {
    if alpha < 0.0 {
        GRADIENT_FLOOR
    } else {
        0.0
    }
}

/// Pucci part at position `p`: value and index of the extremal pair.
pub fn pucci_part(params: &PucciParams, dom: &GridDomain, u: &GridField, p: usize) -> (f64, usize) {
    let mut best = match params.variant {
        Variant::Plus => f64::NEG_INFINITY,
        Variant::Minus => f64::INFINITY,
    };
    let mut which = 0;
    for (k, &(l1, l2)) in dom.stencil.pairs.iter().enumerate() {
        let s = params.scalar(line_second_difference(dom, u, p, l1))
            + params.scalar(line_second_difference(dom, u, p, l2));
        let better = match params.variant {
            Variant::Plus => s > best,
            Variant::Minus => s < best,
        };
        if better {
            best = s;
            which = k;
        }
    }
    (best, which)
}

/// Discrete `|Du|^alpha M(D^2 u)` at every interior cell; zero elsewhere.
pub fn discretize_f(params: &PucciParams, dom: &GridDomain, u: &GridField) -> GridField {
    discretize_f_with(params, dom, u, SchemeKind::WideStencil)
}

pub fn discretize_f_with(
    params: &PucciParams,
    dom: &GridDomain,
    u: &GridField,
    kind: SchemeKind,
) -> GridField {
    let floor = default_floor(params.alpha);
    let vals: Vec<f64> = (0..dom.interior_count())
        .into_par_iter()
        .map(|p| node_value(params, dom, u, p, kind, floor))
        .collect();
    let mut out = dom.zeros();
    for (p, v) in vals.into_iter().enumerate() {
        out.values[dom.interior[p]] = v;
    }
    out
}

/// Operator value at one interior position.
pub fn node_value(
    params: &PucciParams,
    dom: &GridDomain,
    u: &GridField,
    p: usize,
    kind: SchemeKind,
    floor: f64,
) -> f64 {
    let g = gradient(dom, u, p);
    let factor = gradient_factor(params.alpha, g[0].hypot(g[1]), floor);
    let m = match kind {
        SchemeKind::WideStencil => pucci_part(params, dom, u, p).0,
        SchemeKind::CentralHessian => central_hessian_pucci(params, dom, u, p),
    };
    factor * m
}

fn central_hessian_pucci(params: &PucciParams, dom: &GridDomain, u: &GridField, p: usize) -> f64 {
    let [lx, ly] = dom.axis_lines();
    let uxx = line_second_difference(dom, u, p, lx);
    let uyy = line_second_difference(dom, u, p, ly);
    let find = |d: [i32; 2]| dom.stencil.directions.iter().position(|&e| e == d);
    let uxy = match (find([1, 1]), find([1, -1])) {
        (Some(d1), Some(d2)) => {
            let (_, upp, _) = arm(dom, u, p, d1, true);
            let (_, umm, _) = arm(dom, u, p, d1, false);
            let (_, upm, _) = arm(dom, u, p, d2, true);
            let (_, ump, _) = arm(dom, u, p, d2, false);
            (upp + umm - upm - ump) / (4.0 * dom.h * dom.h)
        }
        _ => 0.0,
    };
    let x = SymMatrix::from_rows(&[vec![uxx, uxy], vec![uxy, uyy]]).expect("2x2 symmetric");
    pucci(params, &x).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::domain::{build_domain, build_domain_with, Shape, StencilSet};

    #[test]
    fn constant_field_maps_to_zero() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.1).unwrap();
        let u = dom.field(|_, _| 3.0, |_, _| 3.0);
        let p = PucciParams::new(0.5, 2.0, Variant::Plus, 0.0).unwrap();
        let f = discretize_f(&p, &dom, &u);
        assert!(f.values.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn disk_solution_has_unit_laplacian() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        let exact = |x: f64, y: f64| (1.0 - x * x - y * y) / 4.0;
        let u = dom.field(exact, exact);
        let f = discretize_f(&PucciParams::laplacian(), &dom, &u);
        for &k in &dom.interior {
            assert!((f.values[k] + 1.0).abs() < 1e-9, "{}", f.values[k]);
        }
    }

    #[test]
    fn aligned_quadratics_are_exact_for_unequal_weights() {
        // Eigenvectors along a stencil pair: the extremal pair reproduces M exactly.
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        for (l1, l2) in [(2.0, -3.0), (-1.0, -0.5), (0.7, 0.2)] {
            let q = |x: f64, y: f64| 0.5 * (l1 * x * x + l2 * y * y);
            let u = dom.field(q, q);
            for variant in [Variant::Plus, Variant::Minus] {
                let p = PucciParams::new(0.5, 2.0, variant, 0.0).unwrap();
                let x = SymMatrix::diag(&[l1, l2]);
                let want = pucci(&p, &x).unwrap();
                let f = discretize_f(&p, &dom, &u);
                for &k in &dom.interior {
                    assert!((f.values[k] - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn gradient_factor_scales_quadratic() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        let q = |x: f64, y: f64| 0.5 * (x * x - 2.0 * y * y) + 0.3 * x;
        let u = dom.field(q, q);
        let p = PucciParams::new(1.0, 1.0, Variant::Plus, 1.0).unwrap();
        let f = discretize_f(&p, &dom, &u);
        for &k in &dom.interior {
            let [x, y] = dom.xy(k);
            let grad = (x + 0.3).hypot(-2.0 * y);
            assert!((f.values[k] - grad * (-1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn minus_is_dual_to_plus() {
        let dom = build_domain(&Shape::Ellipse { ax: 1.5, ay: 1.0 }, 0.05).unwrap();
        let w = |x: f64, y: f64| (3.0 * x).sin() * (2.0 * y).cos() + x * y;
        let u = dom.field(w, w);
        let plus = PucciParams::new(0.4, 1.7, Variant::Plus, 0.0).unwrap();
        let minus = plus.with_variant(Variant::Minus);
        let a = discretize_f(&minus, &dom, &u);
        let b = discretize_f(&plus, &dom, &u.negated());
        for &k in &dom.interior {
            assert_eq!(a.values[k], -b.values[k]);
        }
    }

    #[test]
    fn radius_one_stencil_has_two_pairs() {
        let dom = build_domain_with(
            &Shape::square(1.0),
            0.05,
            StencilSet::with_radius(1).unwrap(),
        )
        .unwrap();
        let q = |x: f64, y: f64| x * x + y * y;
        let u = dom.field(q, q);
        let f = discretize_f(&PucciParams::laplacian(), &dom, &u);
        for &k in &dom.interior {
            assert!((f.values[k] - 4.0).abs() < 1e-8);
        }
    }
}
