//! Independent reference values for the integration tests.
#![allow(dead_code)]

/// `J_0(x)` by its power series; accurate to rounding for `x <= 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of `J_0`, by bisection on `[2, 3]`.
pub fn first_bessel_zero() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Radial solution with `f = 1` vanishing at `radius`, written out from
/// the ODE `a (u'' + (N-1) u'/r) |u'|^alpha = -1` for a concave profile.
pub fn radial_solution(a: f64, alpha: f64, n: usize, radius: f64, r: f64) -> f64 {
    let e = 1.0 + alpha;
    let k = e / (a * ((n as f64 - 1.0) * e + 1.0));
    let q = (2.0 + alpha) / e;
    e / (2.0 + alpha) * k.powf(1.0 / e) * (radius.powf(q) - r.powf(q))
}

/// `u'(R)` of [`radial_solution`].
pub fn radial_slope(a: f64, alpha: f64, n: usize, radius: f64) -> f64 {
    let e = 1.0 + alpha;
    let k = e / (a * ((n as f64 - 1.0) * e + 1.0));
    -(k * radius).powf(1.0 / e)
}

/// Outward normal derivative of `u = q (1 - x^2/ax^2 - y^2/ay^2)`, the
/// solution of `Delta u + 1 = 0` on the ellipse, at a boundary point.
pub fn ellipse_trace(ax: f64, ay: f64, x: f64, y: f64) -> f64 {
    let q = ax * ax * ay * ay / (2.0 * (ax * ax + ay * ay));
    let g = [-2.0 * q * x / (ax * ax), -2.0 * q * y / (ay * ay)];
    let n = [x / (ax * ax), y / (ay * ay)];
    let len = n[0].hypot(n[1]);
    (g[0] * n[0] + g[1] * n[1]) / len
}

/// Principal Dirichlet eigenvalue of an arc of length `l`.
pub fn arc_eigenvalue(l: f64) -> f64 {
    (std::f64::consts::PI / l).powi(2)
}
