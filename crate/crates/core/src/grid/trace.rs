//! Interpolation and Neumann traces.

use serde::{Deserialize, Serialize};

use super::domain::{GridDomain, GridField, Link};

/// Bilinear interpolation of nodal values; nodes outside the mask carry
/// their stored value (zero for solver output), i.e. a zero extension.
pub fn interpolate_bilinear(u: &GridField, dom: &GridDomain, x: f64, y: f64) -> Option<f64> {
    let (fx, fy) = (x / dom.h, y / dom.h);
    let (i0, j0) = (fx.floor() as isize, fy.floor() as isize);
    let (sx, sy) = (fx - i0 as f64, fy - j0 as f64);
    let mut v = 0.0;
    for (di, wx) in [(0, 1.0 - sx), (1, sx)] {
        for (dj, wy) in [(0, 1.0 - sy), (1, sy)] {
            let k = dom.node_at(i0 + di, j0 + dj)?;
            v += wx * wy * u.values[k];
        }
    }
    Some(v)
}

/// Tensor cubic Lagrange interpolation on the surrounding 4 x 4 nodes.
/// `None` unless all sixteen nodes are interior.
pub fn interpolate_cubic(u: &GridField, dom: &GridDomain, x: f64, y: f64) -> Option<f64> {
    let (fx, fy) = (x / dom.h, y / dom.h);
    let (i0, j0) = (fx.floor() as isize, fy.floor() as isize);
    let wx = lagrange4(fx - i0 as f64);
    let wy = lagrange4(fy - j0 as f64);
    let mut v = 0.0;
    for (a, wa) in wx.iter().enumerate() {
        for (b, wb) in wy.iter().enumerate() {
            let k = dom.node_at(i0 + a as isize - 1, j0 + b as isize - 1)?;
            if !dom.mask[k] {
                return None;
            }
            v += wa * wb * u.values[k];
        }
    }
    Some(v)
}

/// Weights at nodes -1, 0, 1, 2 for offset `s` in `[0, 1)`.
pub(crate) fn lagrange4(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Cubic where possible, bilinear otherwise.
pub fn interpolate(u: &GridField, dom: &GridDomain, x: f64, y: f64) -> Option<f64> {
    interpolate_cubic(u, dom, x, y).or_else(|| interpolate_bilinear(u, dom, x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub arc: f64,
    pub point: [f64; 2],
    pub normal: [f64; 2],
    /// Outward normal derivative.
    pub value: f64,
}

/// Outward normal derivative at the projections of the interior nodes
/// whose stencil reaches the boundary through an axis arm.
///
/// Values are read at `P - 3h n` and `P - 6h n` and combined with the
/// boundary value by the one-sided second-order formula
/// `(-3 u0 + 4 u1 - u2) / (2 d)`. Samples are sorted by arc parameter.
pub fn neumann_trace(u: &GridField, dom: &GridDomain) -> Vec<TraceSample> {
    let step = 3.0 * dom.h;
    let axes = dom.axis_lines();
    let mut out = Vec::new();
    for p in 0..dom.interior_count() {
        // Nearest axis crossing supplies the boundary value.
        let mut cut: Option<(f64, usize)> = None;
        for &l in &axes {
            for plus in [true, false] {
                if let Link::Cut { t, index } = dom.link(p, l, plus) {
                    if cut.is_none_or(|(tc, _)| t < tc) {
                        cut = Some((t, index as usize));
                    }
                }
            }
        }
        let Some((_, b)) = cut else { continue };
        let [x, y] = dom.xy(dom.interior[p]);
        let point = dom.shape.project(x, y);
        let normal = dom.shape.normal(point[0], point[1]);
        let u0 = u.boundary_values[b];
        let sample = |d: f64| interpolate(u, dom, point[0] - d * normal[0], point[1] - d * normal[1]);
        let (Some(u1), Some(u2)) = (sample(step), sample(2.0 * step)) else {
            continue;
        };
        let inward = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * step);
        out.push(TraceSample {
            arc: dom.shape.arc(point[0], point[1]),
            point,
            normal,
            value: -inward,
        });
    }
    out.sort_by(|a, b| a.arc.total_cmp(&b.arc));
    out
}

/// Mean, standard deviation and spread (max - min) of trace values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStats {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

pub fn trace_stats(trace: &[TraceSample]) -> TraceStats {
    let n = trace.len().max(1) as f64;
    let mean = trace.iter().map(|s| s.value).sum::<f64>() / n;
    let var = trace.iter().map(|s| (s.value - mean).powi(2)).sum::<f64>() / n;
    let min = trace.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let max = trace.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
    TraceStats {
        count: trace.len(),
        mean,
        std_dev: var.sqrt(),
        min,
        max,
        spread: max - min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::domain::{build_domain, Shape};

    #[test]
    fn cubic_reproduces_cubics() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        let f = |x: f64, y: f64| x * x * x - 2.0 * x * y * y + y - 0.3;
        let u = dom.field(f, f);
        for (x, y) in [(0.013, -0.21), (0.4, 0.377), (-0.5, 0.1)] {
            let v = interpolate_cubic(&u, &dom, x, y).unwrap();
            assert!((v - f(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_trace_of_exact_solution() {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.02).unwrap();
        let exact = |x: f64, y: f64| (1.0 - x * x - y * y) / 4.0;
        let u = dom.field(exact, |_, _| 0.0);
        let trace = neumann_trace(&u, &dom);
        assert!(trace.len() > 100);
        for s in &trace {
            assert!((s.value + 0.5).abs() < 1e-10, "{s:?}");
        }
        let st = trace_stats(&trace);
        assert!(st.std_dev < 1e-10);
    }

    #[test]
    fn zero_field_has_zero_trace() {
        let dom = build_domain(&Shape::Ellipse { ax: 2.0, ay: 1.0 }, 0.05).unwrap();
        let trace = neumann_trace(&dom.zeros(), &dom);
        assert!(trace.iter().all(|s| s.value == 0.0));
    }

    #[test]
    fn ellipse_trace_matches_gradient() {
        let (a, b) = (2.0f64, 1.0f64);
        let k = a * a * b * b / (2.0 * (a * a + b * b));
        let dom = build_domain(&Shape::Ellipse { ax: a, ay: b }, 0.02).unwrap();
        let u = dom.field(|x, y| k * (1.0 - x * x / (a * a) - y * y / (b * b)), |_, _| 0.0);
        for s in neumann_trace(&u, &dom) {
            let [x, y] = s.point;
            let grad = [-2.0 * k * x / (a * a), -2.0 * k * y / (b * b)];
            let want = grad[0] * s.normal[0] + grad[1] * s.normal[1];
            assert!((s.value - want).abs() < 1e-9);
        }
    }
}
