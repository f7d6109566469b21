//! Moving-plane diagnostics.
//!
//! For a unit direction `e` and position `t`, the cap `{x.e < t}` of the
//! domain is reflected across the line `x.e = t`. Its image is the set of
//! points `x` with `x.e > t` whose reflection `x_t = x - 2(x.e - t)e` lies
//! in the domain, and `u_t(x) = u(x_t)`.

use serde::{Deserialize, Serialize};

use super::domain::{GridDomain, GridField};
use super::trace::interpolate_bilinear;
use crate::error::{LabError, Result};

fn unit(direction: [f64; 2]) -> Result<[f64; 2]> {
    let n = direction[0].hypot(direction[1]);
    if !(n > 0.0 && n.is_finite()) {
        return Err(LabError::InvalidParams("direction must be nonzero".into()));
    }
    Ok([direction[0] / n, direction[1] / n])
}

fn reflect(x: [f64; 2], e: [f64; 2], t: f64) -> [f64; 2] {
    let s = 2.0 * (x[0] * e[0] + x[1] * e[1] - t);
    [x[0] - s * e[0], x[1] - s * e[1]]
}

/// Grid nodes of the reflected cap; fails when one lies outside the domain.
fn reflected_cap(dom: &GridDomain, e: [f64; 2], t: f64, strict: bool) -> Result<Vec<usize>> {
    let mut nodes = Vec::new();
    for k in 0..dom.node_count() {
        let x = dom.xy(k);
        if x[0] * e[0] + x[1] * e[1] <= t {
            continue;
        }
        let xr = reflect(x, e, t);
        if !dom.shape.contains(xr[0], xr[1]) {
            continue;
        }
        if dom.mask[k] {
            nodes.push(k);
        } else if strict {
            return Err(LabError::ReflectionOutOfDomain { t, x: x[0], y: x[1] });
        }
    }
    Ok(nodes)
}

fn gap_over(u: &GridField, dom: &GridDomain, e: [f64; 2], t: f64, nodes: &[usize]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(LabError::InvalidParams(format!("reflected cap is empty at t = {t}")));
    }
    let mut gap = f64::NEG_INFINITY;
    for &k in nodes {
        let xr = reflect(dom.xy(k), e, t);
        let ut = interpolate_bilinear(u, dom, xr[0], xr[1]).ok_or(LabError::OutOfDomain {
            value: xr[0],
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        })?;
        gap = gap.max(ut - u.values[k]);
    }
    Ok(gap)
}

/// `max (u_t - u)` over grid nodes of the reflected cap.
pub fn reflection_gap(u: &GridField, dom: &GridDomain, direction: [f64; 2], t: f64) -> Result<f64> {
    let e = unit(direction)?;
    let nodes = reflected_cap(dom, e, t, true)?;
    gap_over(u, dom, e, t, &nodes)
}

/// Same maximum restricted to the part of the reflected cap inside the
/// domain; defined past the critical position.
pub fn reflection_gap_partial(u: &GridField, dom: &GridDomain, direction: [f64; 2], t: f64) -> Result<f64> {
    let e = unit(direction)?;
    let nodes = reflected_cap(dom, e, t, false)?;
    gap_over(u, dom, e, t, &nodes)
}

/// Grid estimate of the critical position: the last `t` on a scan of step
/// `h/4` from the back of the domain for which the reflected cap stays
/// inside. Exact tangency is only resolved to O(h).
pub fn critical_position(dom: &GridDomain, direction: [f64; 2]) -> Result<f64> {
    let e = unit(direction)?;
    let proj = |k: usize| {
        let x = dom.xy(k);
        x[0] * e[0] + x[1] * e[1]
    };
    let lo = dom.interior.iter().map(|&k| proj(k)).fold(f64::INFINITY, f64::min);
    let hi = dom.interior.iter().map(|&k| proj(k)).fold(f64::NEG_INFINITY, f64::max);
    let step = 0.25 * dom.h;
    let mut t = lo;
    let mut last = lo;
    while t < hi {
        if reflected_cap(dom, e, t, true).is_err() {
            return Ok(last);
        }
        last = t;
        t += step;
    }
    Ok(last)
}

/// One gap measurement of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub direction: [f64; 2],
    pub t: f64,
    pub gap: f64,
}

/// Margin kept below the critical position in sweeps, in units of `h`.
pub const SWEEP_MARGIN: f64 = 2.0;

/// Gaps at `count` evenly spaced positions from one step past the back of
/// the domain up to `t* - 2h`. Returns the samples and `t*`.
pub fn reflection_sweep(
    u: &GridField,
    dom: &GridDomain,
    direction: [f64; 2],
    count: usize,
) -> Result<(Vec<GapSample>, f64)> {
    let e = unit(direction)?;
    let t_star = critical_position(dom, e)?;
    let lo = dom
        .interior
        .iter()
        .map(|&k| {
            let x = dom.xy(k);
            x[0] * e[0] + x[1] * e[1]
        })
        .fold(f64::INFINITY, f64::min)
        + 2.0 * dom.h;
    let hi = t_star - SWEEP_MARGIN * dom.h;
    let mut out = Vec::new();
    for i in 0..count {
        let t = if count == 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        };
        match reflection_gap(u, dom, e, t) {
            Ok(gap) => out.push(GapSample { direction: e, t, gap }),
            Err(LabError::InvalidParams(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok((out, t_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::domain::{build_domain, Shape};

    fn disk_solution(h: f64) -> (GridDomain, GridField) {
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, h).unwrap();
        let u = dom.field(|x, y| (1.0 - x * x - y * y) / 4.0, |_, _| 0.0);
        (dom, u)
    }

    #[test]
    fn disk_symmetry_plane_has_no_gap() {
        let h = 0.02;
        let (dom, u) = disk_solution(h);
        for dir in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 2.0]] {
            let g = reflection_gap(&u, &dom, dir, 0.0).unwrap_or(0.0);
            assert!(g <= 2.0 * h, "{dir:?} {g}");
        }
        let g = reflection_gap(&u, &dom, [1.0, 0.0], 0.0).unwrap();
        assert!(g.abs() < 1e-12);
    }

    #[test]
    fn disk_caps_stay_below_reflection() {
        let h = 0.02;
        let (dom, u) = disk_solution(h);
        for t in [-0.9, -0.5, -0.1] {
            let g = reflection_gap(&u, &dom, [1.0, 0.0], t).unwrap();
            assert!(g <= 2.0 * h, "{t} {g}");
        }
    }

    #[test]
    fn disk_critical_position_is_center() {
        let (dom, _) = disk_solution(0.02);
        let t = critical_position(&dom, [1.0, 0.0]).unwrap();
        assert!(t.abs() <= 0.02, "{t}");
    }

    #[test]
    fn past_critical_position_is_rejected() {
        let (dom, u) = disk_solution(0.02);
        assert!(matches!(
            reflection_gap(&u, &dom, [1.0, 0.0], 0.3),
            Err(LabError::ReflectionOutOfDomain { .. })
        ));
        assert!(reflection_gap_partial(&u, &dom, [1.0, 0.0], 0.3).unwrap() > 0.0);
    }
}
