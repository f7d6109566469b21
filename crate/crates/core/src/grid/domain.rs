//! Shapes, stencils and the cut-cell grid.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Planar domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disk { radius: f64 },
    Ellipse { ax: f64, ay: f64 },
    /// Simple polygon; orientation is normalized to counterclockwise.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Shape {
    /// Checks parameters and returns a copy with counterclockwise polygons.
    pub fn normalized(&self) -> Result<Shape> {
        match self {
            Shape::Disk { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(LabError::InvalidShape(format!("disk radius {radius}")));
                }
                Ok(self.clone())
            }
            Shape::Ellipse { ax, ay } => {
                if !(ax.is_finite() && ay.is_finite() && *ax > 0.0 && *ay > 0.0) {
                    return Err(LabError::InvalidShape(format!("ellipse axes ({ax}, {ay})")));
                }
                Ok(self.clone())
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 || vertices.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(LabError::InvalidShape(
                        "polygon needs at least three finite vertices".into(),
                    ));
                }
                let area = signed_area(vertices);
                if area.abs() < 1e-14 {
                    return Err(LabError::InvalidShape("polygon has zero area".into()));
                }
                let mut v = vertices.clone();
                if area < 0.0 {
                    v.reverse();
                }
                Ok(Shape::Polygon { vertices: v })
            }
        }
    }

    /// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        match self {
            Shape::Disk { radius } => [-radius, *radius, -radius, *radius],
            Shape::Ellipse { ax, ay } => [-ax, *ax, -ay, *ay],
            Shape::Polygon { vertices } => {
                let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
                for v in vertices {
                    b[0] = b[0].min(v[0]);
                    b[1] = b[1].max(v[0]);
                    b[2] = b[2].min(v[1]);
                    b[3] = b[3].max(v[1]);
                }
                b
            }
        }
    }

    /// Strict interior test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Disk { radius } => x * x + y * y < radius * radius,
            Shape::Ellipse { ax, ay } => (x / ax).powi(2) + (y / ay).powi(2) < 1.0,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = false;
                for k in 0..n {
                    let p = vertices[k];
                    let q = vertices[(k + 1) % n];
                    if point_segment_distance([x, y], p, q).0 < 1e-13 {
                        return false;
                    }
                    if (p[1] > y) != (q[1] > y) {
                        let xc = p[0] + (y - p[1]) / (q[1] - p[1]) * (q[0] - p[0]);
                        if x < xc {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Distance along the unit vector `e` from an interior point to the
    /// first boundary crossing.
    pub fn ray_exit(&self, x: f64, y: f64, e: [f64; 2]) -> f64 {
        match self {
            Shape::Disk { radius } => quadratic_exit(x, y, e, *radius, *radius),
            Shape::Ellipse { ax, ay } => quadratic_exit(x, y, e, *ax, *ay),
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = f64::INFINITY;
                for k in 0..n {
                    let p = vertices[k];
                    let q = vertices[(k + 1) % n];
                    let s = [q[0] - p[0], q[1] - p[1]];
                    let denom = e[0] * s[1] - e[1] * s[0];
                    if denom.abs() < 1e-300 {
                        continue;
                    }
                    let w = [p[0] - x, p[1] - y];
                    let t = (w[0] * s[1] - w[1] * s[0]) / denom;
                    let v = (w[0] * e[1] - w[1] * e[0]) / denom;
                    if t > 0.0 && (-1e-14..=1.0 + 1e-14).contains(&v) {
                        best = best.min(t);
                    }
                }
                best
            }
        }
    }

    /// Nearest boundary point.
    pub fn project(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            Shape::Disk { radius } => {
                let r = x.hypot(y);
                if r == 0.0 {
                    [*radius, 0.0]
                } else {
                    [radius * x / r, radius * y / r]
                }
            }
            Shape::Ellipse { ax, ay } => {
                let t = ellipse_nearest_angle(*ax, *ay, x, y);
                [ax * t.cos(), ay * t.sin()]
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = (f64::INFINITY, [0.0, 0.0]);
                for k in 0..n {
                    let (d, p) = point_segment_distance([x, y], vertices[k], vertices[(k + 1) % n]);
                    if d < best.0 {
                        best = (d, p);
                    }
                }
                best.1
            }
        }
    }

    /// Outward unit normal at (or near) a boundary point.
    pub fn normal(&self, x: f64, y: f64) -> [f64; 2] {
        let v = match self {
            Shape::Disk { .. } => [x, y],
            Shape::Ellipse { ax, ay } => [x / (ax * ax), y / (ay * ay)],
            Shape::Polygon { vertices } => {
                let k = nearest_edge(vertices, x, y);
                let p = vertices[k];
                let q = vertices[(k + 1) % vertices.len()];
                [q[1] - p[1], p[0] - q[0]]
            }
        };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    }

    /// Arc parameter of a boundary point: polar angle for disks, parametric
    /// angle for ellipses (both in `[0, 2 pi)`), perimeter length from the
    /// first vertex for polygons.
    pub fn arc(&self, x: f64, y: f64) -> f64 {
        let angle = |s: f64, c: f64| s.atan2(c).rem_euclid(std::f64::consts::TAU);
        match self {
            Shape::Disk { .. } => angle(y, x),
            Shape::Ellipse { ax, ay } => angle(y / ay, x / ax),
            Shape::Polygon { vertices } => {
                let k = nearest_edge(vertices, x, y);
                let mut len = 0.0;
                for j in 0..k {
                    let p = vertices[j];
                    let q = vertices[j + 1];
                    len += (q[0] - p[0]).hypot(q[1] - p[1]);
                }
                let p = vertices[k];
                len + (x - p[0]).hypot(y - p[1])
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Disk { radius } => std::f64::consts::PI * radius * radius,
            Shape::Ellipse { ax, ay } => std::f64::consts::PI * ax * ay,
            Shape::Polygon { vertices } => signed_area(vertices).abs(),
        }
    }

    /// Axis-aligned square of side `side` centered at the origin.
    pub fn square(side: f64) -> Shape {
        let s = 0.5 * side;
        Shape::Polygon {
            vertices: vec![[-s, -s], [s, -s], [s, s], [-s, s]],
        }
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|k| {
            let p = v[k];
            let q = v[(k + 1) % n];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        * 0.5
}

fn quadratic_exit(x: f64, y: f64, e: [f64; 2], ax: f64, ay: f64) -> f64 {
    let qa = (e[0] / ax).powi(2) + (e[1] / ay).powi(2);
    let qb = 2.0 * (x * e[0] / (ax * ax) + y * e[1] / (ay * ay));
    let qc = (x / ax).powi(2) + (y / ay).powi(2) - 1.0;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    // Cancellation-free form of the positive root when qc < 0.
    if qb >= 0.0 {
        -2.0 * qc / (qb + disc)
    } else {
        (-qb + disc) / (2.0 * qa)
    }
}

fn point_segment_distance(x: [f64; 2], p: [f64; 2], q: [f64; 2]) -> (f64, [f64; 2]) {
    let s = [q[0] - p[0], q[1] - p[1]];
    let len2 = s[0] * s[0] + s[1] * s[1];
    let t = (((x[0] - p[0]) * s[0] + (x[1] - p[1]) * s[1]) / len2).clamp(0.0, 1.0);
    let c = [p[0] + t * s[0], p[1] + t * s[1]];
    ((x[0] - c[0]).hypot(x[1] - c[1]), c)
}

fn nearest_edge(vertices: &[[f64; 2]], x: f64, y: f64) -> usize {
    let n = vertices.len();
    (0..n)
        .map(|k| (k, point_segment_distance([x, y], vertices[k], vertices[(k + 1) % n]).0))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
        .0
}

/// Parametric angle of the nearest ellipse point, by Newton on the
/// orthogonality condition.
fn ellipse_nearest_angle(ax: f64, ay: f64, x: f64, y: f64) -> f64 {
    let mut t = (y / ay).atan2(x / ax);
    for _ in 0..50 {
        let (s, c) = t.sin_cos();
        let g = (ax * c - x) * (-ax * s) + (ay * s - y) * (ay * c);
        let dg = ax * ax * s * s - (ax * c - x) * ax * c + ay * ay * c * c - (ay * s - y) * ay * s;
        if dg.abs() < 1e-300 {
            break;
        }
        let step = g / dg;
        t -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    t
}

/// Lines of the wide stencil, grouped into orthogonal pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StencilSet {
    /// One representative per line; the scheme uses both `d` and `-d`.
    pub directions: Vec<[i32; 2]>,
    pub pairs: Vec<(usize, usize)>,
}

impl StencilSet {
    /// All orthogonal pairs of primitive directions with entries up to `radius`.
    pub fn with_radius(radius: i32) -> Result<Self> {
        if radius < 1 {
            return Err(LabError::InvalidParams("stencil radius must be positive".into()));
        }
        let mut directions = Vec::new();
        let mut pairs = Vec::new();
        let mut add = |d: [i32; 2], e: [i32; 2]| {
            directions.push(d);
            directions.push(e);
            pairs.push((directions.len() - 2, directions.len() - 1));
        };
        for k in 1..=radius {
            for m in 0..=k {
                if gcd(k, m) != 1 {
                    continue;
                }
                if m == 0 {
                    add([1, 0], [0, 1]);
                } else if m == k {
                    add([1, 1], [1, -1]);
                } else {
                    add([k, m], [m, -k]);
                    add([m, k], [k, -m]);
                }
            }
        }
        Ok(Self { directions, pairs })
    }

    /// Radius-3 set: 16 lines in 8 orthogonal pairs.
    pub fn standard() -> Self {
        Self::with_radius(3).expect("radius 3 is valid")
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn length(&self, k: usize) -> f64 {
        let d = self.directions[k];
        f64::from(d[0]).hypot(f64::from(d[1]))
    }

    pub fn radius(&self) -> i32 {
        self.directions
            .iter()
            .map(|d| d[0].abs().max(d[1].abs()))
            .max()
            .unwrap_or(0)
    }

    fn index_of(&self, d: [i32; 2]) -> Option<usize> {
        self.directions.iter().position(|&e| e == d)
    }
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Smallest arm fraction kept for cut cells. Nodes closer to the boundary
/// see it at `MIN_FRACTION` of a step, which bounds the row scaling by
/// `1/MIN_FRACTION` at a geometric cost below `MIN_FRACTION * h`.
pub const MIN_FRACTION: f64 = 1e-3;

/// Neighbor reached from a node along one side of a stencil line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    /// Interior unknown (position in the interior list).
    Node(u32),
    /// Boundary crossing at fraction `t` of the full step, stored in the
    /// boundary list at `index`.
    Cut { t: f64, index: u32 },
}

/// Boundary point reached by a stencil arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    /// Grid node whose stencil arm crosses the boundary here.
    pub node: usize,
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub arc: f64,
}

/// Cartesian grid `x = (i - ci) h`, `y = (j - cj) h` with the origin on a node.
#[derive(Debug, Clone)]
pub struct GridDomain {
    pub shape: Shape,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    ci: isize,
    cj: isize,
    /// Inside flags, row-major `j * nx + i`.
    pub mask: Vec<bool>,
    /// Node indices of interior cells, in row-major order.
    pub interior: Vec<usize>,
    /// Position in `interior` of each node, `u32::MAX` outside.
    pub position: Vec<u32>,
    pub boundary: Vec<BoundaryPoint>,
    pub stencil: StencilSet,
    /// `2 * stencil.len()` links per interior cell: side `+` then side `-`.
    links: Vec<Link>,
    axis: [usize; 2],
}

/// Builds the grid with the radius-3 stencil.
pub fn build_domain(shape: &Shape, h: f64) -> Result<GridDomain> {
    build_domain_with(shape, h, StencilSet::standard())
}

pub fn build_domain_with(shape: &Shape, h: f64, stencil: StencilSet) -> Result<GridDomain> {
    let shape = shape.normalized()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(LabError::InvalidParams(format!("grid spacing must be positive, got {h}")));
    }
    let axis = [
        stencil
            .index_of([1, 0])
            .ok_or_else(|| LabError::InvalidParams("stencil lacks the x axis".into()))?,
        stencil
            .index_of([0, 1])
            .ok_or_else(|| LabError::InvalidParams("stencil lacks the y axis".into()))?,
    ];
    let b = shape.bbox();
    let pad = 2;
    let i_lo = (b[0] / h).floor() as isize - pad;
    let i_hi = (b[1] / h).ceil() as isize + pad;
    let j_lo = (b[2] / h).floor() as isize - pad;
    let j_hi = (b[3] / h).ceil() as isize + pad;
    let nx = (i_hi - i_lo + 1) as usize;
    let ny = (j_hi - j_lo + 1) as usize;
    if nx.saturating_mul(ny) > 50_000_000 {
        return Err(LabError::InvalidParams(format!("grid of {nx} x {ny} nodes is too large")));
    }
    let (ci, cj) = (-i_lo, -j_lo);

    let mut mask = vec![false; nx * ny];
    let mut interior = Vec::new();
    let mut position = vec![u32::MAX; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let x = (i as isize - ci) as f64 * h;
            let y = (j as isize - cj) as f64 * h;
            if shape.contains(x, y) {
                let k = j * nx + i;
                mask[k] = true;
                position[k] = interior.len() as u32;
                interior.push(k);
            }
        }
    }
    if interior.len() < 100 {
        return Err(LabError::InvalidParams(format!(
            "only {} interior cells at h = {h}; at least 100 are required",
            interior.len()
        )));
    }

    let nl = stencil.len();
    let mut links = Vec::with_capacity(interior.len() * 2 * nl);
    let mut boundary = Vec::new();
    for &k in &interior {
        let (i, j) = ((k % nx) as isize, (k / nx) as isize);
        let x = (i - ci) as f64 * h;
        let y = (j - cj) as f64 * h;
        for side in [1i32, -1] {
            for l in 0..nl {
                let d = stencil.directions[l];
                let (di, dj) = ((side * d[0]) as isize, (side * d[1]) as isize);
                let len = stencil.length(l);
                let e = [f64::from(side * d[0]) / len, f64::from(side * d[1]) / len];
                let step = len * h;
                let s = shape.ray_exit(x, y, e);
                let (ii, jj) = (i + di, j + dj);
                let neighbor_inside = ii >= 0
                    && jj >= 0
                    && (ii as usize) < nx
                    && (jj as usize) < ny
                    && mask[jj as usize * nx + ii as usize];
                if neighbor_inside && s > step {
                    links.push(Link::Node(position[jj as usize * nx + ii as usize]));
                } else {
                    let reach = s.min(step);
                    let t = (reach / step).max(MIN_FRACTION);
                    let px = x + reach * e[0];
                    let py = y + reach * e[1];
                    links.push(Link::Cut {
                        t,
                        index: boundary.len() as u32,
                    });
                    boundary.push(BoundaryPoint {
                        node: k,
                        point: [px, py],
                        normal: shape.normal(px, py),
                        arc: shape.arc(px, py),
                    });
                }
            }
        }
    }

    Ok(GridDomain {
        shape,
        h,
        nx,
        ny,
        ci,
        cj,
        mask,
        interior,
        position,
        boundary,
        stencil,
        links,
        axis,
    })
}

impl GridDomain {
    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn xy(&self, node: usize) -> [f64; 2] {
        let i = (node % self.nx) as isize - self.ci;
        let j = (node / self.nx) as isize - self.cj;
        [i as f64 * self.h, j as f64 * self.h]
    }

    /// Node at integer offsets `(i, j)` from the origin, if on the grid.
    pub fn node_at(&self, i: isize, j: isize) -> Option<usize> {
        let (a, b) = (i + self.ci, j + self.cj);
        if a >= 0 && b >= 0 && (a as usize) < self.nx && (b as usize) < self.ny {
            Some(b as usize * self.nx + a as usize)
        } else {
            None
        }
    }

    /// Integer offsets of a node from the origin.
    pub fn offsets(&self, node: usize) -> (isize, isize) {
        ((node % self.nx) as isize - self.ci, (node / self.nx) as isize - self.cj)
    }

    /// Link from interior position `p` along line `l`, side `+` or `-`.
    #[inline]
    pub fn link(&self, p: usize, l: usize, plus: bool) -> Link {
        let nl = self.stencil.len();
        self.links[p * 2 * nl + if plus { l } else { nl + l }]
    }

    /// Indices of the `x` and `y` axis lines in the stencil.
    pub fn axis_lines(&self) -> [usize; 2] {
        self.axis
    }

    /// Samples a field with values `u(x, y)` inside and boundary data `g`.
    pub fn field<U, G>(&self, u: U, g: G) -> GridField
    where
        U: Fn(f64, f64) -> f64,
        G: Fn(f64, f64) -> f64,
    {
        let mut values = vec![0.0; self.node_count()];
        for &k in &self.interior {
            let [x, y] = self.xy(k);
            values[k] = u(x, y);
        }
        GridField {
            values,
            boundary_values: self.boundary.iter().map(|b| g(b.point[0], b.point[1])).collect(),
        }
    }

    /// Zero field with zero boundary data.
    pub fn zeros(&self) -> GridField {
        GridField {
            values: vec![0.0; self.node_count()],
            boundary_values: vec![0.0; self.boundary.len()],
        }
    }
}

/// Nodal values (zero outside the mask) and Dirichlet data on the boundary list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub values: Vec<f64>,
    pub boundary_values: Vec<f64>,
}

impl GridField {
    /// Largest absolute interior value.
    pub fn sup_norm(&self, dom: &GridDomain) -> f64 {
        dom.interior
            .iter()
            .map(|&k| self.values[k].abs())
            .fold(0.0, f64::max)
    }

    pub fn negated(&self) -> GridField {
        GridField {
            values: self.values.iter().map(|v| -v).collect(),
            boundary_values: self.boundary_values.iter().map(|v| -v).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> GridField {
        GridField {
            values: self.values.iter().map(|v| s * v).collect(),
            boundary_values: self.boundary_values.iter().map(|v| s * v).collect(),
        }
    }

    /// Largest interior value of `self - other`.
    pub fn max_difference(&self, other: &GridField, dom: &GridDomain) -> f64 {
        dom.interior
            .iter()
            .map(|&k| self.values[k] - other.values[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest interior value of `|self - other|`.
    pub fn sup_distance(&self, other: &GridField, dom: &GridDomain) -> f64 {
        dom.interior
            .iter()
            .map(|&k| (self.values[k] - other.values[k]).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_stencil_pairs_are_orthogonal() {
        let st = StencilSet::standard();
        assert_eq!(st.len(), 16);
        assert_eq!(st.pairs.len(), 8);
        for &(i, j) in &st.pairs {
            let (d, e) = (st.directions[i], st.directions[j]);
            assert_eq!(d[0] * e[0] + d[1] * e[1], 0);
            assert_eq!(d[0] * d[0] + d[1] * d[1], e[0] * e[0] + e[1] * e[1]);
        }
        let mut lines: Vec<[i32; 2]> = st.directions.clone();
        lines.sort();
        lines.dedup();
        assert_eq!(lines.len(), 16);
        assert_eq!(st.radius(), 3);
        assert_eq!(StencilSet::with_radius(1).unwrap().pairs.len(), 2);
    }

    #[test]
    fn disk_cell_count_matches_area() {
        let h = 0.02;
        let dom = build_domain(&Shape::Disk { radius: 1.0 }, h).unwrap();
        let expected = std::f64::consts::PI / (h * h);
        let rel = (dom.interior_count() as f64 - expected).abs() / expected;
        assert!(rel < 0.01, "{rel}");
    }

    #[test]
    fn round_ellipse_is_disk() {
        let d = build_domain(&Shape::Disk { radius: 1.0 }, 0.05).unwrap();
        let e = build_domain(&Shape::Ellipse { ax: 1.0, ay: 1.0 }, 0.05).unwrap();
        assert_eq!(d.mask, e.mask);
    }

    #[test]
    fn square_normals_are_axis_aligned() {
        let dom = build_domain(&Shape::square(1.0), 0.05).unwrap();
        for b in &dom.boundary {
            let n = b.normal;
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-12);
            assert!(n[0].abs() < 1e-12 || n[1].abs() < 1e-12, "{n:?}");
        }
    }

    #[test]
    fn normals_are_unit_and_points_on_boundary() {
        for shape in [
            Shape::Disk { radius: 1.0 },
            Shape::Ellipse { ax: 2.0, ay: 1.0 },
            Shape::Polygon {
                vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
            },
        ] {
            let dom = build_domain(&shape, 0.05).unwrap();
            for b in &dom.boundary {
                assert!((b.normal[0].hypot(b.normal[1]) - 1.0).abs() < 1e-12);
                let p = dom.shape.project(b.point[0], b.point[1]);
                assert!((p[0] - b.point[0]).hypot(p[1] - b.point[1]) < 1e-9);
            }
        }
    }

    #[test]
    fn every_arm_resolves() {
        let dom = build_domain(&Shape::Ellipse { ax: 2.0, ay: 1.0 }, 0.05).unwrap();
        for p in 0..dom.interior_count() {
            for l in 0..dom.stencil.len() {
                for plus in [true, false] {
                    match dom.link(p, l, plus) {
                        Link::Node(q) => assert!((q as usize) < dom.interior_count()),
                        Link::Cut { t, index } => {
                            assert!(t > 0.0 && t <= 1.0);
                            assert!((index as usize) < dom.boundary.len());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(matches!(
            build_domain(&Shape::Disk { radius: -1.0 }, 0.1),
            Err(LabError::InvalidShape(_))
        ));
        let flat = Shape::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
        };
        assert!(matches!(build_domain(&flat, 0.1), Err(LabError::InvalidShape(_))));
        assert!(build_domain(&Shape::Disk { radius: 0.1 }, 0.05).is_err());
    }

    #[test]
    fn ray_exit_hits_boundary() {
        let s = Shape::Ellipse { ax: 2.0, ay: 1.0 };
        let e = [0.6, 0.8];
        let d = s.ray_exit(0.3, -0.2, e);
        let p = [0.3 + d * e[0], -0.2 + d * e[1]];
        assert!(((p[0] / 2.0).powi(2) + p[1].powi(2) - 1.0).abs() < 1e-12);
        let sq = Shape::square(2.0);
        assert!((sq.ray_exit(0.5, 0.0, [1.0, 0.0]) - 0.5).abs() < 1e-14);
    }
}
