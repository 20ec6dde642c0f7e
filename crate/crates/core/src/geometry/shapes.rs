//! The shape kernels behind [`Region`](super::Region).
//!
//! Each kernel answers the same set of exact queries; `FiniteUnion`
//! composes arbitrary kernels and resolves its boundary distance by
//! candidate filtering with a documented directional-bisection fallback.

use super::vec::{add_scaled, dist, dot, norm, sub};
use crate::error::{Error, Result};
use serde_json::{json, Value};
use std::fmt::Debug;
use std::sync::Arc;

/// Exact relation of an axis-aligned cube to a shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeClass {
    /// The open cube is contained in the shape.
    Inside,
    /// The open cube does not meet the shape.
    Outside,
    /// Neither containment could be certified.
    Straddles,
}

/// Common interface of every geometric kernel.
///
/// `boundary_distance` and `line_slices` are the load-bearing queries: the
/// pseudodistance, the cube decomposition and the trace bounds are all
/// phrased in terms of them. Implementations must treat the shape as an
/// open set.
pub trait Shape: Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Registry tag; also the `type` field of the JSON encoding.
    fn kind(&self) -> &'static str;

    /// Open membership.
    fn contains(&self, x: &[f64; 3]) -> bool;

    /// Distance from an interior point to the complement.
    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64>;

    /// Open intervals of s with x + s*dir inside the shape, in any order.
    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>);

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])>;

    /// Candidate nearest-boundary points as seen from `x`; used by unions
    /// to assemble their complement distance.
    fn boundary_candidates(&self, x: &[f64; 3], out: &mut Vec<[f64; 3]>);

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass;

    fn volume(&self) -> Option<f64>;

    fn is_convex(&self) -> bool;

    fn to_json(&self) -> Value;
}

fn for_each_corner(lo: &[f64; 3], hi: &[f64; 3], dim: usize, mut f: impl FnMut(&[f64; 3])) {
    for mask in 0..(1usize << dim) {
        let mut c = *lo;
        for k in 0..dim {
            if mask >> k & 1 == 1 {
                c[k] = hi[k];
            }
        }
        f(&c);
    }
}

// ---------------------------------------------------------------------------
// Half-space
// ---------------------------------------------------------------------------

/// Open half-space { x : normal . x > offset }.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    dim: usize,
    normal: [f64; 3],
    offset: f64,
}

impl HalfSpace {
    pub fn new(dim: usize, normal: [f64; 3], offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !n.is_finite() || !offset.is_finite() || n <= 0.0 {
            return Err(Error::InvalidRegion(
                "half_space.normal must be a nonzero finite vector".into(),
            ));
        }
        let mut unit = normal;
        for c in &mut unit {
            *c /= n;
        }
        if unit[dim..].iter().any(|c| *c != 0.0) {
            return Err(Error::InvalidRegion(
                "half_space.normal has components beyond the region dimension".into(),
            ));
        }
        // {x : normal.x > offset} = {x : unit.x > offset/|normal|}.
        Ok(HalfSpace {
            dim,
            normal: unit,
            offset: offset / n,
        })
    }

    pub fn normal(&self) -> &[f64; 3] {
        &self.normal
    }
}

impl Shape for HalfSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> &'static str {
        "half_space"
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        dot(&self.normal, x) > self.offset
    }

    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64> {
        Ok(dot(&self.normal, x) - self.offset)
    }

    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>) {
        let a = dot(&self.normal, dir);
        let b = dot(&self.normal, x) - self.offset;
        if a == 0.0 {
            if b > 0.0 {
                out.push((f64::NEG_INFINITY, f64::INFINITY));
            }
        } else if a > 0.0 {
            out.push((-b / a, f64::INFINITY));
        } else {
            out.push((f64::NEG_INFINITY, -b / a));
        }
    }

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        None
    }

    fn boundary_candidates(&self, x: &[f64; 3], out: &mut Vec<[f64; 3]>) {
        let b = dot(&self.normal, x) - self.offset;
        out.push(add_scaled(x, -b, &self.normal));
    }

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for_each_corner(lo, hi, self.dim, |c| {
            let v = dot(&self.normal, c) - self.offset;
            min = min.min(v);
            max = max.max(v);
        });
        if min >= 0.0 {
            CubeClass::Inside
        } else if max <= 0.0 {
            CubeClass::Outside
        } else {
            CubeClass::Straddles
        }
    }

    fn volume(&self) -> Option<f64> {
        None
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn to_json(&self) -> Value {
        json!({
            "type": "half_space",
            "normal": self.normal[..self.dim].to_vec(),
            "offset": self.offset,
        })
    }
}

// ---------------------------------------------------------------------------
// Ball
// ---------------------------------------------------------------------------

/// Open ball of the given center and radius.
#[derive(Debug, Clone)]
pub struct Ball {
    dim: usize,
    center: [f64; 3],
    radius: f64,
}

impl Ball {
    pub fn new(dim: usize, center: [f64; 3], radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidRegion("ball.radius must be positive".into()));
        }
        Ok(Ball { dim, center, radius })
    }
}

impl Shape for Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> &'static str {
        "ball"
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        dist(x, &self.center) < self.radius
    }

    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64> {
        Ok(self.radius - dist(x, &self.center))
    }

    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>) {
        let dx = sub(x, &self.center);
        let b = dot(&dx, dir);
        let c = dot(&dx, &dx) - self.radius * self.radius;
        let disc = b * b - c;
        if disc > 0.0 {
            let root = disc.sqrt();
            out.push((-b - root, -b + root));
        }
    }

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..self.dim {
            lo[k] = self.center[k] - self.radius;
            hi[k] = self.center[k] + self.radius;
        }
        Some((lo, hi))
    }

    fn boundary_candidates(&self, x: &[f64; 3], out: &mut Vec<[f64; 3]>) {
        let dx = sub(x, &self.center);
        let n = norm(&dx);
        if n < 1e-300 {
            let mut y = self.center;
            y[0] += self.radius;
            out.push(y);
        } else {
            out.push(add_scaled(&self.center, self.radius / n, &dx));
        }
    }

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass {
        let mut max_corner = 0.0f64;
        for_each_corner(lo, hi, self.dim, |c| {
            max_corner = max_corner.max(dist(c, &self.center));
        });
        if max_corner <= self.radius {
            return CubeClass::Inside;
        }
        // Distance from the center to the closed cube.
        let mut clamped = self.center;
        for k in 0..self.dim {
            clamped[k] = clamped[k].clamp(lo[k], hi[k]);
        }
        if dist(&clamped, &self.center) >= self.radius {
            CubeClass::Outside
        } else {
            CubeClass::Straddles
        }
    }

    fn volume(&self) -> Option<f64> {
        let r = self.radius;
        Some(match self.dim {
            1 => 2.0 * r,
            2 => std::f64::consts::PI * r * r,
            _ => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
        })
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn to_json(&self) -> Value {
        json!({
            "type": "ball",
            "center": self.center[..self.dim].to_vec(),
            "radius": self.radius,
        })
    }
}

// ---------------------------------------------------------------------------
// Axis-aligned box
// ---------------------------------------------------------------------------

/// Open axis-aligned box (lower, upper) per coordinate.
#[derive(Debug, Clone)]
pub struct AxisBox {
    dim: usize,
    lo: [f64; 3],
    hi: [f64; 3],
}

impl AxisBox {
    pub fn new(dim: usize, lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        for k in 0..dim {
            if !lo[k].is_finite() || !hi[k].is_finite() || lo[k] >= hi[k] {
                return Err(Error::InvalidRegion(format!(
                    "axis_box: lower[{k}] must be strictly below upper[{k}]"
                )));
            }
        }
        Ok(AxisBox { dim, lo, hi })
    }
}

impl Shape for AxisBox {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> &'static str {
        "axis_box"
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        (0..self.dim).all(|k| self.lo[k] < x[k] && x[k] < self.hi[k])
    }

    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64> {
        let mut d = f64::INFINITY;
        for (k, xv) in x.iter().enumerate().take(self.dim) {
            d = d.min(xv - self.lo[k]).min(self.hi[k] - xv);
        }
        Ok(d)
    }

    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>) {
        let mut s_lo = f64::NEG_INFINITY;
        let mut s_hi = f64::INFINITY;
        for k in 0..self.dim {
            if dir[k] == 0.0 {
                if x[k] <= self.lo[k] || x[k] >= self.hi[k] {
                    return;
                }
            } else {
                let a = (self.lo[k] - x[k]) / dir[k];
                let b = (self.hi[k] - x[k]) / dir[k];
                s_lo = s_lo.max(a.min(b));
                s_hi = s_hi.min(a.max(b));
            }
        }
        if s_lo < s_hi {
            out.push((s_lo, s_hi));
        }
    }

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        Some((self.lo, self.hi))
    }

    fn boundary_candidates(&self, x: &[f64; 3], out: &mut Vec<[f64; 3]>) {
        for k in 0..self.dim {
            let mut clamped = *x;
            for (j, c) in clamped.iter_mut().enumerate().take(self.dim) {
                *c = c.clamp(self.lo[j], self.hi[j]);
            }
            let mut low_face = clamped;
            low_face[k] = self.lo[k];
            out.push(low_face);
            let mut high_face = clamped;
            high_face[k] = self.hi[k];
            out.push(high_face);
        }
    }

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass {
        let mut inside = true;
        for k in 0..self.dim {
            if hi[k] <= self.lo[k] || lo[k] >= self.hi[k] {
                return CubeClass::Outside;
            }
            if lo[k] < self.lo[k] || hi[k] > self.hi[k] {
                inside = false;
            }
        }
        if inside {
            CubeClass::Inside
        } else {
            CubeClass::Straddles
        }
    }

    fn volume(&self) -> Option<f64> {
        Some((0..self.dim).map(|k| self.hi[k] - self.lo[k]).product())
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn to_json(&self) -> Value {
        json!({
            "type": "axis_box",
            "lower": self.lo[..self.dim].to_vec(),
            "upper": self.hi[..self.dim].to_vec(),
        })
    }
}

// ---------------------------------------------------------------------------
// Interval union (1D)
// ---------------------------------------------------------------------------

/// Finite union of disjoint open intervals of the real line.
#[derive(Debug, Clone)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Sorted disjoint intervals; touching endpoints are allowed, overlaps
    /// are rejected.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidRegion("interval_union: empty interval list".into()));
        }
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::InvalidRegion(format!(
                    "interval_union: ({a}, {b}) is not a nonempty finite interval"
                )));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for pair in intervals.windows(2) {
            if pair[1].0 < pair[0].1 {
                return Err(Error::InvalidRegion(format!(
                    "interval_union: ({}, {}) overlaps ({}, {})",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(IntervalUnion { intervals })
    }

    /// Like [`IntervalUnion::new`] but merges overlapping input intervals.
    pub fn merged(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        IntervalUnion::new(merged)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    fn containing(&self, x: f64) -> Option<(f64, f64)> {
        self.intervals
            .iter()
            .copied()
            .find(|&(a, b)| a < x && x < b)
    }
}

impl Shape for IntervalUnion {
    fn dim(&self) -> usize {
        1
    }

    fn kind(&self) -> &'static str {
        "interval_union"
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        self.containing(x[0]).is_some()
    }

    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64> {
        let (a, b) = self.containing(x[0]).ok_or(Error::PointOutsideRegion)?;
        Ok((x[0] - a).min(b - x[0]))
    }

    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>) {
        let d = dir[0];
        if d == 0.0 {
            return;
        }
        for &(a, b) in &self.intervals {
            let s1 = (a - x[0]) / d;
            let s2 = (b - x[0]) / d;
            out.push((s1.min(s2), s1.max(s2)));
        }
    }

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let lo = self.intervals.first().unwrap().0;
        let hi = self.intervals.last().unwrap().1;
        Some(([lo, 0.0, 0.0], [hi, 0.0, 0.0]))
    }

    fn boundary_candidates(&self, _x: &[f64; 3], out: &mut Vec<[f64; 3]>) {
        for &(a, b) in &self.intervals {
            out.push([a, 0.0, 0.0]);
            out.push([b, 0.0, 0.0]);
        }
    }

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass {
        if self
            .intervals
            .iter()
            .any(|&(a, b)| a <= lo[0] && hi[0] <= b)
        {
            return CubeClass::Inside;
        }
        if self
            .intervals
            .iter()
            .all(|&(a, b)| hi[0] <= a || lo[0] >= b)
        {
            return CubeClass::Outside;
        }
        CubeClass::Straddles
    }

    fn volume(&self) -> Option<f64> {
        Some(self.intervals.iter().map(|&(a, b)| b - a).sum())
    }

    fn is_convex(&self) -> bool {
        self.intervals.len() == 1
    }

    fn to_json(&self) -> Value {
        json!({
            "type": "interval_union",
            "intervals": self.intervals.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        })
    }
}

// ---------------------------------------------------------------------------
// Convex polygon (2D)
// ---------------------------------------------------------------------------

/// Open convex polygon given by counterclockwise vertices.
#[derive(Debug, Clone)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
    /// Unit inward normal and offset per edge: interior is n.x > o.
    edges: Vec<([f64; 2], f64)>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidRegion(
                "convex_polygon: need at least 3 vertices".into(),
            ));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross <= 0.0 {
                return Err(Error::InvalidRegion(
                    "convex_polygon: vertices must be strictly convex in counterclockwise order"
                        .into(),
                ));
            }
        }
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let e = [b[0] - a[0], b[1] - a[1]];
            let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
            let inward = [-e[1] / len, e[0] / len];
            let offset = inward[0] * a[0] + inward[1] * a[1];
            edges.push((inward, offset));
        }
        Ok(ConvexPolygon { vertices, edges })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }
}

impl Shape for ConvexPolygon {
    fn dim(&self) -> usize {
        2
    }

    fn kind(&self) -> &'static str {
        "convex_polygon"
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        self.edges
            .iter()
            .all(|&(n, o)| n[0] * x[0] + n[1] * x[1] > o)
    }

    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64> {
        // For a convex region the boundary distance from an interior point
        // is the minimum over supporting-line distances.
        Ok(self
            .edges
            .iter()
            .map(|&(n, o)| n[0] * x[0] + n[1] * x[1] - o)
            .fold(f64::INFINITY, f64::min))
    }

    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>) {
        let mut s_lo = f64::NEG_INFINITY;
        let mut s_hi = f64::INFINITY;
        for &(n, o) in &self.edges {
            let a = n[0] * dir[0] + n[1] * dir[1];
            let b = n[0] * x[0] + n[1] * x[1] - o;
            if a == 0.0 {
                if b <= 0.0 {
                    return;
                }
            } else {
                let s = -b / a;
                if a > 0.0 {
                    s_lo = s_lo.max(s);
                } else {
                    s_hi = s_hi.min(s);
                }
            }
        }
        if s_lo < s_hi {
            out.push((s_lo, s_hi));
        }
    }

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        lo[2] = 0.0;
        hi[2] = 0.0;
        Some((lo, hi))
    }

    fn boundary_candidates(&self, x: &[f64; 3], out: &mut Vec<[f64; 3]>) {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = [b[0] - a[0], b[1] - a[1]];
            let len2 = e[0] * e[0] + e[1] * e[1];
            let t = (((x[0] - a[0]) * e[0] + (x[1] - a[1]) * e[1]) / len2).clamp(0.0, 1.0);
            out.push([a[0] + t * e[0], a[1] + t * e[1], 0.0]);
        }
    }

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass {
        let mut inside = true;
        for &(n, o) in &self.edges {
            let mut min = f64::INFINITY;
            for_each_corner(lo, hi, 2, |c| {
                min = min.min(n[0] * c[0] + n[1] * c[1] - o);
            });
            if min < 0.0 {
                inside = false;
            }
        }
        if inside {
            return CubeClass::Inside;
        }
        // Separating-axis test over cube axes and edge normals is exact for
        // a convex pair.
        let axes_sep = |ax: [f64; 2]| -> bool {
            let mut cube_min = f64::INFINITY;
            let mut cube_max = f64::NEG_INFINITY;
            for_each_corner(lo, hi, 2, |c| {
                let v = ax[0] * c[0] + ax[1] * c[1];
                cube_min = cube_min.min(v);
                cube_max = cube_max.max(v);
            });
            let mut poly_min = f64::INFINITY;
            let mut poly_max = f64::NEG_INFINITY;
            for v in &self.vertices {
                let p = ax[0] * v[0] + ax[1] * v[1];
                poly_min = poly_min.min(p);
                poly_max = poly_max.max(p);
            }
            cube_max <= poly_min || poly_max <= cube_min
        };
        if axes_sep([1.0, 0.0]) || axes_sep([0.0, 1.0]) {
            return CubeClass::Outside;
        }
        for &(n, _) in &self.edges {
            if axes_sep(n) {
                return CubeClass::Outside;
            }
        }
        CubeClass::Straddles
    }

    fn volume(&self) -> Option<f64> {
        let n = self.vertices.len();
        let mut twice = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            twice += a[0] * b[1] - b[0] * a[1];
        }
        Some(0.5 * twice)
    }

    fn is_convex(&self) -> bool {
        true
    }

    fn to_json(&self) -> Value {
        json!({
            "type": "convex_polygon",
            "vertices": self.vertices.iter().map(|v| v.to_vec()).collect::<Vec<_>>(),
        })
    }
}

// ---------------------------------------------------------------------------
// Finite union
// ---------------------------------------------------------------------------

/// Set union of arbitrary member kernels.
#[derive(Debug, Clone)]
pub struct FiniteUnion {
    dim: usize,
    members: Vec<Arc<dyn Shape>>,
}

impl FiniteUnion {
    pub fn new(dim: usize, members: Vec<Arc<dyn Shape>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidRegion("finite_union: empty member list".into()));
        }
        for m in &members {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        Ok(FiniteUnion { dim, members })
    }

    pub fn members(&self) -> &[Arc<dyn Shape>] {
        &self.members
    }

    /// Exit distance out of the union along +-dir from x.
    fn directional_exit(&self, x: &[f64; 3], dir: &[f64; 3]) -> f64 {
        let mut slices = Vec::with_capacity(2 * self.members.len());
        self.line_slices(x, dir, &mut slices);
        super::merge_slices(&mut slices);
        for &(lo, hi) in &slices {
            if lo < 0.0 && 0.0 < hi {
                return (-lo).min(hi);
            }
        }
        0.0
    }

    fn diameter_hint(&self) -> f64 {
        match self.bounding_box() {
            Some((lo, hi)) => {
                let d = sub(&hi, &lo);
                norm(&d)
            }
            None => 1.0,
        }
    }
}

impl Shape for FiniteUnion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> &'static str {
        "finite_union"
    }

    fn contains(&self, x: &[f64; 3]) -> bool {
        self.members.iter().any(|m| m.contains(x))
    }

    /// Distance to the complement of the union.
    ///
    /// Exact route: the largest member boundary distance is a lower bound
    /// (the ball it certifies lies inside one member); the closest
    /// candidate boundary point not swallowed by another member is an upper
    /// bound. When the two meet, the distance is resolved analytically.
    /// Otherwise the minimum of the exit distance over directions is
    /// refined by golden-section bisection to 1e-10 of the diameter.
    fn boundary_distance(&self, x: &[f64; 3]) -> Result<f64> {
        let mut lower = 0.0f64;
        for m in &self.members {
            if m.contains(x) {
                lower = lower.max(m.boundary_distance(x)?);
            }
        }
        let mut candidates = Vec::new();
        self.boundary_candidates(x, &mut candidates);
        let mut upper = f64::INFINITY;
        for y in &candidates {
            if !self.contains(y) {
                upper = upper.min(dist(x, y));
            }
        }
        if upper <= lower * (1.0 + 1e-12) {
            return Ok(upper.max(lower));
        }
        if self.dim == 1 {
            let e = [1.0, 0.0, 0.0];
            return Ok(self.directional_exit(x, &e));
        }

        // Fallback: minimize the exit distance over directions. Seeds are a
        // uniform sweep plus the directions toward every candidate point.
        let mut seeds: Vec<[f64; 3]> = Vec::new();
        if self.dim == 2 {
            let sweep = 1024usize;
            for j in 0..sweep {
                let t = 2.0 * std::f64::consts::PI * j as f64 / sweep as f64;
                seeds.push([t.cos(), t.sin(), 0.0]);
            }
        } else {
            // Fibonacci sphere sweep.
            let sweep = 4096usize;
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            for j in 0..sweep {
                let z = 1.0 - 2.0 * (j as f64 + 0.5) / sweep as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * j as f64;
                seeds.push([r * t.cos(), r * t.sin(), z]);
            }
        }
        for y in &candidates {
            let d = sub(y, x);
            let n = norm(&d);
            if n > 1e-300 {
                seeds.push([d[0] / n, d[1] / n, d[2] / n]);
            }
        }
        let mut best = upper.min(f64::INFINITY);
        let mut best_dir = seeds[0];
        for s in &seeds {
            let e = self.directional_exit(x, s);
            if e < best {
                best = e;
                best_dir = *s;
            }
        }
        let tol = 1e-10 * self.diameter_hint();
        if self.dim == 2 {
            let base = best_dir[1].atan2(best_dir[0]);
            // Bracket two sweep cells on either side of the best seed.
            let width = 2.0 * (2.0 * std::f64::consts::PI / 1024.0);
            let f = |t: f64| self.directional_exit(x, &[t.cos(), t.sin(), 0.0]);
            let (_, v) = golden_min(&f, base - width, base + width, tol / self.diameter_hint());
            best = best.min(v);
        } else if self.dim == 3 {
            // Pattern search on spherical angles around the best seed, with
            // step expansion so shallow valleys (degenerate minimizer sets)
            // are still tracked down to the angular tolerance.
            let mut theta = best_dir[2].clamp(-1.0, 1.0).acos();
            let mut phi = best_dir[1].atan2(best_dir[0]);
            let eval = |th: f64, ph: f64| {
                self.directional_exit(
                    x,
                    &[th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()],
                )
            };
            let mut step = 2.0 * std::f64::consts::PI / 2048.0;
            let mut cur = eval(theta, phi);
            let diag = std::f64::consts::FRAC_1_SQRT_2;
            for _ in 0..400 {
                let mut moved = false;
                for (dt, dp) in [
                    (step, 0.0),
                    (-step, 0.0),
                    (0.0, step),
                    (0.0, -step),
                    (diag * step, diag * step),
                    (diag * step, -diag * step),
                    (-diag * step, diag * step),
                    (-diag * step, -diag * step),
                ] {
                    let v = eval(theta + dt, phi + dp);
                    if v < cur {
                        cur = v;
                        theta += dt;
                        phi += dp;
                        moved = true;
                        break;
                    }
                }
                if moved {
                    step = (step * 1.6).min(0.05);
                } else {
                    step *= 0.5;
                    if step < 1e-10 {
                        break;
                    }
                }
            }
            best = best.min(cur);
        }
        Ok(best.max(lower))
    }

    fn line_slices(&self, x: &[f64; 3], dir: &[f64; 3], out: &mut Vec<(f64, f64)>) {
        for m in &self.members {
            m.line_slices(x, dir, out);
        }
    }

    fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for m in &self.members {
            let (mlo, mhi) = m.bounding_box()?;
            for k in 0..3 {
                lo[k] = lo[k].min(mlo[k]);
                hi[k] = hi[k].max(mhi[k]);
            }
        }
        for k in self.dim..3 {
            lo[k] = 0.0;
            hi[k] = 0.0;
        }
        Some((lo, hi))
    }

    fn boundary_candidates(&self, x: &[f64; 3], out: &mut Vec<[f64; 3]>) {
        for m in &self.members {
            m.boundary_candidates(x, out);
        }
    }

    fn classify_cube(&self, lo: &[f64; 3], hi: &[f64; 3]) -> CubeClass {
        let mut all_outside = true;
        for m in &self.members {
            match m.classify_cube(lo, hi) {
                CubeClass::Inside => return CubeClass::Inside,
                CubeClass::Outside => {}
                CubeClass::Straddles => all_outside = false,
            }
        }
        if all_outside {
            return CubeClass::Outside;
        }
        // Conservative acceptance: a ball around the center that covers the
        // whole cube and fits inside a single member.
        let mut center = [0.0; 3];
        let mut half_diag2 = 0.0;
        for k in 0..self.dim {
            center[k] = 0.5 * (lo[k] + hi[k]);
            half_diag2 += 0.25 * (hi[k] - lo[k]) * (hi[k] - lo[k]);
        }
        let half_diag = half_diag2.sqrt();
        let mut corners_in = true;
        for_each_corner(lo, hi, self.dim, |c| {
            // Corners may sit on member boundaries; accept closure membership.
            if !self.contains(c) {
                let eps = 1e-12 * (1.0 + half_diag);
                let mut inside_closure = false;
                for m in &self.members {
                    if m.contains(c) {
                        inside_closure = true;
                        break;
                    }
                    let mut nudged = *c;
                    for (j, coord) in nudged.iter_mut().enumerate().take(self.dim) {
                        *coord += eps * (center[j] - c[j]).signum();
                    }
                    if m.contains(&nudged) {
                        inside_closure = true;
                        break;
                    }
                }
                if !inside_closure {
                    corners_in = false;
                }
            }
        });
        if corners_in {
            for m in &self.members {
                if m.contains(&center) {
                    if let Ok(d) = m.boundary_distance(&center) {
                        if d > half_diag * (1.0 + 1e-12) {
                            return CubeClass::Inside;
                        }
                    }
                }
            }
        }
        CubeClass::Straddles
    }

    fn volume(&self) -> Option<f64> {
        // Only resolvable when the members provably do not overlap.
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                let (ilo, ihi) = self.members[i].bounding_box()?;
                let (jlo, jhi) = self.members[j].bounding_box()?;
                let disjoint = (0..self.dim).any(|k| ihi[k] <= jlo[k] || jhi[k] <= ilo[k]);
                if !disjoint {
                    return None;
                }
            }
        }
        self.members.iter().map(|m| m.volume()).sum()
    }

    fn is_convex(&self) -> bool {
        false
    }

    fn to_json(&self) -> Value {
        json!({
            "type": "finite_union",
            "members": self.members.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Golden-section minimum of a unimodal-enough function on [a, b].
fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol.max(1e-15) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_distance_matches_square() {
        let poly = ConvexPolygon::new(vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
        ])
        .unwrap();
        let b = poly.boundary_distance(&[0.25, 0.5, 0.0]).unwrap();
        assert_eq!(b, 0.25);
    }
}
