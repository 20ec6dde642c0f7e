//! Regions of R^N (N = 1, 2, 3) with exact distance and ray-exit queries.
//!
//! A [`Region`] wraps one geometric kernel implementing [`Shape`]. Kernels
//! are selected at runtime by the `type` tag of a region file (see
//! [`registry`]), and every kernel answers the same queries: open
//! membership, boundary distance from an interior point, the open
//! parameter intervals a line spends inside the shape, cube classification
//! and nearest-boundary candidates. Points on the topological boundary
//! count as outside throughout, matching the convention that regions are
//! open sets.

mod shapes;

pub mod registry;

pub use shapes::{AxisBox, Ball, ConvexPolygon, CubeClass, FiniteUnion, HalfSpace, IntervalUnion, Shape};

use crate::error::{Error, Result};
use crate::sampling::{self, SamplerConfig};
use std::sync::Arc;

pub(crate) mod vec {
    pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn add_scaled(a: &[f64; 3], s: f64, b: &[f64; 3]) -> [f64; 3] {
        [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
    }

    pub fn norm(a: &[f64; 3]) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        norm(&sub(a, b))
    }
}

/// A point of R^N; unused trailing coordinates stay zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("point coordinates must be finite".into()));
        }
        let mut x = [0.0; 3];
        x[..coords.len()].copy_from_slice(coords);
        Ok(Point(x))
    }

    pub fn new1(x: f64) -> Self {
        Point([x, 0.0, 0.0])
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }
}

/// A unit vector of R^N. The constructor enforces unit norm to 1e-12.
#[derive(Debug, Clone, Copy)]
pub struct Direction([f64; 3]);

impl Direction {
    pub fn new(components: &[f64]) -> Result<Self> {
        if components.is_empty() || components.len() > 3 {
            return Err(Error::UnsupportedDimension(components.len()));
        }
        let mut d = [0.0; 3];
        d[..components.len()].copy_from_slice(components);
        let n = vec::norm(&d);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "direction norm {n} differs from 1 by more than 1e-12"
            )));
        }
        Ok(Direction(d))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(components: &[f64]) -> Result<Self> {
        if components.is_empty() || components.len() > 3 {
            return Err(Error::UnsupportedDimension(components.len()));
        }
        let mut d = [0.0; 3];
        d[..components.len()].copy_from_slice(components);
        let n = vec::norm(&d);
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidArgument("direction must be a nonzero finite vector".into()));
        }
        for c in &mut d {
            *c /= n;
        }
        Ok(Direction(d))
    }

    pub fn components(&self) -> &[f64; 3] {
        &self.0
    }
}

/// Estimate returned by [`Region::inradius_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct InradiusEstimate {
    pub value: f64,
    /// Linear resolution of the search grid the estimate came from.
    pub resolution: f64,
}

/// An open region of R^N backed by a shape kernel.
#[derive(Debug, Clone)]
pub struct Region {
    dim: usize,
    shape: Arc<dyn Shape>,
}

impl Region {
    pub fn new(dim: usize, shape: Arc<dyn Shape>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if shape.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: shape.dim(),
            });
        }
        Ok(Region { dim, shape })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Arc<dyn Shape> {
        &self.shape
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.shape.contains(&x.0)
    }

    /// Distance from an interior point to the complement of the region.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::PointOutsideRegion);
        }
        self.shape.boundary_distance(&x.0)
    }

    /// Smallest |s| over both signs with x + s*omega outside the region;
    /// +infinity when the whole line stays inside.
    pub fn directional_distance(&self, x: &Point, omega: &Direction) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::PointOutsideRegion);
        }
        let mut slices = Vec::with_capacity(4);
        self.shape.line_slices(&x.0, &omega.0, &mut slices);
        Ok(exit_distance(&mut slices))
    }

    pub fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        self.shape.bounding_box()
    }

    pub fn volume(&self) -> Option<f64> {
        self.shape.volume()
    }

    pub fn is_convex(&self) -> bool {
        self.shape.is_convex()
    }

    /// Supremum of the boundary distance over a deterministic low-discrepancy
    /// sample of the region, sharpened by local pattern search.
    pub fn inradius_estimate(&self, config: &SamplerConfig) -> Result<InradiusEstimate> {
        let (lo, hi) = self
            .bounding_box()
            .or(config.window)
            .ok_or(Error::UnboundedWithoutWindow)?;
        let count = config.samples.max(512);
        let points = sampling::halton_in_box(count, &lo, &hi, self.dim);
        let mut starts: Vec<([f64; 3], f64)> = Vec::new();
        for p in points {
            if self.shape.contains(&p) {
                if let Ok(d) = self.shape.boundary_distance(&p) {
                    starts.push((p, d));
                }
            }
        }
        if starts.is_empty() {
            return Err(Error::InvalidRegion(
                "no interior point found in the sampling window".into(),
            ));
        }
        starts.sort_by(|a, b| b.1.total_cmp(&a.1));
        starts.truncate(4);
        let extent = (0..self.dim).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max);
        let mut best = starts[0];
        for (start, d0) in starts {
            let refined = self.pattern_search(start, d0, extent);
            if refined.1 > best.1 {
                best = refined;
            }
        }
        let resolution = extent / (count as f64).powf(1.0 / self.dim as f64);
        Ok(InradiusEstimate {
            value: best.1,
            resolution,
        })
    }

    fn pattern_search(&self, mut x: [f64; 3], mut fx: f64, extent: f64) -> ([f64; 3], f64) {
        let mut step = extent / 8.0;
        for _ in 0..60 {
            let mut improved = false;
            for k in 0..self.dim {
                for sgn in [-1.0, 1.0] {
                    let mut y = x;
                    y[k] += sgn * step;
                    if self.shape.contains(&y) {
                        if let Ok(d) = self.shape.boundary_distance(&y) {
                            if d > fx {
                                x = y;
                                fx = d;
                                improved = true;
                            }
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step < 1e-12 * extent.max(1.0) {
                    break;
                }
            }
        }
        (x, fx)
    }

    /// Deterministic seeded rejection sampling from the bounding box (or the
    /// supplied window). Every returned point is strictly interior.
    pub fn sample_interior(&self, config: &SamplerConfig) -> Result<Vec<Point>> {
        if config.samples == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        let (lo, hi) = self
            .bounding_box()
            .or(config.window)
            .ok_or(Error::UnboundedWithoutWindow)?;
        let mut rng = sampling::rng_for(config.seed);
        let mut out = Vec::with_capacity(config.samples);
        let mut attempts: u64 = 0;
        while out.len() < config.samples {
            attempts += 1;
            let p = sampling::uniform_in_box(&mut rng, &lo, &hi, self.dim);
            if self.shape.contains(&p) {
                out.push(Point(p));
            }
            if attempts > 1_000_000 && (out.len() as f64) < attempts as f64 * 1e-6 {
                return Err(Error::RejectionBudgetExceeded);
            }
        }
        Ok(out)
    }
}

/// Exit distance (both signs of s) out of a set of open line slices that is
/// known to contain s = 0.
fn exit_distance(slices: &mut Vec<(f64, f64)>) -> f64 {
    if slices.is_empty() {
        return 0.0;
    }
    merge_slices(slices);
    for &(lo, hi) in slices.iter() {
        if lo < 0.0 && 0.0 < hi {
            return (-lo).min(hi);
        }
    }
    // x was on (or within rounding of) a slice edge; the exit is immediate.
    0.0
}

/// Merges strictly overlapping open intervals in place. Touching intervals
/// stay separate: their shared endpoint is outside the open union.
pub(crate) fn merge_slices(slices: &mut Vec<(f64, f64)>) {
    if slices.len() <= 1 {
        return;
    }
    slices.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(slices.len());
    for &(lo, hi) in slices.iter() {
        match merged.last_mut() {
            Some(last) if lo < last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    *slices = merged;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(dim: usize, center: &[f64], r: f64) -> Region {
        let c = Point::from_slice(center).unwrap();
        Region::new(dim, Arc::new(Ball::new(dim, c.0, r).unwrap())).unwrap()
    }

    #[test]
    fn distance_examples() {
        let sq = Region::new(
            2,
            Arc::new(AxisBox::new(2, [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]).unwrap()),
        )
        .unwrap();
        assert_eq!(sq.distance(&Point::new2(0.5, 0.5)).unwrap(), 0.5);

        let iv = Region::new(
            1,
            Arc::new(IntervalUnion::new(vec![(0.0, 1.0)]).unwrap()),
        )
        .unwrap();
        assert_eq!(iv.distance(&Point::new1(0.25)).unwrap(), 0.25);

        let b = ball(3, &[0.0, 0.0, 0.0], 2.0);
        assert_eq!(b.distance(&Point::new3(1.0, 0.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn boundary_points_are_outside() {
        let iv = Region::new(1, Arc::new(IntervalUnion::new(vec![(0.0, 1.0)]).unwrap())).unwrap();
        assert!(!iv.contains(&Point::new1(0.0)));
        assert!(!iv.contains(&Point::new1(1.0)));
        assert!(matches!(
            iv.distance(&Point::new1(1.0)),
            Err(Error::PointOutsideRegion)
        ));
    }

    #[test]
    fn directional_distance_half_space() {
        let hs = Region::new(
            2,
            Arc::new(HalfSpace::new(2, [1.0, 0.0, 0.0], 0.0).unwrap()),
        )
        .unwrap();
        let x = Point::new2(1.0, 0.0);
        let theta = std::f64::consts::PI / 3.0;
        let omega = Direction::new(&[theta.cos(), theta.sin()]).unwrap();
        let d = hs.directional_distance(&x, &omega).unwrap();
        approx::assert_relative_eq!(d, 2.0, epsilon = 1e-12);

        let parallel = Direction::new(&[0.0, 1.0]).unwrap();
        assert_eq!(hs.directional_distance(&x, &parallel).unwrap(), f64::INFINITY);
    }

    #[test]
    fn directional_distance_considers_both_signs() {
        let iv = Region::new(1, Arc::new(IntervalUnion::new(vec![(0.0, 1.0)]).unwrap())).unwrap();
        let fwd = Direction::new(&[1.0]).unwrap();
        let d = iv
            .directional_distance(&Point::new1(0.25), &fwd)
            .unwrap();
        assert_eq!(d, 0.25);
    }

    #[test]
    fn inradius_estimates() {
        let sq = Region::new(
            2,
            Arc::new(AxisBox::new(2, [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]).unwrap()),
        )
        .unwrap();
        let est = sq.inradius_estimate(&SamplerConfig::new(2000, 0)).unwrap();
        assert!((est.value - 0.5).abs() < 1e-3);

        let b = ball(2, &[0.3, -0.2], 0.75);
        let est = b.inradius_estimate(&SamplerConfig::new(2000, 0)).unwrap();
        assert!((est.value - 0.75).abs() < 1e-3);

        let iv = Region::new(
            1,
            Arc::new(IntervalUnion::new(vec![(0.0, 1.0), (2.0, 4.0)]).unwrap()),
        )
        .unwrap();
        let est = iv.inradius_estimate(&SamplerConfig::new(2000, 0)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn sample_interior_is_seeded_and_interior() {
        let sq = Region::new(
            2,
            Arc::new(AxisBox::new(2, [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]).unwrap()),
        )
        .unwrap();
        let a = sq.sample_interior(&SamplerConfig::new(4, 7)).unwrap();
        let b = sq.sample_interior(&SamplerConfig::new(4, 7)).unwrap();
        assert_eq!(a.len(), 4);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.0, q.0);
        }
        assert!(a.iter().all(|p| sq.contains(p)));

        assert!(matches!(
            sq.sample_interior(&SamplerConfig::new(0, 7)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn ball_sample_mean_near_center() {
        let b = ball(2, &[0.0, 0.0], 1.0);
        let pts = b.sample_interior(&SamplerConfig::new(1000, 1)).unwrap();
        let mut mean = [0.0; 2];
        for p in &pts {
            mean[0] += p.0[0];
            mean[1] += p.0[1];
        }
        mean[0] /= pts.len() as f64;
        mean[1] /= pts.len() as f64;
        assert!(mean[0].abs() < 0.1 && mean[1].abs() < 0.1);
    }

    #[test]
    fn half_space_needs_window() {
        let hs = Region::new(
            2,
            Arc::new(HalfSpace::new(2, [1.0, 0.0, 0.0], 0.0).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            hs.sample_interior(&SamplerConfig::new(10, 0)),
            Err(Error::UnboundedWithoutWindow)
        ));
        let cfg = SamplerConfig::new(10, 0).with_window([0.0, -1.0, 0.0], [2.0, 1.0, 0.0]);
        assert_eq!(hs.sample_interior(&cfg).unwrap().len(), 10);
    }
}
