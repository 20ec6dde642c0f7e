//! The pseudodistance a_m and empirical regularity constants.
//!
//! a_m(x) = [ integral over S^{N-1} of d_omega(x)^{-2m} ]^{-1/2m} under the
//! normalized surface measure, realized with a [`SphericalRule`]. Directions
//! whose whole line stays inside the region contribute zero to the sum, and
//! the pseudodistance is infinite exactly when every direction does.

use crate::error::{Error, Result};
use crate::geometry::{Direction, Point, Region};
use crate::sampling::{SamplerConfig, GENERATOR_ID};
use crate::spherequad::{HardyConstants, SphericalRule};

/// Evaluates a_m(x) for real order m >= 1.
pub fn pseudodistance(region: &Region, x: &Point, m: f64, rule: &SphericalRule) -> Result<f64> {
    if rule.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: rule.dim(),
        });
    }
    if !m.is_finite() || m < 1.0 {
        return Err(Error::InvalidArgument("pseudodistance order m must be >= 1".into()));
    }
    if !region.contains(x) {
        return Err(Error::PointOutsideRegion);
    }
    let power = -2.0 * m;
    let mut sum = 0.0;
    for (node, w) in rule.iter() {
        let omega = Direction::new(&node[..region.dim()])?;
        let d = region.directional_distance(x, &omega)?;
        if d.is_finite() {
            sum += w * d.powf(power);
        }
    }
    if sum == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(sum.powf(-1.0 / (2.0 * m)))
}

/// Empirical bounds for the ratio a_m/d over a seeded interior sample.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub m: f64,
    /// Empirical supremum of a_m/d, the k_m estimate.
    pub k_estimate: f64,
    /// Empirical infimum of a_m/d; at least 1 up to rounding.
    pub min_ratio: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub generator: &'static str,
    /// (P/D)^{1/2m}, reported for convex regions together with whether the
    /// sampled supremum stayed below it.
    pub convex_bound: Option<f64>,
    pub convex_ok: Option<bool>,
}

/// Samples a_m/d over the region and reports sup and inf.
pub fn regularity_constant(
    region: &Region,
    m: f64,
    sampler: &SamplerConfig,
    rule: &SphericalRule,
) -> Result<RegularityReport> {
    let points = region.sample_interior(sampler)?;
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for p in &points {
        let d = region.distance(p)?;
        let a = pseudodistance(region, p, m, rule)?;
        if !a.is_finite() {
            continue;
        }
        let ratio = a / d;
        sup = sup.max(ratio);
        inf = inf.min(ratio);
    }
    let (convex_bound, convex_ok) = if region.is_convex() {
        let bound = HardyConstants::real(m, region.dim())?.convex_comparison();
        (Some(bound), Some(sup <= bound + 1e-6))
    } else {
        (None, None)
    };
    Ok(RegularityReport {
        m,
        k_estimate: sup,
        min_ratio: inf,
        sample_count: points.len(),
        seed: sampler.seed,
        generator: GENERATOR_ID,
        convex_bound,
        convex_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AxisBox, Ball, HalfSpace, IntervalUnion, Region};
    use crate::spherequad::{build_rule, default_resolution};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn half_space(dim: usize) -> Region {
        let mut n = [0.0; 3];
        n[0] = 1.0;
        Region::new(dim, Arc::new(HalfSpace::new(dim, n, 0.0).unwrap())).unwrap()
    }

    #[test]
    fn half_space_closed_form() {
        // a_m = d * (P/D)^{1/2m}; the integrand is a degree-2m polynomial in
        // omega, so the default rules evaluate it exactly.
        for dim in [2usize, 3] {
            for m in [1u32, 2, 3] {
                let region = half_space(dim);
                let rule = build_rule(dim, default_resolution(m)).unwrap();
                let x = match dim {
                    2 => Point::new2(1.0, 0.4),
                    _ => Point::new3(1.0, 0.4, -0.3),
                };
                let a = pseudodistance(&region, &x, m as f64, &rule).unwrap();
                let c = HardyConstants::integer(m, dim).unwrap();
                assert_relative_eq!(a, 1.0 * c.convex_comparison(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn interval_pseudodistance_equals_distance() {
        // In 1D both atoms of S^0 see the same two-sided exit distance, so
        // a_m = d for every m.
        let region = Region::new(1, Arc::new(IntervalUnion::new(vec![(0.0, 1.0)]).unwrap())).unwrap();
        let rule = build_rule(1, 1).unwrap();
        let a = pseudodistance(&region, &Point::new1(0.25), 1.0, &rule).unwrap();
        assert_relative_eq!(a, 0.25, epsilon = 1e-14);
        let a2 = pseudodistance(&region, &Point::new1(0.25), 2.0, &rule).unwrap();
        assert_relative_eq!(a2, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn ball_center_sees_radius() {
        let region = Region::new(2, Arc::new(Ball::new(2, [0.0, 0.0, 0.0], 0.8).unwrap())).unwrap();
        let rule = build_rule(2, 16).unwrap();
        let a = pseudodistance(&region, &Point::new2(0.0, 0.0), 1.0, &rule).unwrap();
        assert_relative_eq!(a, 0.8, epsilon = 1e-13);
    }

    #[test]
    fn whole_plane_union_has_infinite_pseudodistance() {
        // {x1 > -1} union {x1 < 1} covers the plane: no line ever exits.
        use crate::geometry::FiniteUnion;
        let left = Arc::new(HalfSpace::new(2, [1.0, 0.0, 0.0], -1.0).unwrap());
        let right = Arc::new(HalfSpace::new(2, [-1.0, 0.0, 0.0], -1.0).unwrap());
        let region = Region::new(2, Arc::new(FiniteUnion::new(2, vec![left, right]).unwrap())).unwrap();
        let rule = build_rule(2, 8).unwrap();
        let a = pseudodistance(&region, &Point::new2(0.0, 0.0), 1.0, &rule).unwrap();
        assert!(a.is_infinite());
    }

    #[test]
    fn regularity_square_and_ball() {
        let square = Region::new(
            2,
            Arc::new(AxisBox::new(2, [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]).unwrap()),
        )
        .unwrap();
        let rule = build_rule(2, 16).unwrap();
        let report =
            regularity_constant(&square, 1.0, &SamplerConfig::new(2000, 3), &rule).unwrap();
        assert!(report.min_ratio >= 1.0 - 1e-9);
        assert_eq!(report.sample_count, 2000);
        assert_eq!(report.convex_ok, Some(true));

        let ball = Region::new(2, Arc::new(Ball::new(2, [0.0, 0.0, 0.0], 1.0).unwrap())).unwrap();
        let report = regularity_constant(&ball, 1.0, &SamplerConfig::new(2000, 3), &rule).unwrap();
        let bound = HardyConstants::integer(1, 2).unwrap().convex_comparison();
        assert!(report.k_estimate <= bound + 1e-6);
        assert_relative_eq!(bound, 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn monotone_in_m_on_interval_union() {
        let region = Region::new(
            1,
            Arc::new(IntervalUnion::new(vec![(0.0, 1.0)]).unwrap()),
        )
        .unwrap();
        let rule = build_rule(1, 1).unwrap();
        let cfg = SamplerConfig::new(500, 11);
        let r1 = regularity_constant(&region, 1.0, &cfg, &rule).unwrap();
        let r2 = regularity_constant(&region, 2.0, &cfg, &rule).unwrap();
        assert!(r2.k_estimate <= r1.k_estimate + 1e-9);
    }
}
