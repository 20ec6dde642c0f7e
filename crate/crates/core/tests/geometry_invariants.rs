//! Cross-shape geometry invariants: ray exits versus a bisection oracle,
//! Lipschitz continuity of the boundary distance, and the union fallback
//! against hand-computed configurations.

use polyrellich_core::geometry::{
    AxisBox, Ball, ConvexPolygon, Direction, FiniteUnion, HalfSpace, IntervalUnion, Point, Region,
};
use polyrellich_core::sampling::SamplerConfig;
use proptest::prelude::*;
use std::sync::Arc;

fn disk() -> Region {
    Region::new(2, Arc::new(Ball::new(2, [0.2, -0.1, 0.0], 1.3).unwrap())).unwrap()
}

fn boxy() -> Region {
    Region::new(2, Arc::new(AxisBox::new(2, [0.0, 0.0, 0.0], [2.0, 1.0, 0.0]).unwrap())).unwrap()
}

fn triangle() -> Region {
    Region::new(
        2,
        Arc::new(ConvexPolygon::new(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 2.0]]).unwrap()),
    )
    .unwrap()
}

/// Root-solve for the first membership flip along +-omega: the oracle for
/// directional distances.
fn bisect_exit(region: &Region, x: &Point, omega: &Direction) -> f64 {
    let step = 1e-3;
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let mut s = 0.0;
        let mut inside = true;
        while inside && s < 100.0 {
            s += step;
            let p = Point([
                x.0[0] + sign * s * omega.components()[0],
                x.0[1] + sign * s * omega.components()[1],
                x.0[2] + sign * s * omega.components()[2],
            ]);
            inside = region.contains(&p);
        }
        if !inside {
            let (mut lo, mut hi) = (s - step, s);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let p = Point([
                    x.0[0] + sign * mid * omega.components()[0],
                    x.0[1] + sign * mid * omega.components()[1],
                    x.0[2] + sign * mid * omega.components()[2],
                ]);
                if region.contains(&p) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.min(0.5 * (lo + hi));
        }
    }
    best
}

#[test]
fn directional_distance_matches_bisection_oracle() {
    for region in [disk(), boxy(), triangle()] {
        let points = region.sample_interior(&SamplerConfig::new(40, 17)).unwrap();
        for (i, p) in points.iter().enumerate() {
            let theta = 0.37 + 0.61 * i as f64;
            let omega = Direction::new(&[theta.cos(), theta.sin()]).unwrap();
            let fast = region.directional_distance(p, &omega).unwrap();
            let slow = bisect_exit(&region, p, &omega);
            assert!(
                (fast - slow).abs() <= 1e-10 + 1e-10 * slow,
                "fast {fast} vs oracle {slow}"
            );
        }
    }
}

#[test]
fn union_of_overlapping_disks_distance() {
    // Two unit disks centered at (-c, 0) and (c, 0): from the origin the
    // nearest boundary point of the union is a circle intersection at
    // height sqrt(1 - c^2).
    let c = 0.6;
    let members: Vec<Arc<dyn polyrellich_core::geometry::Shape>> = vec![
        Arc::new(Ball::new(2, [-c, 0.0, 0.0], 1.0).unwrap()),
        Arc::new(Ball::new(2, [c, 0.0, 0.0], 1.0).unwrap()),
    ];
    let region = Region::new(2, Arc::new(FiniteUnion::new(2, members).unwrap())).unwrap();
    let d = region.distance(&Point::new2(0.0, 0.0)).unwrap();
    let exact = (1.0 - c * c).sqrt();
    assert!((d - exact).abs() < 1e-8, "{d} vs {exact}");

    // Away from the lens the containing-disk distance is exact.
    let d2 = region.distance(&Point::new2(1.2, 0.0)).unwrap();
    assert!((d2 - (1.0 - (1.2f64 - c).abs())).abs() < 1e-12);
}

#[test]
fn union_of_overlapping_balls_3d_distance() {
    // Same lens configuration one dimension up: the nearest complement
    // point from the origin sits on the intersection circle at height
    // sqrt(1 - c^2), found by the spherical sweep fallback.
    let c = 0.6;
    let members: Vec<Arc<dyn polyrellich_core::geometry::Shape>> = vec![
        Arc::new(Ball::new(3, [-c, 0.0, 0.0], 1.0).unwrap()),
        Arc::new(Ball::new(3, [c, 0.0, 0.0], 1.0).unwrap()),
    ];
    let region = Region::new(3, Arc::new(FiniteUnion::new(3, members).unwrap())).unwrap();
    let d = region.distance(&Point::new3(0.0, 0.0, 0.0)).unwrap();
    let exact = (1.0 - c * c).sqrt();
    assert!((d - exact).abs() < 1e-6, "{d} vs {exact}");
}

#[test]
fn union_of_disjoint_members_uses_member_distance() {
    let members: Vec<Arc<dyn polyrellich_core::geometry::Shape>> = vec![
        Arc::new(Ball::new(2, [0.0, 0.0, 0.0], 1.0).unwrap()),
        Arc::new(AxisBox::new(2, [3.0, 0.0, 0.0], [4.0, 1.0, 0.0]).unwrap()),
    ];
    let region = Region::new(2, Arc::new(FiniteUnion::new(2, members).unwrap())).unwrap();
    let d = region.distance(&Point::new2(0.3, 0.0)).unwrap();
    assert!((d - 0.7).abs() < 1e-12);
    let d = region.distance(&Point::new2(3.5, 0.5)).unwrap();
    assert!((d - 0.5).abs() < 1e-12);
}

#[test]
fn touching_boxes_split_on_the_interface() {
    // The shared face belongs to neither open box, so a ray crossing it
    // exits there.
    let members: Vec<Arc<dyn polyrellich_core::geometry::Shape>> = vec![
        Arc::new(AxisBox::new(2, [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]).unwrap()),
        Arc::new(AxisBox::new(2, [1.0, 0.0, 0.0], [2.0, 1.0, 0.0]).unwrap()),
    ];
    let region = Region::new(2, Arc::new(FiniteUnion::new(2, members).unwrap())).unwrap();
    let omega = Direction::new(&[1.0, 0.0]).unwrap();
    let d = region
        .directional_distance(&Point::new2(0.75, 0.5), &omega)
        .unwrap();
    assert!((d - 0.25).abs() < 1e-12, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn directional_never_below_distance(
        px in -0.9f64..0.9,
        py in -0.9f64..0.9,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let region = disk();
        let p = Point::new2(0.2 + px, -0.1 + py);
        prop_assume!(region.contains(&p));
        let omega = Direction::new(&[theta.cos(), theta.sin()]).unwrap();
        let d = region.distance(&p).unwrap();
        let dd = region.directional_distance(&p, &omega).unwrap();
        prop_assert!(dd >= d - 1e-12);
    }

    #[test]
    fn distance_is_lipschitz(
        ax in 0.05f64..1.95,
        ay in 0.05f64..0.95,
        bx in 0.05f64..1.95,
        by in 0.05f64..0.95,
    ) {
        let region = boxy();
        let a = Point::new2(ax, ay);
        let b = Point::new2(bx, by);
        let da = region.distance(&a).unwrap();
        let db = region.distance(&b).unwrap();
        let dist = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
        prop_assert!((da - db).abs() <= dist + 1e-12);
    }

    #[test]
    fn interval_union_exit_is_exact(
        x in 0.01f64..0.99,
    ) {
        let region = Region::new(
            1,
            Arc::new(IntervalUnion::new(vec![(0.0, 1.0), (2.0, 2.5)]).unwrap()),
        ).unwrap();
        let p = Point::new1(x);
        let omega = Direction::new(&[1.0]).unwrap();
        let d = region.directional_distance(&p, &omega).unwrap();
        prop_assert!((d - x.min(1.0 - x)).abs() < 1e-12);
    }
}

#[test]
fn half_space_distance_with_shifted_offset() {
    let hs = Region::new(
        3,
        Arc::new(HalfSpace::new(3, [0.0, 2.0, 0.0], 1.0).unwrap()),
    )
    .unwrap();
    // normalized: {y > 0.5}
    let p = Point::new3(0.0, 1.5, 0.0);
    assert!((hs.distance(&p).unwrap() - 1.0).abs() < 1e-12);
}
