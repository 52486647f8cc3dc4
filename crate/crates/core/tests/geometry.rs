use proptest::prelude::*;
use sweepopt::geometry::{
    convex_hull, diameter, msa_cost, optimal_sweep_direction, CircleObstacle, Point2, Polygon, SweepDirection,
};

fn polygon_from(points: &[(f64, f64)]) -> Option<Polygon<f64>> {
    let pts: Vec<Point2<f64>> = points.iter().map(|&(x, y)| Point2::new(x, y)).collect();
    convex_hull(&pts).ok()
}

/// Minimum of the altitude function by dense search, independent of the
/// edge-candidate argument.
fn dense_min_width(p: &Polygon<f64>) -> f64 {
    (0..20_000)
        .map(|k| diameter(p, SweepDirection::new(std::f64::consts::PI * k as f64 / 20_000.0)))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn square_minimizers_are_the_axes() {
    let sq = Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap();
    let (best, cost) = optimal_sweep_direction(&sq, &[]);
    assert_eq!(best.theta(), 0.0);
    assert!((cost - 10.0f64).abs() < 1e-12);
    let at_90 = msa_cost(&sq, &[], SweepDirection::new(std::f64::consts::FRAC_PI_2));
    assert!((at_90 - cost).abs() < 1e-9);
    let at_45 = msa_cost(&sq, &[], SweepDirection::new(std::f64::consts::FRAC_PI_4));
    assert!(at_45 > cost + 4.0);
}

#[test]
fn rectangle_sweeps_along_its_long_side() {
    let r = Polygon::rectangle(0.0, 0.0, 2.0, 8.0).unwrap();
    let (best, cost) = optimal_sweep_direction(&r, &[]);
    assert!((best.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((cost - 2.0f64).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn argmin_ignores_circular_obstacles(
        pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..12),
        discs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 0.01f64..1.0), 1..6),
    ) {
        let Some(poly) = polygon_from(&pts) else { return Ok(()) };
        let obstacles: Vec<CircleObstacle<f64>> =
            discs.iter().map(|&(x, y, r)| CircleObstacle::new(Point2::new(x, y), r).unwrap()).collect();
        let (bare, bare_cost) = optimal_sweep_direction(&poly, &[]);
        let (with, with_cost) = optimal_sweep_direction(&poly, &obstacles);
        prop_assert_eq!(bare.theta(), with.theta());
        let holes: f64 = obstacles.iter().map(|o| 2.0 * o.radius).sum();
        prop_assert!((with_cost - bare_cost - holes).abs() < 1e-9);
    }

    #[test]
    fn edge_candidates_attain_the_dense_minimum(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..12)) {
        let Some(poly) = polygon_from(&pts) else { return Ok(()) };
        let (_, cost) = optimal_sweep_direction(&poly, &[]);
        let dense = dense_min_width(&poly);
        prop_assert!(cost <= dense + 1e-9, "edge min {} dense {}", cost, dense);
        prop_assert!(dense - cost < 1e-2 * dense.max(1.0));
    }

    #[test]
    fn width_is_pi_periodic(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..10), theta in 0.0f64..3.0) {
        let Some(poly) = polygon_from(&pts) else { return Ok(()) };
        let a = diameter(&poly, SweepDirection::new(theta));
        let b = diameter(&poly, SweepDirection::new(theta + std::f64::consts::PI));
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn frame_round_trip(theta in -7.0f64..7.0, x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let s = SweepDirection::new(theta);
        let (u, v) = s.to_frame(Point2::new(x, y));
        let p = s.from_frame(u, v);
        prop_assert!((p.x - x).abs() < 1e-9 && (p.y - y).abs() < 1e-9);
    }
}
