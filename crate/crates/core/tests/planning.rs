use sweepopt::experiments::random_scene;
use sweepopt::geometry::{CircleObstacle, Point2, Polygon};
use sweepopt::metrics::{covered_area, cumulative_curves, default_cell, linear_fit_r2, plan_metrics};
use sweepopt::planner::{plan_coverage, RobotSpec, Scene, SliceFlag};
use sweepopt::Error;

fn square(obstacles: Vec<CircleObstacle<f64>>) -> Scene<f64> {
    Scene::new(
        Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap(),
        obstacles,
        RobotSpec { coverage_radius: 0.1 },
        0.5,
        20,
    )
    .unwrap()
}

fn disc(x: f64, y: f64, r: f64) -> CircleObstacle<f64> {
    CircleObstacle::new(Point2::new(x, y), r).unwrap()
}

#[test]
fn obstacle_free_square_is_covered_by_fifty_linear_slices() {
    let scene = square(vec![]);
    let plan = plan_coverage(&scene).unwrap();
    assert_eq!(plan.slices.len(), 50);
    assert!(plan.flags().iter().all(|&f| f == SliceFlag::Nominal));
    let area = covered_area(&plan, &scene, default_cell(&scene)).unwrap();
    assert!(area / scene.workspace.area() >= 0.99, "coverage {area}");

    let curves = cumulative_curves(&plan, &scene, default_cell(&scene)).unwrap();
    let e: Vec<f64> = curves.iter().map(|c| c.energy).collect();
    let t: Vec<f64> = curves.iter().map(|c| c.time).collect();
    let a: Vec<f64> = curves.iter().map(|c| c.area).collect();
    for ys in [&e, &t, &a] {
        assert!(linear_fit_r2(ys) >= 0.999);
    }

    // Consecutive slices alternate direction and stack by one swath.
    for w in plan.slices.windows(2) {
        let (p, q) = (&w[0].trajectory, &w[1].trajectory);
        assert!((q.start_position().y - p.end_position().y - 0.2).abs() < 1e-9);
        assert!((q.start_position().x - p.end_position().x).abs() < 1e-9);
    }
}

#[test]
fn slices_clear_random_obstacles() {
    let ws = Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap();
    let scene = random_scene(ws, RobotSpec { coverage_radius: 0.1 }, 4, (0.05, 0.2), 11).unwrap();
    let plan = plan_coverage(&scene).unwrap();
    for s in &plan.slices {
        for x in &s.trajectory.states {
            for o in &scene.obstacles {
                assert!(o.penetration(Point2::new(x[0], x[1])) <= 1e-6, "slice {}", s.index);
            }
        }
    }
    let bare = plan_coverage(&Scene { obstacles: vec![], ..scene.clone() }).unwrap();
    let m = plan_metrics(&plan, &scene, Some(&bare)).unwrap();
    assert!(m.coverage_ratio >= 1.0);
}

#[test]
fn failure_modes_are_reported() {
    let blocked = plan_coverage(&square(vec![disc(0.1, 0.1, 0.1)]));
    assert!(matches!(blocked, Err(Error::BlockedEndpoint { slice: 0, obstacle: 0 })), "{blocked:?}");
    let infeasible = plan_coverage(&square(vec![disc(5.0, 9.75, 0.25)]));
    assert!(matches!(infeasible, Err(Error::SliceInfeasible { .. })), "{infeasible:?}");
}

#[test]
fn scene_validation_names_the_offending_obstacles() {
    let err = Scene::new(
        Polygon::rectangle(0.0, 0.0, 10.0, 10.0).unwrap(),
        vec![disc(2.0, 2.0, 0.5), disc(5.0, 5.0, 0.5), disc(5.5, 5.0, 0.3)],
        RobotSpec { coverage_radius: 0.1 },
        0.5,
        20,
    )
    .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("obstacle 1 intersects obstacle 2"), "{msg}");
}
