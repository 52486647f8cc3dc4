//! Plan-level metrics: control energy, duration, path length, rasterized
//! covered area and the path-length ratio against an obstacle-free plan.

use serde::{Deserialize, Serialize};

use crate::collocation::{lgl_grid, uniform_taus};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::planner::{CoveragePlan, Scene};
use crate::scalar::Scalar;
use crate::transcription::Trajectory;

/// Dense samples per unit of grid order used for path length and coverage.
pub const SAMPLES_PER_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanMetrics<S> {
    pub total_energy: S,
    pub total_time: S,
    pub total_path_length: S,
    pub covered_area: S,
    /// Path length relative to the obstacle-free plan; 1 without a reference.
    pub coverage_ratio: S,
}

/// `Σ ∫ (u1² + u2²) dt` over the slices.
pub fn total_energy<S: Scalar>(plan: &CoveragePlan<S>) -> S {
    plan.trajectories().map(|t| t.energy).sum()
}

pub fn total_time<S: Scalar>(plan: &CoveragePlan<S>) -> S {
    plan.trajectories().map(|t| t.final_time).sum()
}

fn dense_count(order: usize) -> usize {
    (SAMPLES_PER_ORDER * order).max(2)
}

/// Interpolated states at the dense sampling instants of `trajectory`.
pub fn dense_samples<S: Scalar>(trajectory: &Trajectory<S>) -> Vec<[S; 4]> {
    let grid = lgl_grid(trajectory.order).expect("trajectory order is at least 1");
    trajectory.dense_states(&grid, &uniform_taus(dense_count(trajectory.order)))
}

/// Trapezoid rule on the interpolated speed.
pub fn path_length<S: Scalar>(trajectory: &Trajectory<S>) -> S {
    let samples = dense_samples(trajectory);
    let dt = trajectory.final_time / S::from_count(samples.len() - 1);
    let speed: Vec<S> = samples.iter().map(|s| (s[2] * s[2] + s[3] * s[3]).sqrt()).collect();
    speed.windows(2).map(|w| (w[0] + w[1]) / S::lit(2.0) * dt).sum()
}

pub fn total_path_length<S: Scalar>(plan: &CoveragePlan<S>) -> S {
    plan.trajectories().map(path_length).sum()
}

/// `total_path_length(with) / total_path_length(without)`.
pub fn coverage_ratio<S: Scalar>(with: &CoveragePlan<S>, without: &CoveragePlan<S>) -> Result<S> {
    let base = total_path_length(without);
    if !(base > S::zero()) {
        return Err(Error::DivisionByZero("obstacle-free plan has zero path length".into()));
    }
    Ok(total_path_length(with) / base)
}

/// Cell raster over the workspace bounding box.
struct Raster<'a, S> {
    scene: &'a Scene<S>,
    origin: Point2<S>,
    cell: S,
    cols: usize,
    rows: usize,
    marked: Vec<bool>,
    counted: usize,
}

impl<'a, S: Scalar> Raster<'a, S> {
    fn new(scene: &'a Scene<S>, cell: S) -> Self {
        let (lo, hi) = scene.workspace.bounding_box();
        let cols = ((hi.x - lo.x) / cell).ceil().to_usize().unwrap_or(0);
        let rows = ((hi.y - lo.y) / cell).ceil().to_usize().unwrap_or(0);
        Self { scene, origin: lo, cell, cols, rows, marked: vec![false; cols * rows], counted: 0 }
    }

    fn center(&self, i: usize, j: usize) -> Point2<S> {
        let half = S::lit(0.5);
        Point2::new(
            self.origin.x + (S::from_count(i) + half) * self.cell,
            self.origin.y + (S::from_count(j) + half) * self.cell,
        )
    }

    fn index_range(&self, lo: S, hi: S, origin: S, n: usize) -> (usize, usize) {
        let a = ((lo - origin) / self.cell - S::lit(0.5)).floor().max(S::zero());
        let b = ((hi - origin) / self.cell - S::lit(0.5)).ceil().max(S::zero());
        let a = a.to_usize().unwrap_or(0).min(n);
        let b = (b.to_usize().unwrap_or(0) + 1).min(n);
        (a, b)
    }

    /// Marks every valid cell whose center lies within `radius` of segment `ab`.
    fn mark_segment(&mut self, a: Point2<S>, b: Point2<S>, radius: S) {
        let (ci0, ci1) = self.index_range(a.x.min(b.x) - radius, a.x.max(b.x) + radius, self.origin.x, self.cols);
        let (rj0, rj1) = self.index_range(a.y.min(b.y) - radius, a.y.max(b.y) + radius, self.origin.y, self.rows);
        let ab = b - a;
        let len2 = ab.dot(ab);
        for j in rj0..rj1 {
            for i in ci0..ci1 {
                let k = j * self.cols + i;
                if self.marked[k] {
                    continue;
                }
                let p = self.center(i, j);
                let s = if len2 > S::zero() { ((p - a).dot(ab) / len2).max(S::zero()).min(S::one()) } else { S::zero() };
                let q = a + ab.scale(s);
                if p.distance(q) > radius {
                    continue;
                }
                self.marked[k] = true;
                let valid = self.scene.workspace.contains(p)
                    && !self.scene.obstacles.iter().any(|o| o.center.distance(p) < o.radius);
                if valid {
                    self.counted += 1;
                }
            }
        }
    }

    fn mark_trajectory(&mut self, trajectory: &Trajectory<S>, radius: S) {
        let pts: Vec<Point2<S>> = dense_samples(trajectory).iter().map(|s| Point2::new(s[0], s[1])).collect();
        for w in pts.windows(2) {
            self.mark_segment(w[0], w[1], radius);
        }
    }

    fn area(&self) -> S {
        S::from_count(self.counted) * self.cell * self.cell
    }
}

fn check_cell<S: Scalar>(scene: &Scene<S>, cell: S) -> Result<()> {
    let limit = scene.robot.coverage_radius / S::lit(2.0);
    if !(cell > S::zero() && cell <= limit) {
        return Err(Error::ResolutionTooCoarse { cell: cell.to_f64_lossy(), limit: limit.to_f64_lossy() });
    }
    Ok(())
}

/// Default raster cell, a fifth of the coverage radius.
pub fn default_cell<S: Scalar>(scene: &Scene<S>) -> S {
    scene.robot.coverage_radius / S::lit(5.0)
}

/// Area of workspace cells, outside every obstacle, whose centers lie within
/// the coverage radius of the dense trajectory polylines.
pub fn covered_area<S: Scalar>(plan: &CoveragePlan<S>, scene: &Scene<S>, cell: S) -> Result<S> {
    check_cell(scene, cell)?;
    let mut raster = Raster::new(scene, cell);
    for t in plan.trajectories() {
        raster.mark_trajectory(t, scene.robot.coverage_radius);
    }
    Ok(raster.area())
}

/// Running totals after each slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulativePoint<S> {
    pub slice: usize,
    pub energy: S,
    pub time: S,
    pub area: S,
}

pub fn cumulative_curves<S: Scalar>(
    plan: &CoveragePlan<S>,
    scene: &Scene<S>,
    cell: S,
) -> Result<Vec<CumulativePoint<S>>> {
    check_cell(scene, cell)?;
    let mut raster = Raster::new(scene, cell);
    let (mut energy, mut time) = (S::zero(), S::zero());
    let mut out = Vec::with_capacity(plan.slices.len());
    for (k, t) in plan.trajectories().enumerate() {
        raster.mark_trajectory(t, scene.robot.coverage_radius);
        energy = energy + t.energy;
        time = time + t.final_time;
        out.push(CumulativePoint { slice: k, energy, time, area: raster.area() });
    }
    Ok(out)
}

/// Coefficient of determination of the least-squares line through
/// `(k, ys[k])`. A constant series counts as a perfect fit.
pub fn linear_fit_r2<S: Scalar>(ys: &[S]) -> S {
    let n = S::from_count(ys.len());
    if ys.len() < 2 {
        return S::one();
    }
    let xs: Vec<S> = (0..ys.len()).map(S::from_count).collect();
    let mx = xs.iter().copied().sum::<S>() / n;
    let my = ys.iter().copied().sum::<S>() / n;
    let sxy: S = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: S = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let syy: S = ys.iter().map(|&y| (y - my) * (y - my)).sum();
    if syy == S::zero() {
        return S::one();
    }
    sxy * sxy / (sxx * syy)
}

/// All metrics of `plan`; `reference` is the matching obstacle-free plan.
pub fn plan_metrics<S: Scalar>(
    plan: &CoveragePlan<S>,
    scene: &Scene<S>,
    reference: Option<&CoveragePlan<S>>,
) -> Result<PlanMetrics<S>> {
    Ok(PlanMetrics {
        total_energy: total_energy(plan),
        total_time: total_time(plan),
        total_path_length: total_path_length(plan),
        covered_area: covered_area(plan, scene, default_cell(scene))?,
        coverage_ratio: match reference {
            Some(r) => coverage_ratio(plan, r)?,
            None => S::one(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collocation::LglGrid;
    use crate::geometry::{CircleObstacle, Polygon, SweepDirection};
    use crate::oracle::analytic_rest_to_rest;
    use crate::planner::{PlannedSlice, RobotSpec, SliceFlag, SolveSummary};
    use crate::transcription::{Layout, SliceProblem};

    /// Samples the closed-form straight slice from `(0, y)` to `(length, y)`
    /// onto the LGL nodes.
    fn analytic_slice(length: f64, y: f64, weight: f64, order: usize) -> Trajectory<f64> {
        let a = analytic_rest_to_rest(length, weight).unwrap();
        let grid: LglGrid<f64> = lgl_grid(order).unwrap();
        let layout = Layout::new(grid.len());
        let mut z = vec![0.0; layout.dim()];
        for (j, &tau) in grid.nodes().iter().enumerate() {
            let t = a.final_time * (tau + 1.0) / 2.0;
            z[layout.state(0, j)] = a.position(t);
            z[layout.state(1, j)] = y;
            z[layout.state(2, j)] = a.velocity(t);
            z[layout.control(0, j)] = a.control(t);
        }
        z[layout.final_time()] = a.final_time;
        Trajectory::unpack(&grid, layout, &z, weight)
    }

    fn plan_of(trajectories: Vec<Trajectory<f64>>) -> CoveragePlan<f64> {
        let mut plan = CoveragePlan::empty(SweepDirection::new(0.0), 10.0);
        for (k, t) in trajectories.into_iter().enumerate() {
            plan.slices.push(PlannedSlice {
                index: k,
                flag: SliceFlag::Nominal,
                problem: SliceProblem {
                    start: t.states[0],
                    end: *t.states.last().unwrap(),
                    corridor: (0.0, 1.0),
                    x_range: (0.0, 10.0),
                    obstacles: vec![],
                    weight: t.weight,
                },
                active_obstacles: vec![],
                trajectory: t,
                solve: SolveSummary {
                    status: None,
                    outer_iterations: 0,
                    inner_iterations: 0,
                    kkt_residual: 0.0,
                    constraint_violation: 0.0,
                    restarts: 0,
                },
            });
        }
        plan.n_turn = plan.slices.len();
        plan
    }

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

    #[test]
    fn straight_slice_length() {
        let t = analytic_slice(10.0, 0.1, 0.5, 20);
        assert!((path_length(&t) - 10.0).abs() < 1e-3);
    }

    #[test]
    fn zero_motion_has_zero_length_and_energy() {
        let mut t = analytic_slice(10.0, 0.1, 0.5, 8);
        for s in &mut t.states {
            s[2] = 0.0;
            s[3] = 0.0;
        }
        assert_eq!(path_length(&t), 0.0);
        let mut rest = t.clone();
        rest.energy = 0.0;
        assert_eq!(total_energy(&plan_of(vec![rest])), 0.0);
    }

    #[test]
    fn energy_of_fifty_oracle_slices() {
        let slices: Vec<_> = (0..50).map(|k| analytic_slice(10.0, 0.1 + 0.2 * k as f64, 0.5, 20)).collect();
        let e = total_energy(&plan_of(slices));
        assert!((e - 50.0 * 2.5819888974716108).abs() < 1e-6 * e);
    }

    #[test]
    fn doubled_controls_quadruple_energy() {
        let grid: LglGrid<f64> = lgl_grid(12).unwrap();
        let t = analytic_slice(10.0, 0.1, 0.5, 12);
        let mut z = t.pack();
        let layout = Layout::new(grid.len());
        for j in 0..grid.len() {
            z[layout.control(0, j)] *= 2.0;
        }
        let doubled = Trajectory::unpack(&grid, layout, &z, 0.5);
        assert!((doubled.energy - 4.0 * t.energy).abs() < 1e-12 * doubled.energy);
    }

    #[test]
    fn single_slice_area_and_grid_convergence() {
        let scene = square(vec![]);
        let plan = plan_of(vec![analytic_slice(10.0, 5.0, 0.5, 20)]);
        let expected = 10.0 * 0.2 + std::f64::consts::PI * 0.01 / 2.0;
        let a = covered_area(&plan, &scene, 0.02).unwrap();
        // End caps are clipped by the workspace boundary at x = 0 and 10.
        assert!((a - expected).abs() <= 0.02 * expected, "{a}");
        let fine = covered_area(&plan, &scene, 0.01).unwrap();
        assert!((a - fine).abs() < 0.01 * fine);
    }

    #[test]
    fn interior_slice_area_includes_both_end_caps() {
        let scene = square(vec![]);
        let mut t = analytic_slice(8.0, 5.0, 0.5, 20);
        for s in &mut t.states {
            s[0] += 1.0;
        }
        let a = covered_area(&plan_of(vec![t]), &scene, 0.02).unwrap();
        let expected = 8.0 * 0.2 + std::f64::consts::PI * 0.01;
        assert!((a - expected).abs() <= 0.02 * expected, "{a}");
    }

    #[test]
    fn empty_plan_and_coarse_cells() {
        let scene = square(vec![]);
        let empty = plan_of(vec![]);
        assert_eq!(covered_area(&empty, &scene, 0.02).unwrap(), 0.0);
        assert!(matches!(covered_area(&empty, &scene, 0.06), Err(Error::ResolutionTooCoarse { .. })));
        assert!(matches!(coverage_ratio(&empty, &empty), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn tiled_bands_cover_the_square() {
        let scene = square(vec![]);
        let slices: Vec<_> = (0..50).map(|k| analytic_slice(10.0, 0.1 + 0.2 * k as f64, 0.5, 20)).collect();
        let plan = plan_of(slices);
        let a = covered_area(&plan, &scene, default_cell(&scene)).unwrap();
        assert!((0.99 * 100.0..=100.0 + 1e-9).contains(&a), "{a}");
        let curves = cumulative_curves(&plan, &scene, 0.02).unwrap();
        for ys in [
            curves.iter().map(|c| c.energy).collect::<Vec<_>>(),
            curves.iter().map(|c| c.time).collect(),
            curves.iter().map(|c| c.area).collect(),
        ] {
            assert!(linear_fit_r2(&ys) >= 0.999);
        }
        assert_eq!(total_energy(&plan), curves.last().unwrap().energy);
    }

    #[test]
    fn obstacles_only_remove_area() {
        let slices: Vec<_> = (0..50).map(|k| analytic_slice(10.0, 0.1 + 0.2 * k as f64, 0.5, 20)).collect();
        let plan = plan_of(slices);
        let obstacles = [CircleObstacle::new(Point2::new(3.0, 3.0), 0.5).unwrap(),
            CircleObstacle::new(Point2::new(7.0, 6.0), 0.8).unwrap(),
            CircleObstacle::new(Point2::new(2.0, 8.0), 0.3).unwrap()];
        let mut prev = f64::INFINITY;
        for n in 0..=obstacles.len() {
            let a = covered_area(&plan, &square(obstacles[..n].to_vec()), 0.02).unwrap();
            assert!(a <= prev);
            prev = a;
        }
    }

    #[test]
    fn identical_plans_have_unit_ratio() {
        let plan = plan_of(vec![analytic_slice(10.0, 0.1, 0.5, 20)]);
        assert_eq!(coverage_ratio(&plan, &plan).unwrap(), 1.0);
    }

    #[test]
    fn linear_fit_of_a_parabola_is_imperfect() {
        let ys: Vec<f64> = (0..20).map(|k| (k * k) as f64).collect();
        assert!(linear_fit_r2(&ys) < 0.95);
        let line: Vec<f64> = (0..20).map(|k| 3.0 * k as f64 + 1.0).collect();
        assert!((linear_fit_r2(&line) - 1.0).abs() < 1e-12);
    }
}
