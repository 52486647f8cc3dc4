//! Boustrophedon coverage planning: pick the sweep direction, lay out
//! parallel slices across the workspace, and solve one rest-to-rest optimal
//! control problem per slice.
//!
//! Each slice is solved in the sweep frame (travel along local `x`, advance
//! along local `y`) and rotated back into global coordinates afterwards.

use serde::{Deserialize, Serialize};

use crate::collocation::{lgl_grid, LglGrid};
use crate::error::{Error, Result};
use crate::geometry::{
    diameter, obstacle_indices_in_corridor, optimal_sweep_direction, CircleObstacle, Point2, Polygon,
    SweepDirection, GEOMETRY_TOL,
};
use crate::nlp_solver::{solve, SolveReport, SolveStatus, SolverOptions};
use crate::scalar::Scalar;
use crate::transcription::{
    initial_guess, transcribe_with, Layout, SliceNlp, SliceProblem, Trajectory, TranscriptionOptions,
    MIN_FINAL_TIME,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec<S> {
    pub coverage_radius: S,
}

/// Validated planning input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene<S> {
    pub workspace: Polygon<S>,
    pub obstacles: Vec<CircleObstacle<S>>,
    pub robot: RobotSpec<S>,
    pub weight: S,
    pub nodes_per_slice: usize,
}

impl<S: Scalar> Scene<S> {
    pub fn new(
        workspace: Polygon<S>,
        obstacles: Vec<CircleObstacle<S>>,
        robot: RobotSpec<S>,
        weight: S,
        nodes_per_slice: usize,
    ) -> Result<Self> {
        let scene = Self { workspace, obstacles, robot, weight, nodes_per_slice };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScene(m));
        if !(self.weight >= S::zero() && self.weight <= S::one()) {
            return bad(format!("weight out of range: {} not in [0, 1]", self.weight));
        }
        if self.nodes_per_slice < 4 {
            return bad(format!("nodes_per_slice must be at least 4, got {}", self.nodes_per_slice));
        }
        let r = self.robot.coverage_radius;
        if !(r > S::zero() && r.is_finite()) {
            return bad(format!("robot radius must be positive, got {r}"));
        }
        let tol = S::lit(GEOMETRY_TOL);
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.radius > S::zero()) || !o.center.is_finite() || !o.radius.is_finite() {
                return bad(format!("obstacle {i} is malformed"));
            }
            if self.workspace.inset_distance(o.center) < o.radius - tol {
                return bad(format!("obstacle {i} is not inside the workspace"));
            }
        }
        for i in 0..self.obstacles.len() {
            for j in i + 1..self.obstacles.len() {
                let (a, b) = (self.obstacles[i], self.obstacles[j]);
                if a.center.distance(b.center) < a.radius + b.radius - tol {
                    return bad(format!("obstacle {i} intersects obstacle {j}"));
                }
            }
        }
        let (sweep, _) = self.sweep();
        let width = diameter(&self.workspace, sweep);
        if !(r + r < width) {
            return bad(format!("coverage diameter {} is not below the workspace width {width}", r + r));
        }
        Ok(())
    }

    /// Minimum-sum-of-altitudes direction and its cost.
    pub fn sweep(&self) -> (SweepDirection<S>, S) {
        optimal_sweep_direction(&self.workspace, &self.obstacles)
    }

    /// Number of slices, `ceil(diameter / 2r)`.
    pub fn slice_count(&self) -> usize {
        let (sweep, _) = self.sweep();
        let width = diameter(&self.workspace, sweep);
        let r = self.robot.coverage_radius;
        (width / (r + r) - S::lit(GEOMETRY_TOL)).ceil().to_usize().unwrap_or(0).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceFlag {
    Nominal,
    CorridorExpanded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub solver: SolverOptions,
    /// Clearance samples per grid order, per active obstacle.
    pub clearance_per_node: usize,
    /// Perturbed restarts tried when a slice solve reports infeasible.
    pub restarts: usize,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), clearance_per_node: 10, restarts: 3 }
    }
}

/// How the slice NLP ended. `status` is `None` for slices that needed no solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub status: Option<SolveStatus>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub kkt_residual: f64,
    pub constraint_violation: f64,
    pub restarts: usize,
}

/// Slice problem in the sweep frame plus its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSetup<S> {
    pub index: usize,
    pub problem: SliceProblem<S>,
    pub flag: SliceFlag,
    /// Scene indices of the obstacles in `problem.obstacles`.
    pub active_obstacles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedSlice<S> {
    pub index: usize,
    pub flag: SliceFlag,
    /// Sweep-frame problem that was solved.
    pub problem: SliceProblem<S>,
    pub active_obstacles: Vec<usize>,
    /// Solution in global coordinates.
    pub trajectory: Trajectory<S>,
    pub solve: SolveSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveragePlan<S> {
    pub sweep: SweepDirection<S>,
    pub msa_cost: S,
    pub n_turn: usize,
    pub slices: Vec<PlannedSlice<S>>,
    pub total_energy: S,
    pub total_time: S,
    pub total_cost: S,
}

impl<S: Scalar> CoveragePlan<S> {
    pub fn trajectories(&self) -> impl Iterator<Item = &Trajectory<S>> + '_ {
        self.slices.iter().map(|s| &s.trajectory)
    }

    pub fn flags(&self) -> Vec<SliceFlag> {
        self.slices.iter().map(|s| s.flag).collect()
    }

    /// Plan with no slices, used for rendering bare scenes.
    pub fn empty(sweep: SweepDirection<S>, msa_cost: S) -> Self {
        Self {
            sweep,
            msa_cost,
            n_turn: 0,
            slices: Vec::new(),
            total_energy: S::zero(),
            total_time: S::zero(),
            total_cost: S::zero(),
        }
    }
}

fn local_obstacles<S: Scalar>(scene: &Scene<S>, sweep: SweepDirection<S>) -> Vec<CircleObstacle<S>> {
    scene
        .obstacles
        .iter()
        .map(|o| {
            let (u, v) = sweep.to_frame(o.center);
            CircleObstacle { center: Point2::new(u, v), radius: o.radius }
        })
        .collect()
}

/// Builds slice `k` in the sweep frame. `prev_final` is the sweep-frame final
/// state of slice `k − 1` and is ignored for `k = 0`.
pub fn next_slice_problem<S: Scalar>(
    scene: &Scene<S>,
    sweep: SweepDirection<S>,
    k: usize,
    prev_final: [S; 4],
) -> Result<SliceSetup<S>> {
    let r = scene.robot.coverage_radius;
    let two_r = r + r;
    let tol = S::lit(GEOMETRY_TOL);
    let (v_min, v_max) = scene.workspace.normal_extent(sweep);
    let infeasible = |reason: String| Error::SliceInfeasible { slice: k, reason };

    let nominal = if k == 0 {
        v_min + r
    } else {
        prev_final[1] + two_r
    };
    let nominal = nominal.min(v_max);
    let (u_lo, u_hi) = scene
        .workspace
        .chord(sweep, nominal)
        .ok_or_else(|| infeasible(format!("sweep line {nominal} misses the workspace")))?;

    let (start_u, end_u) = if k == 0 || (prev_final[0] - u_lo).abs() <= (prev_final[0] - u_hi).abs() {
        (u_lo, u_hi)
    } else {
        (u_hi, u_lo)
    };
    let start = [start_u, nominal, S::zero(), S::zero()];
    let end = [end_u, nominal, S::zero(), S::zero()];

    let local = local_obstacles(scene, sweep);
    for p in [start, end] {
        let point = Point2::new(p[0], p[1]);
        if let Some(i) = local.iter().position(|o| o.contains(point)) {
            return Err(Error::BlockedEndpoint { slice: k, obstacle: i });
        }
    }

    let mut hi = (nominal + two_r).min(v_max);
    if hi - nominal < S::lit(1e-3) * r {
        hi = nominal + two_r;
    }
    let mut flag = SliceFlag::Nominal;
    let active = loop {
        let active = obstacle_indices_in_corridor(&scene.obstacles, (nominal, hi), sweep);
        let spanning = active
            .iter()
            .map(|&i| local[i])
            .filter(|o| o.center.y - o.radius <= nominal + tol && o.center.y + o.radius >= hi - tol)
            .map(|o| o.center.y + o.radius + r / S::lit(10.0))
            .fold(S::neg_infinity(), S::max);
        if spanning <= hi {
            break active;
        }
        hi = spanning;
        flag = SliceFlag::CorridorExpanded;
        if hi > v_max + tol {
            return Err(infeasible(format!(
                "corridor expansion to {hi} leaves the workspace (upper extent {v_max})"
            )));
        }
    };

    let x_range = if u_hi > u_lo { (u_lo, u_hi) } else { (u_lo, u_lo + tol) };
    let problem = SliceProblem {
        start,
        end,
        corridor: (nominal, hi),
        x_range,
        obstacles: active.iter().map(|&i| local[i]).collect(),
        weight: scene.weight,
    };
    Ok(SliceSetup { index: k, problem, flag, active_obstacles: active })
}

fn transcription_options(setup: &SliceSetup<impl Scalar>, order: usize, opts: &PlannerOptions) -> TranscriptionOptions {
    let clearance_samples = if setup.problem.obstacles.is_empty() { 0 } else { opts.clearance_per_node * order };
    TranscriptionOptions { clearance_samples }
}

/// Sweep-frame setups of every slice, without solving. Each slice starts at
/// the pinned end of the previous one.
pub fn slice_setups<S: Scalar>(scene: &Scene<S>) -> Result<Vec<SliceSetup<S>>> {
    scene.validate()?;
    let (sweep, _) = scene.sweep();
    let mut out: Vec<SliceSetup<S>> = Vec::new();
    for k in 0..scene.slice_count() {
        let prev = out.last().map_or([S::zero(); 4], |s| s.problem.end);
        out.push(next_slice_problem(scene, sweep, k, prev)?);
    }
    Ok(out)
}

/// The transcribed NLP the planner solves for slice `k`.
pub fn slice_nlp<S: Scalar>(scene: &Scene<S>, k: usize) -> Result<SliceNlp<S>> {
    slice_nlp_with(scene, k, &PlannerOptions::default())
}

pub fn slice_nlp_with<S: Scalar>(scene: &Scene<S>, k: usize, opts: &PlannerOptions) -> Result<SliceNlp<S>> {
    let setups = slice_setups(scene)?;
    let setup = setups.get(k).ok_or_else(|| {
        Error::DegenerateInput(format!("slice index {k} out of range (plan has {} slices)", setups.len()))
    })?;
    let grid = lgl_grid(scene.nodes_per_slice)?;
    Ok(transcribe_with(&setup.problem, &grid, transcription_options(setup, grid.order(), opts)))
}

/// Straight-line warm start, raised over every obstacle that crosses the
/// nominal line by a raised-cosine bump, then lifted by a further half-sine
/// of height `lift`. The lateral guess stays inside the corridor.
fn warm_start<S: Scalar>(problem: &SliceProblem<S>, grid: &LglGrid<S>, lift: S) -> Vec<S> {
    let mut z = initial_guess(problem, grid);
    let layout = Layout::new(grid.len());
    let nominal = problem.start[1];
    let (lo, hi) = problem.corridor;
    let length = problem.chord_length();
    for (j, &tau) in grid.nodes().iter().enumerate() {
        let x = z[layout.state(0, j)];
        let mut raise = S::zero();
        for o in &problem.obstacles {
            if o.center.y - o.radius > nominal {
                continue;
            }
            let top = o.center.y + o.radius;
            let height = top + S::lit(0.25) * (hi - top).max(S::zero()) - nominal;
            let half_width = o.radius + S::lit(0.2) * length;
            let d = (x - o.center.x).abs() / half_width;
            if d < S::one() {
                let c = (S::PI() * d / S::lit(2.0)).cos();
                raise = raise.max(height * c * c);
            }
        }
        let s = (tau + S::one()) / S::lit(2.0);
        let y = nominal + raise + lift * (S::PI() * s).sin();
        z[layout.state(1, j)] = y.max(lo).min(hi);
    }
    z
}

fn summary<S: Scalar>(report: &SolveReport<S>, restarts: usize) -> SolveSummary {
    SolveSummary {
        status: Some(report.status),
        outer_iterations: report.outer_iterations,
        inner_iterations: report.inner_iterations,
        kkt_residual: report.kkt_residual.to_f64_lossy(),
        constraint_violation: report.constraint_violation.to_f64_lossy(),
        restarts,
    }
}

/// Solves one slice in the sweep frame.
pub fn solve_slice<S: Scalar>(
    setup: &SliceSetup<S>,
    grid: &LglGrid<S>,
    opts: &PlannerOptions,
) -> Result<(Trajectory<S>, SolveSummary)> {
    let problem = &setup.problem;
    let nlp = transcribe_with(problem, grid, transcription_options(setup, grid.order(), opts));
    if problem.chord_length() <= S::lit(GEOMETRY_TOL) {
        let layout = nlp.layout();
        let mut z = vec![S::zero(); layout.dim()];
        for j in 0..layout.nodes() {
            z[layout.state(0, j)] = problem.start[0];
            z[layout.state(1, j)] = problem.start[1];
        }
        z[layout.final_time()] = S::lit(MIN_FINAL_TIME);
        let summary = SolveSummary {
            status: None,
            outer_iterations: 0,
            inner_iterations: 0,
            kkt_residual: 0.0,
            constraint_violation: 0.0,
            restarts: 0,
        };
        return Ok((Trajectory::unpack(grid, layout, &z, nlp.weight()), summary));
    }

    let width = problem.corridor.1 - problem.corridor.0;
    let lifts = [S::zero(), S::lit(0.5) * width, S::lit(0.9) * width, S::lit(0.25) * width];
    let attempts = if problem.obstacles.is_empty() { 1 } else { 1 + opts.restarts.min(3) };
    let mut fallback: Option<(Trajectory<S>, SolveSummary)> = None;
    let mut last_reason = String::new();
    for (attempt, &lift) in lifts.iter().take(attempts).enumerate() {
        let guess = warm_start(problem, grid, lift);
        let report = solve(&nlp, &guess, &opts.solver)?;
        let sum = summary(&report, attempt);
        match (report.status, nlp.extract(&report.solution)) {
            (SolveStatus::Converged, Ok(t)) => return Ok((t, sum)),
            (SolveStatus::MaxIterations, Ok(t)) => {
                if fallback.is_none() {
                    fallback = Some((t, sum));
                }
            }
            (status, res) => {
                last_reason = match res {
                    Err(e) => format!("solver ended {status:?}: {e}"),
                    Ok(_) => format!("solver ended {status:?}"),
                };
            }
        }
        if fallback.is_some() {
            break;
        }
    }
    fallback.ok_or(Error::SliceInfeasible { slice: setup.index, reason: last_reason })
}

/// Solves `setup` and checks the interpolated path against every obstacle of
/// the scene. Obstacles outside the corridor can still be clipped where the
/// interpolant overshoots between nodes; those join the active set and the
/// slice is solved again.
pub fn solve_slice_in_scene<S: Scalar>(
    scene: &Scene<S>,
    sweep: SweepDirection<S>,
    mut setup: SliceSetup<S>,
    grid: &LglGrid<S>,
    opts: &PlannerOptions,
) -> Result<(SliceSetup<S>, Trajectory<S>, SolveSummary)> {
    let local = local_obstacles(scene, sweep);
    let samples = (opts.clearance_per_node * grid.order()).max(2);
    let tol = S::lit(GEOMETRY_TOL);
    loop {
        let (trajectory, summary) = solve_slice(&setup, grid, opts)?;
        let mut path = trajectory.dense_positions(grid, samples);
        path.extend(trajectory.states.iter().map(|s| Point2::new(s[0], s[1])));
        let clipped: Vec<usize> = (0..local.len())
            .filter(|i| !setup.active_obstacles.contains(i))
            .filter(|&i| path.iter().any(|&p| local[i].penetration(p) > tol))
            .collect();
        if clipped.is_empty() {
            return Ok((setup, trajectory, summary));
        }
        setup.active_obstacles.extend(clipped);
        setup.active_obstacles.sort_unstable();
        setup.problem.obstacles = setup.active_obstacles.iter().map(|&i| local[i]).collect();
    }
}

pub fn plan_coverage<S: Scalar>(scene: &Scene<S>) -> Result<CoveragePlan<S>> {
    plan_coverage_with(scene, &PlannerOptions::default())
}

pub fn plan_coverage_with<S: Scalar>(scene: &Scene<S>, opts: &PlannerOptions) -> Result<CoveragePlan<S>> {
    scene.validate()?;
    opts.solver.validate()?;
    let (sweep, msa_cost) = scene.sweep();
    let grid = lgl_grid(scene.nodes_per_slice)?;
    let n_turn = scene.slice_count();
    let mut slices: Vec<PlannedSlice<S>> = Vec::with_capacity(n_turn);
    let mut prev_final = [S::zero(); 4];
    for k in 0..n_turn {
        let setup = next_slice_problem(scene, sweep, k, prev_final)?;
        let (setup, local, solve) = solve_slice_in_scene(scene, sweep, setup, &grid, opts)?;
        prev_final = local.states[local.states.len() - 1];
        slices.push(PlannedSlice {
            index: k,
            flag: setup.flag,
            problem: setup.problem,
            active_obstacles: setup.active_obstacles,
            trajectory: local.to_global(sweep),
            solve,
        });
    }
    let total_energy = slices.iter().map(|s| s.trajectory.energy).sum();
    let total_time = slices.iter().map(|s| s.trajectory.final_time).sum();
    let total_cost = slices.iter().map(|s| s.trajectory.cost).sum();
    Ok(CoveragePlan { sweep, msa_cost, n_turn, slices, total_energy, total_time, total_cost })
}
