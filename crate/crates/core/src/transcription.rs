//! Direct LGL transcription of one slice's optimal control problem.
//!
//! The slice is a planar double integrator, state `(x1, x2, x3, x4)` =
//! position and velocity, control `(u1, u2)` = acceleration, with running
//! cost `(1 − w)(u1² + u2²) + w` and free final time. On an order-`N` grid
//! the decision vector is
//!
//! ```text
//! [x1_0..N, x2_0..N, x3_0..N, x4_0..N, u1_0..N, u2_0..N, t_f]
//! ```
//!
//! and the dynamics become the defects `D x − (t_f/2) ẋ = 0` at every node.

use serde::{Deserialize, Serialize};

use crate::collocation::{quadrature, uniform_taus, LglGrid, TimeMap};
use crate::error::{Error, Result};
use crate::geometry::{CircleObstacle, Point2, SweepDirection};
use crate::linalg::DenseMatrix;
use crate::nlp_solver::{constraint_violation, Nlp};
use crate::oracle::optimal_final_time;
use crate::scalar::Scalar;

/// Lower bound on the final time; keeps the time map away from `t_f = 0`.
pub const MIN_FINAL_TIME: f64 = 1e-3;
/// Weights are clamped into this range before solving.
pub const WEIGHT_RANGE: (f64, f64) = (0.01, 0.99);
/// Constraint violation tolerated by [`SliceNlp::extract`].
pub const EXTRACT_TOL: f64 = 1e-6;

/// Boundary-value problem for one slice, in the slice's sweep frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceProblem<S> {
    pub start: [S; 4],
    pub end: [S; 4],
    /// Lateral bounds `(lo, hi)` on `x2`.
    pub corridor: (S, S),
    /// Longitudinal bounds `(lo, hi)` on `x1`.
    pub x_range: (S, S),
    pub obstacles: Vec<CircleObstacle<S>>,
    pub weight: S,
}

impl<S: Scalar> SliceProblem<S> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScene(m));
        if !(self.corridor.0 < self.corridor.1) {
            return bad("corridor lower bound must be below upper bound".into());
        }
        if !(self.x_range.0 < self.x_range.1) {
            return bad("x-range lower bound must be below upper bound".into());
        }
        if !(self.weight >= S::zero() && self.weight <= S::one()) {
            return bad(format!("weight {} outside [0, 1]", self.weight));
        }
        let tol = S::lit(1e-9);
        for (name, s) in [("start", &self.start), ("end", &self.end)] {
            if s.iter().any(|v| !v.is_finite()) {
                return bad(format!("{name} state is not finite"));
            }
            let inside = s[0] >= self.x_range.0 - tol
                && s[0] <= self.x_range.1 + tol
                && s[1] >= self.corridor.0 - tol
                && s[1] <= self.corridor.1 + tol;
            if !inside {
                return bad(format!("{name} position lies outside the slice bounds"));
            }
            let p = Point2::new(s[0], s[1]);
            if let Some(i) = self.obstacles.iter().position(|o| o.contains(p)) {
                return bad(format!("{name} position lies inside obstacle {i}"));
            }
        }
        Ok(())
    }

    /// Straight-line distance between the boundary positions.
    pub fn chord_length(&self) -> S {
        Point2::new(self.start[0], self.start[1]).distance(Point2::new(self.end[0], self.end[1]))
    }

    /// Weight actually used in the cost, clamped into [`WEIGHT_RANGE`].
    pub fn effective_weight(&self) -> S {
        self.weight.max(S::lit(WEIGHT_RANGE.0)).min(S::lit(WEIGHT_RANGE.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TranscriptionOptions {
    /// Extra obstacle-clearance constraints per obstacle, imposed on the
    /// interpolated path at this many uniformly spaced instants. Zero keeps
    /// the node constraints only.
    pub clearance_samples: usize,
}

/// Index arithmetic for the decision vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    nodes: usize,
}

impl Layout {
    pub fn new(nodes: usize) -> Self {
        Self { nodes }
    }

    #[inline]
    pub fn nodes(self) -> usize {
        self.nodes
    }

    /// Index of state `k ∈ 0..4` at node `j`.
    #[inline]
    pub fn state(self, k: usize, j: usize) -> usize {
        k * self.nodes + j
    }

    /// Index of control `k ∈ 0..2` at node `j`.
    #[inline]
    pub fn control(self, k: usize, j: usize) -> usize {
        (4 + k) * self.nodes + j
    }

    #[inline]
    pub fn final_time(self) -> usize {
        6 * self.nodes
    }

    #[inline]
    pub fn dim(self) -> usize {
        6 * self.nodes + 1
    }
}

/// The transcribed nonlinear program for one slice.
#[derive(Debug, Clone)]
pub struct SliceNlp<S> {
    problem: SliceProblem<S>,
    grid: LglGrid<S>,
    layout: Layout,
    weight: S,
    options: TranscriptionOptions,
    clearance_basis: DenseMatrix<S>,
    fixed_final_time: Option<S>,
}

/// Transcribes with node-only obstacle constraints.
pub fn transcribe<S: Scalar>(problem: &SliceProblem<S>, grid: &LglGrid<S>) -> SliceNlp<S> {
    transcribe_with(problem, grid, TranscriptionOptions::default())
}

pub fn transcribe_with<S: Scalar>(
    problem: &SliceProblem<S>,
    grid: &LglGrid<S>,
    options: TranscriptionOptions,
) -> SliceNlp<S> {
    let taus: Vec<S> = uniform_taus(options.clearance_samples);
    SliceNlp {
        problem: problem.clone(),
        grid: grid.clone(),
        layout: Layout::new(grid.len()),
        weight: problem.effective_weight(),
        options,
        clearance_basis: grid.interpolation_matrix(&taus),
        fixed_final_time: None,
    }
}

impl<S: Scalar> SliceNlp<S> {
    pub fn problem(&self) -> &SliceProblem<S> {
        &self.problem
    }

    pub fn grid(&self) -> &LglGrid<S> {
        &self.grid
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn options(&self) -> TranscriptionOptions {
        self.options
    }

    pub fn weight(&self) -> S {
        self.weight
    }

    /// Same program with `t_f` pinned to `final_time` through its bounds.
    pub fn with_fixed_final_time(&self, final_time: S) -> Self {
        Self { fixed_final_time: Some(final_time), ..self.clone() }
    }

    pub fn num_defects(&self) -> usize {
        4 * self.layout.nodes()
    }

    pub fn num_boundary_pins(&self) -> usize {
        8
    }

    /// Node constraints, one per obstacle per node.
    pub fn num_obstacle_constraints(&self) -> usize {
        self.problem.obstacles.len() * self.layout.nodes()
    }

    pub fn num_clearance_constraints(&self) -> usize {
        self.problem.obstacles.len() * self.clearance_basis.rows()
    }

    /// Simple bounds: both corridor sides and both x-range sides per node,
    /// plus `t_f ≥ t_min`.
    pub fn num_bound_constraints(&self) -> usize {
        4 * self.layout.nodes() + 1
    }

    fn rate_index(&self, k: usize, i: usize) -> usize {
        // ẋ1 = x3, ẋ2 = x4, ẋ3 = u1, ẋ4 = u2
        match k {
            0 => self.layout.state(2, i),
            1 => self.layout.state(3, i),
            _ => self.layout.control(k - 2, i),
        }
    }

    /// Interpolated positions at the clearance instants.
    fn clearance_positions(&self, z: &[S]) -> Vec<(S, S)> {
        let n = self.layout.nodes();
        let x1 = &z[self.layout.state(0, 0)..self.layout.state(0, 0) + n];
        let x2 = &z[self.layout.state(1, 0)..self.layout.state(1, 0) + n];
        (0..self.clearance_basis.rows())
            .map(|s| {
                let row = self.clearance_basis.row(s);
                (crate::linalg::dot(row, x1), crate::linalg::dot(row, x2))
            })
            .collect()
    }

    /// Unpacks a decision vector, rejecting it if any constraint is violated
    /// by more than [`EXTRACT_TOL`].
    pub fn extract(&self, z: &[S]) -> Result<Trajectory<S>> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: z.len() });
        }
        let violation = constraint_violation(self, z);
        if !(violation <= S::lit(EXTRACT_TOL)) {
            return Err(Error::InfeasibleSolution {
                violation: violation.to_f64_lossy(),
                tolerance: EXTRACT_TOL,
            });
        }
        Ok(Trajectory::unpack(&self.grid, self.layout, z, self.weight))
    }
}

/// Transcribes with default options and unpacks `solution`.
pub fn extract_trajectory<S: Scalar>(
    problem: &SliceProblem<S>,
    grid: &LglGrid<S>,
    solution: &[S],
) -> Result<Trajectory<S>> {
    transcribe(problem, grid).extract(solution)
}

impl<S: Scalar> Nlp<S> for SliceNlp<S> {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn num_eq(&self) -> usize {
        self.num_defects() + self.num_boundary_pins()
    }

    fn num_ineq(&self) -> usize {
        self.num_obstacle_constraints() + self.num_clearance_constraints()
    }

    fn lower_bounds(&self) -> Vec<S> {
        let l = self.layout;
        let mut lo = vec![S::neg_infinity(); l.dim()];
        for j in 0..l.nodes() {
            lo[l.state(0, j)] = self.problem.x_range.0;
            lo[l.state(1, j)] = self.problem.corridor.0;
        }
        lo[l.final_time()] = self.fixed_final_time.unwrap_or(S::lit(MIN_FINAL_TIME));
        lo
    }

    fn upper_bounds(&self) -> Vec<S> {
        let l = self.layout;
        let mut hi = vec![S::infinity(); l.dim()];
        for j in 0..l.nodes() {
            hi[l.state(0, j)] = self.problem.x_range.1;
            hi[l.state(1, j)] = self.problem.corridor.1;
        }
        hi[l.final_time()] = self.fixed_final_time.unwrap_or(S::infinity());
        hi
    }

    fn objective(&self, z: &[S]) -> S {
        let l = self.layout;
        let w = self.weight;
        let running: S = (0..l.nodes())
            .map(|j| {
                let u1 = z[l.control(0, j)];
                let u2 = z[l.control(1, j)];
                self.grid.weights()[j] * ((S::one() - w) * (u1 * u1 + u2 * u2) + w)
            })
            .sum();
        z[l.final_time()] / S::lit(2.0) * running
    }

    fn objective_gradient(&self, z: &[S]) -> Vec<S> {
        let l = self.layout;
        let w = self.weight;
        let tf = z[l.final_time()];
        let mut g = vec![S::zero(); l.dim()];
        let mut running = S::zero();
        for j in 0..l.nodes() {
            let wj = self.grid.weights()[j];
            let u1 = z[l.control(0, j)];
            let u2 = z[l.control(1, j)];
            g[l.control(0, j)] = tf * wj * (S::one() - w) * u1;
            g[l.control(1, j)] = tf * wj * (S::one() - w) * u2;
            running = running + wj * ((S::one() - w) * (u1 * u1 + u2 * u2) + w);
        }
        g[l.final_time()] = running / S::lit(2.0);
        g
    }

    fn eq_constraints(&self, z: &[S]) -> Vec<S> {
        let l = self.layout;
        let n = l.nodes();
        let half_tf = z[l.final_time()] / S::lit(2.0);
        let d = self.grid.diff_matrix();
        let mut c = Vec::with_capacity(self.num_eq());
        for k in 0..4 {
            let block = &z[l.state(k, 0)..l.state(k, 0) + n];
            for i in 0..n {
                c.push(crate::linalg::dot(d.row(i), block) - half_tf * z[self.rate_index(k, i)]);
            }
        }
        for k in 0..4 {
            c.push(z[l.state(k, 0)] - self.problem.start[k]);
        }
        for k in 0..4 {
            c.push(z[l.state(k, n - 1)] - self.problem.end[k]);
        }
        c
    }

    fn eq_jacobian(&self, z: &[S]) -> DenseMatrix<S> {
        let l = self.layout;
        let n = l.nodes();
        let tf = z[l.final_time()];
        let half = S::lit(0.5);
        let d = self.grid.diff_matrix();
        let mut jac = DenseMatrix::zeros(self.num_eq(), l.dim());
        for k in 0..4 {
            for i in 0..n {
                let r = k * n + i;
                let row = jac.row_mut(r);
                row[l.state(k, 0)..l.state(k, 0) + n].copy_from_slice(d.row(i));
                let rate = self.rate_index(k, i);
                row[rate] = row[rate] - half * tf;
                row[l.final_time()] = -half * z[rate];
            }
        }
        for k in 0..4 {
            jac[(4 * n + k, l.state(k, 0))] = S::one();
            jac[(4 * n + 4 + k, l.state(k, n - 1))] = S::one();
        }
        jac
    }

    fn ineq_constraints(&self, z: &[S]) -> Vec<S> {
        let l = self.layout;
        let mut g = Vec::with_capacity(self.num_ineq());
        // Each row is divided by r², so penetration weighs the same for
        // small and large discs.
        for o in &self.problem.obstacles {
            let r2 = o.radius * o.radius;
            for j in 0..l.nodes() {
                let dx = z[l.state(0, j)] - o.center.x;
                let dy = z[l.state(1, j)] - o.center.y;
                g.push((dx * dx + dy * dy) / r2 - S::one());
            }
        }
        if self.clearance_basis.rows() > 0 {
            let pts = self.clearance_positions(z);
            for o in &self.problem.obstacles {
                let r2 = o.radius * o.radius;
                for &(x, y) in &pts {
                    let dx = x - o.center.x;
                    let dy = y - o.center.y;
                    g.push((dx * dx + dy * dy) / r2 - S::one());
                }
            }
        }
        g
    }

    fn ineq_jacobian(&self, z: &[S]) -> DenseMatrix<S> {
        let l = self.layout;
        let n = l.nodes();
        let two = S::lit(2.0);
        let mut jac = DenseMatrix::zeros(self.num_ineq(), l.dim());
        let mut r = 0;
        for o in &self.problem.obstacles {
            let k = two / (o.radius * o.radius);
            for j in 0..n {
                jac[(r, l.state(0, j))] = k * (z[l.state(0, j)] - o.center.x);
                jac[(r, l.state(1, j))] = k * (z[l.state(1, j)] - o.center.y);
                r += 1;
            }
        }
        if self.clearance_basis.rows() > 0 {
            let pts = self.clearance_positions(z);
            for o in &self.problem.obstacles {
                let k = two / (o.radius * o.radius);
                for (s, &(x, y)) in pts.iter().enumerate() {
                    let basis = self.clearance_basis.row(s);
                    let gx = k * (x - o.center.x);
                    let gy = k * (y - o.center.y);
                    let row = jac.row_mut(r);
                    for j in 0..n {
                        row[l.state(0, j)] = gx * basis[j];
                        row[l.state(1, j)] = gy * basis[j];
                    }
                    r += 1;
                }
            }
        }
        jac
    }
}

/// Straight-line warm start: positions linear in node time, the matching
/// constant velocity, zero control, and the obstacle-free optimal `t_f`.
pub fn initial_guess<S: Scalar>(problem: &SliceProblem<S>, grid: &LglGrid<S>) -> Vec<S> {
    let layout = Layout::new(grid.len());
    let length = problem.chord_length();
    let tf = optimal_final_time(length, problem.effective_weight()).max(S::lit(MIN_FINAL_TIME));
    let mut z = vec![S::zero(); layout.dim()];
    let dx = problem.end[0] - problem.start[0];
    let dy = problem.end[1] - problem.start[1];
    for (j, &tau) in grid.nodes().iter().enumerate() {
        let s = (tau + S::one()) / S::lit(2.0);
        z[layout.state(0, j)] = problem.start[0] + s * dx;
        z[layout.state(1, j)] = problem.start[1] + s * dy;
        z[layout.state(2, j)] = dx / tf;
        z[layout.state(3, j)] = dy / tf;
    }
    if length == S::zero() {
        for j in 0..grid.len() {
            z[layout.state(2, j)] = S::zero();
            z[layout.state(3, j)] = S::zero();
        }
    }
    z[layout.final_time()] = tf;
    z
}

/// Solved slice trajectory sampled at the LGL nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    /// Grid order `N`.
    pub order: usize,
    pub final_time: S,
    pub times: Vec<S>,
    /// `(x1, x2, x3, x4)` per node.
    pub states: Vec<[S; 4]>,
    /// `(u1, u2)` per node.
    pub controls: Vec<[S; 2]>,
    /// `∫ (u1² + u2²) dt`
    pub energy: S,
    pub weight: S,
    /// `(1 − w) · energy + w · t_f`
    pub cost: S,
}

impl<S: Scalar> Trajectory<S> {
    pub(crate) fn unpack(grid: &LglGrid<S>, layout: Layout, z: &[S], weight: S) -> Self {
        let n = layout.nodes();
        let tf = z[layout.final_time()];
        let map = TimeMap::new(tf);
        let times = grid.nodes().iter().map(|&tau| map.time(tau)).collect();
        let states = (0..n).map(|j| std::array::from_fn(|k| z[layout.state(k, j)])).collect();
        let controls: Vec<[S; 2]> = (0..n).map(|j| std::array::from_fn(|k| z[layout.control(k, j)])).collect();
        let effort: Vec<S> = controls.iter().map(|u| u[0] * u[0] + u[1] * u[1]).collect();
        let energy = quadrature(grid, &effort, tf);
        Self {
            order: grid.order(),
            final_time: tf,
            times,
            states,
            controls,
            energy,
            weight,
            cost: (S::one() - weight) * energy + weight * tf,
        }
    }

    /// Re-packs into the decision-vector layout.
    pub fn pack(&self) -> Vec<S> {
        let layout = Layout::new(self.states.len());
        let mut z = vec![S::zero(); layout.dim()];
        for (j, (x, u)) in self.states.iter().zip(&self.controls).enumerate() {
            for k in 0..4 {
                z[layout.state(k, j)] = x[k];
            }
            for k in 0..2 {
                z[layout.control(k, j)] = u[k];
            }
        }
        z[layout.final_time()] = self.final_time;
        z
    }

    pub fn start_position(&self) -> Point2<S> {
        let s = self.states[0];
        Point2::new(s[0], s[1])
    }

    pub fn end_position(&self) -> Point2<S> {
        let s = self.states[self.states.len() - 1];
        Point2::new(s[0], s[1])
    }

    /// Maps positions, velocities and controls from the sweep frame of
    /// `sweep` into global coordinates.
    pub fn to_global(&self, sweep: SweepDirection<S>) -> Self {
        let rot = |a: S, b: S| {
            let p = sweep.from_frame(a, b);
            (p.x, p.y)
        };
        let states = self
            .states
            .iter()
            .map(|s| {
                let (x, y) = rot(s[0], s[1]);
                let (vx, vy) = rot(s[2], s[3]);
                [x, y, vx, vy]
            })
            .collect();
        let controls = self
            .controls
            .iter()
            .map(|u| {
                let (a, b) = rot(u[0], u[1]);
                [a, b]
            })
            .collect();
        Self { states, controls, ..self.clone() }
    }

    /// Inverse of [`Trajectory::to_global`].
    pub fn to_local(&self, sweep: SweepDirection<S>) -> Self {
        let rot = |a: S, b: S| sweep.to_frame(Point2::new(a, b));
        let states = self
            .states
            .iter()
            .map(|s| {
                let (x, y) = rot(s[0], s[1]);
                let (vx, vy) = rot(s[2], s[3]);
                [x, y, vx, vy]
            })
            .collect();
        let controls = self
            .controls
            .iter()
            .map(|u| {
                let (a, b) = rot(u[0], u[1]);
                [a, b]
            })
            .collect();
        Self { states, controls, ..self.clone() }
    }

    /// Interpolated state at each `tau`, using the Lagrange basis of `grid`.
    pub fn dense_states(&self, grid: &LglGrid<S>, taus: &[S]) -> Vec<[S; 4]> {
        assert_eq!(grid.len(), self.states.len(), "grid does not match trajectory");
        let basis = grid.interpolation_matrix(taus);
        let columns: [Vec<S>; 4] = std::array::from_fn(|k| self.states.iter().map(|s| s[k]).collect());
        (0..taus.len())
            .map(|i| std::array::from_fn(|k| crate::linalg::dot(basis.row(i), &columns[k])))
            .collect()
    }

    /// Interpolated positions at `count` uniformly spaced instants.
    pub fn dense_positions(&self, grid: &LglGrid<S>, count: usize) -> Vec<Point2<S>> {
        self.dense_states(grid, &uniform_taus(count))
            .into_iter()
            .map(|s| Point2::new(s[0], s[1]))
            .collect()
    }
}
