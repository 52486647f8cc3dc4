//! Invariant suite run by `sweepopt verify`.

use serde::Serialize;
use sweepopt::geometry::Point2;
use sweepopt::metrics::dense_samples;
use sweepopt::nlp_solver::Nlp;
use sweepopt::oracle::{analytic_rest_to_rest, transversality_check};
use sweepopt::planner::{slice_nlp, CoveragePlan, PlannedSlice, Scene, SliceFlag};

pub const NODE_CLEARANCE_TOL: f64 = 1e-6;
pub const DENSE_CLEARANCE_TOL: f64 = 1e-3;
pub const DEFECT_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-3;
pub const TRANSVERSALITY_TOL: f64 = 1e-4;
pub const TRANSVERSALITY_EPSILON: f64 = 0.05;
/// Obstacle-free slices re-solved by the transversality check.
pub const TRANSVERSALITY_SAMPLES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Worst value over the slices examined.
    pub worst: f64,
    /// Slice attaining `worst`.
    pub worst_slice: Option<usize>,
    pub tolerance: f64,
    pub slices_checked: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, worst: 0.0, worst_slice: None, tolerance, slices_checked: 0, passed: true, detail: None }
    }

    fn record(&mut self, slice: usize, value: f64) {
        self.slices_checked += 1;
        if !(value <= self.worst) {
            self.worst = value;
            self.worst_slice = Some(slice);
        }
    }

    fn fail(&mut self, slice: usize, detail: String) {
        self.worst_slice = Some(slice);
        self.worst = f64::INFINITY;
        self.detail.get_or_insert(detail);
    }

    fn finish(mut self) -> Self {
        self.passed = self.passed && self.worst <= self.tolerance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub slices: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

fn worst_penetration(scene: &Scene<f64>, points: impl Iterator<Item = Point2<f64>>) -> f64 {
    points
        .flat_map(|p| scene.obstacles.iter().map(move |o| o.penetration(p)))
        .fold(0.0, f64::max)
}

fn obstacle_free(slice: &PlannedSlice<f64>) -> bool {
    slice.active_obstacles.is_empty()
        && slice.flag == SliceFlag::Nominal
        && slice.problem.chord_length() > 0.0
}

/// Runs every check on `plan`, which must have been planned for `scene`.
pub fn verify_plan(scene: &Scene<f64>, plan: &CoveragePlan<f64>) -> VerifyReport {
    let mut nodes = Check::new("node_clearance", NODE_CLEARANCE_TOL);
    let mut dense = Check::new("dense_clearance", DENSE_CLEARANCE_TOL);
    let mut defects = Check::new("defect_residual", DEFECT_TOL);
    let mut oracle = Check::new("oracle_relative_error", ORACLE_TOL);
    let mut transversality = Check::new("transversality_residual", TRANSVERSALITY_TOL);

    for s in &plan.slices {
        let t = &s.trajectory;
        nodes.record(s.index, worst_penetration(scene, t.states.iter().map(|x| Point2::new(x[0], x[1]))));
        dense.record(s.index, worst_penetration(scene, dense_samples(t).iter().map(|x| Point2::new(x[0], x[1]))));

        match slice_nlp(scene, s.index) {
            Ok(nlp) => {
                let z = t.to_local(plan.sweep).pack();
                let residual = nlp.eq_constraints(&z).iter().fold(0.0, |m: f64, c| m.max(c.abs()));
                defects.record(s.index, residual);
            }
            Err(e) => defects.fail(s.index, e.to_string()),
        }

        if obstacle_free(s) {
            match analytic_rest_to_rest(s.problem.chord_length(), s.problem.effective_weight()) {
                Ok(exact) => {
                    let e_tf = (t.final_time - exact.final_time).abs() / exact.final_time;
                    let e_energy = (t.energy - exact.energy).abs() / exact.energy;
                    oracle.record(s.index, e_tf.max(e_energy));
                }
                Err(e) => oracle.fail(s.index, e.to_string()),
            }
        }
    }

    // First, middle and last obstacle-free slices.
    let free: Vec<&PlannedSlice<f64>> = plan.slices.iter().filter(|s| obstacle_free(s)).collect();
    let mut picks: Vec<usize> = match free.len() {
        0 => vec![],
        n => vec![0, n / 2, n - 1],
    };
    picks.dedup();
    for &i in picks.iter().take(TRANSVERSALITY_SAMPLES) {
        let s = free[i];
        match transversality_check(scene, s.index, &s.trajectory, TRANSVERSALITY_EPSILON) {
            Ok(r) => transversality.record(s.index, r),
            Err(e) => transversality.fail(s.index, e.to_string()),
        }
    }

    VerifyReport {
        slices: plan.slices.len(),
        checks: [nodes, dense, defects, oracle, transversality].into_iter().map(Check::finish).collect(),
    }
}
