//! Seeded random scenes and one-parameter studies over the weight, the
//! obstacle count and the obstacle radius.
//!
//! Random numbers come from ChaCha8 seeded with a 64-bit integer, which gives
//! the same stream on every platform. A uniform draw in `[0, 1)` takes the top
//! 53 bits of one `u64`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CircleObstacle, Point2, Polygon};
use crate::metrics::plan_metrics;
use crate::planner::{plan_coverage_with, CoveragePlan, PlannerOptions, RobotSpec, Scene, SliceFlag};

/// Rejection-sampling budget per obstacle.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;
pub const DEFAULT_RADIUS_RANGE: (f64, f64) = (0.05, 0.3);
pub const DEFAULT_TRIALS: usize = 5;
/// Obstacles per scene in the radius study when the base scene has none.
pub const DEFAULT_OBSTACLE_COUNT: usize = 5;
pub const DEFAULT_WEIGHT: f64 = 0.5;
pub const DEFAULT_NODES: usize = 20;

struct Uniform(ChaCha8Rng);

impl Uniform {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

/// Draws `n_obs` pairwise-disjoint discs inside `workspace`, each inset from
/// the boundary by its radius plus `margin`.
pub fn random_obstacles(
    workspace: &Polygon<f64>,
    margin: f64,
    n_obs: usize,
    (r_min, r_max): (f64, f64),
    seed: u64,
) -> Result<Vec<CircleObstacle<f64>>> {
    if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
        return Err(Error::InvalidObstacle(format!("radius range [{r_min}, {r_max}] is invalid")));
    }
    let mut rng = Uniform::new(seed);
    let (lo, hi) = workspace.bounding_box();
    let mut placed: Vec<CircleObstacle<f64>> = Vec::with_capacity(n_obs);
    for index in 0..n_obs {
        let radius = rng.range(r_min, r_max);
        let mut found = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let c = Point2::new(rng.range(lo.x, hi.x), rng.range(lo.y, hi.y));
            if workspace.inset_distance(c) < radius + margin {
                continue;
            }
            if placed.iter().all(|o| o.center.distance(c) >= o.radius + radius) {
                found = Some(c);
                break;
            }
        }
        let center = found.ok_or(Error::PlacementFailed { index, attempts: MAX_PLACEMENT_ATTEMPTS })?;
        placed.push(CircleObstacle::new(center, radius)?);
    }
    Ok(placed)
}

/// Scene with `n_obs` random obstacles, weight [`DEFAULT_WEIGHT`] and
/// [`DEFAULT_NODES`] nodes per slice.
pub fn random_scene(
    workspace: Polygon<f64>,
    robot: RobotSpec<f64>,
    n_obs: usize,
    radius_range: (f64, f64),
    seed: u64,
) -> Result<Scene<f64>> {
    let obstacles = random_obstacles(&workspace, robot.coverage_radius, n_obs, radius_range, seed)?;
    Scene::new(workspace, obstacles, robot, DEFAULT_WEIGHT, DEFAULT_NODES)
}

/// Seed of trial `trial`, shared by every value of the study.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vary {
    Weight,
    ObstacleCount,
    ObstacleRadius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub base: Scene<f64>,
    pub vary: Vary,
    pub values: Vec<f64>,
    pub trials_per_value: usize,
    pub seed: u64,
    /// Radius range of random obstacles in the count study.
    pub radius_range: (f64, f64),
    /// Obstacles per scene in the radius study.
    pub obstacle_count: usize,
}

impl ScenarioSpec {
    /// Scenario with the documented defaults for everything but the study itself.
    pub fn new(base: Scene<f64>, vary: Vary, values: Vec<f64>, seed: u64) -> Self {
        let obstacle_count = if base.obstacles.is_empty() { DEFAULT_OBSTACLE_COUNT } else { base.obstacles.len() };
        Self {
            base,
            vary,
            values,
            trials_per_value: DEFAULT_TRIALS,
            seed,
            radius_range: DEFAULT_RADIUS_RANGE,
            obstacle_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScene(m));
        if self.values.is_empty() {
            return bad("no values to sweep".into());
        }
        if self.trials_per_value == 0 {
            return bad("trials per value must be positive".into());
        }
        for &v in &self.values {
            let ok = match self.vary {
                Vary::Weight => (0.1..=0.9).contains(&v),
                Vary::ObstacleCount => v >= 0.0 && v.fract() == 0.0 && v <= 1e6,
                Vary::ObstacleRadius => v > 0.0 && v.is_finite(),
            };
            if !ok {
                return bad(format!("value {v} is out of range for {:?}", self.vary));
            }
        }
        let (r_min, r_max) = self.radius_range;
        if !(r_min > 0.0 && r_min <= r_max) {
            return bad(format!("radius range [{r_min}, {r_max}] is invalid"));
        }
        self.base.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    CorridorExpanded,
    BlockedEndpoint,
    SliceInfeasible,
    PlacementFailed,
    Error,
}

impl TrialStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::CorridorExpanded => "corridor_expanded",
            Self::BlockedEndpoint => "blocked_endpoint",
            Self::SliceInfeasible => "slice_infeasible",
            Self::PlacementFailed => "placement_failed",
            Self::Error => "error",
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Self::Ok | Self::CorridorExpanded)
    }

    fn of_error(e: &Error) -> Self {
        match e {
            Error::BlockedEndpoint { .. } => Self::BlockedEndpoint,
            Error::SliceInfeasible { .. } => Self::SliceInfeasible,
            Error::PlacementFailed { .. } => Self::PlacementFailed,
            _ => Self::Error,
        }
    }
}

/// One `(value, trial)` result. Metrics are `None` for failed trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    pub energy: Option<f64>,
    pub total_time: Option<f64>,
    pub covered_area: Option<f64>,
    pub coverage_ratio: Option<f64>,
    pub status: TrialStatus,
    pub expanded_slices: usize,
    /// Error text for failed trials.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTable {
    pub vary: Vary,
    pub trials_per_value: usize,
    pub seed: u64,
    pub radius_range: (f64, f64),
    pub rows: Vec<TrendRow>,
}

pub const CSV_HEADER: &str = "value,trial,seed,E,t_ftot,A_tot,A_rel,status";

impl TrendTable {
    /// CSV with the fixed header; failed metrics are empty fields.
    pub fn to_csv(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.value,
                r.trial,
                r.seed,
                f(r.energy),
                f(r.total_time),
                f(r.covered_area),
                f(r.coverage_ratio),
                r.status.as_str()
            ));
        }
        out
    }

    /// Rows of value `v`, in trial order.
    pub fn rows_for(&self, v: f64) -> impl Iterator<Item = &TrendRow> + '_ {
        self.rows.iter().filter(move |r| r.value == v)
    }

    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| !r.status.is_success())
    }
}

fn with_weight(scene: &Scene<f64>, w: f64) -> Scene<f64> {
    Scene { weight: w, ..scene.clone() }
}

fn without_obstacles(scene: &Scene<f64>) -> Scene<f64> {
    Scene { obstacles: Vec::new(), ..scene.clone() }
}

fn build_scene(spec: &ScenarioSpec, value: f64, seed: u64) -> Result<Scene<f64>> {
    let base = &spec.base;
    let margin = base.robot.coverage_radius;
    let obstacles = match spec.vary {
        Vary::Weight => base.obstacles.clone(),
        Vary::ObstacleCount => random_obstacles(&base.workspace, margin, value as usize, spec.radius_range, seed)?,
        Vary::ObstacleRadius => {
            random_obstacles(&base.workspace, margin, spec.obstacle_count, (value, value), seed)?
        }
    };
    let weight = if spec.vary == Vary::Weight { value } else { base.weight };
    let scene = Scene { obstacles, weight, ..base.clone() };
    scene.validate()?;
    Ok(scene)
}

fn run_trial(
    spec: &ScenarioSpec,
    value: f64,
    trial: usize,
    reference: &Result<CoveragePlan<f64>>,
    opts: &PlannerOptions,
) -> TrendRow {
    let seed = trial_seed(spec.seed, trial);
    let mut row = TrendRow {
        value,
        trial,
        seed,
        energy: None,
        total_time: None,
        covered_area: None,
        coverage_ratio: None,
        status: TrialStatus::Error,
        expanded_slices: 0,
        detail: None,
    };
    let outcome = build_scene(spec, value, seed).and_then(|scene| {
        let plan = plan_coverage_with(&scene, opts)?;
        let reference = reference.as_ref().map_err(Clone::clone)?;
        let m = plan_metrics(&plan, &scene, Some(reference))?;
        Ok((plan, m))
    });
    match outcome {
        Ok((plan, m)) => {
            row.energy = Some(m.total_energy);
            row.total_time = Some(m.total_time);
            row.covered_area = Some(m.covered_area);
            row.coverage_ratio = Some(m.coverage_ratio);
            row.expanded_slices = plan.flags().iter().filter(|&&f| f == SliceFlag::CorridorExpanded).count();
            row.status = if row.expanded_slices > 0 { TrialStatus::CorridorExpanded } else { TrialStatus::Ok };
        }
        Err(e) => {
            row.status = TrialStatus::of_error(&e);
            row.detail = Some(e.to_string());
        }
    }
    row
}

/// Runs the study on at most `threads` worker threads (machine parallelism
/// when `None`). Rows come back ordered by value, then trial.
pub fn parameter_sweep(spec: &ScenarioSpec, threads: Option<usize>) -> Result<TrendTable> {
    parameter_sweep_with(spec, threads, &PlannerOptions::default())
}

pub fn parameter_sweep_with(spec: &ScenarioSpec, threads: Option<usize>, opts: &PlannerOptions) -> Result<TrendTable> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;

    // Obstacle-free reference plans depend only on the weight.
    let weights: Vec<f64> = match spec.vary {
        Vary::Weight => spec.values.clone(),
        _ => vec![spec.base.weight],
    };
    let jobs: Vec<(usize, usize)> =
        (0..spec.values.len()).flat_map(|v| (0..spec.trials_per_value).map(move |t| (v, t))).collect();
    let rows = pool.install(|| {
        let references: Vec<Result<CoveragePlan<f64>>> = weights
            .par_iter()
            .map(|&w| plan_coverage_with(&without_obstacles(&with_weight(&spec.base, w)), opts))
            .collect();
        jobs.par_iter()
            .map(|&(v, t)| {
                let reference = &references[if spec.vary == Vary::Weight { v } else { 0 }];
                run_trial(spec, spec.values[v], t, reference, opts)
            })
            .collect::<Vec<_>>()
    });
    Ok(TrendTable {
        vary: spec.vary,
        trials_per_value: spec.trials_per_value,
        seed: spec.seed,
        radius_range: spec.radius_range,
        rows,
    })
}
