//! File formats and rendering behind the `sweepopt` binary.

// `!(a <= b)` is used on purpose so NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scene_file;
pub mod svg;
pub mod verify;

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sweepopt::metrics::{cumulative_curves, default_cell, plan_metrics, PlanMetrics};
use sweepopt::planner::{plan_coverage, CoveragePlan, Scene, SliceFlag};

pub use error::{CliError, CliResult, EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK};
pub use scene_file::{load_scene, parse_scene, LoadedScene, SceneFile};
pub use svg::{render_svg, svg_string};
pub use verify::{verify_plan, Check, VerifyReport};

/// Environment variable capping experiment parallelism.
pub const THREADS_ENV: &str = "SWEEPOPT_THREADS";

/// Contents of `plan --out`.
#[derive(Debug, Clone, Serialize)]
pub struct PlanDocument<'a> {
    pub scene: SceneFile,
    pub metrics: PlanMetrics<f64>,
    pub plan: &'a CoveragePlan<f64>,
}

/// Metrics of `plan`, with the path-length ratio taken against the
/// obstacle-free plan of the same scene.
pub fn metrics_for(plan: &CoveragePlan<f64>, scene: &Scene<f64>) -> CliResult<PlanMetrics<f64>> {
    if scene.obstacles.is_empty() {
        return Ok(plan_metrics(plan, scene, None)?);
    }
    let bare = Scene { obstacles: Vec::new(), ..scene.clone() };
    let reference = plan_coverage(&bare)?;
    Ok(plan_metrics(plan, scene, Some(&reference))?)
}

pub const METRICS_HEADER: &str = "slice,flag,E,t_f,E_cum,t_cum,A_cum";

fn flag_name(flag: SliceFlag) -> &'static str {
    match flag {
        SliceFlag::Nominal => "nominal",
        SliceFlag::CorridorExpanded => "corridor_expanded",
    }
}

/// Per-slice metrics with running totals, one row per slice.
pub fn metrics_csv(plan: &CoveragePlan<f64>, scene: &Scene<f64>) -> CliResult<String> {
    let curves = cumulative_curves(plan, scene, default_cell(scene))?;
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for (s, c) in plan.slices.iter().zip(&curves) {
        let _ = writeln!(
            out,
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            s.index,
            flag_name(s.flag),
            s.trajectory.energy,
            s.trajectory.final_time,
            c.energy,
            c.time,
            c.area
        );
    }
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Parses `SWEEPOPT_THREADS`; unset or empty means machine parallelism.
pub fn threads_from_env(value: Option<&str>) -> CliResult<Option<usize>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let values = text
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("not a finite number: {v:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("--values is empty".into()));
    }
    Ok(values)
}
