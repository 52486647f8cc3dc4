//! Scene documents on disk.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sweepopt::geometry::{CircleObstacle, Point2, Polygon};
use sweepopt::planner::{RobotSpec, Scene};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleEntry {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotEntry {
    pub radius: f64,
}

/// JSON scene document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub workspace: Vec<[f64; 2]>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleEntry>,
    pub robot: RobotEntry,
    pub weight: f64,
    pub nodes_per_slice: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated scene plus the document's optional seed.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScene {
    pub scene: Scene<f64>,
    pub seed: Option<u64>,
}

impl SceneFile {
    pub fn from_scene(scene: &Scene<f64>, seed: Option<u64>) -> Self {
        Self {
            workspace: scene.workspace.vertices().iter().map(|p| [p.x, p.y]).collect(),
            obstacles: scene
                .obstacles
                .iter()
                .map(|o| ObstacleEntry { x: o.center.x, y: o.center.y, r: o.radius })
                .collect(),
            robot: RobotEntry { radius: scene.robot.coverage_radius },
            weight: scene.weight,
            nodes_per_slice: scene.nodes_per_slice,
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene documents always serialize")
    }

    /// Builds and validates the scene.
    pub fn into_scene(self) -> CliResult<LoadedScene> {
        let invalid = |m: String| CliError::Validation(m);
        let finite = self.workspace.iter().flatten().all(|v| v.is_finite())
            && self.obstacles.iter().all(|o| o.x.is_finite() && o.y.is_finite() && o.r.is_finite())
            && self.robot.radius.is_finite()
            && self.weight.is_finite();
        if !finite {
            return Err(invalid("all numbers must be finite".into()));
        }
        let workspace = Polygon::new(self.workspace.iter().map(|&[x, y]| Point2::new(x, y)).collect())
            .map_err(|e| invalid(e.to_string()))?;
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| {
                CircleObstacle::new(Point2::new(o.x, o.y), o.r).map_err(|e| invalid(format!("obstacle {i}: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let robot = RobotSpec { coverage_radius: self.robot.radius };
        let scene = Scene::new(workspace, obstacles, robot, self.weight, self.nodes_per_slice)
            .map_err(|e| invalid(e.to_string()))?;
        Ok(LoadedScene { scene, seed: self.seed })
    }
}

/// Parses a scene document; `origin` names the source in error messages.
pub fn parse_scene(text: &str, origin: &str) -> CliResult<LoadedScene> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_scene()
}

pub fn load_scene(path: &Path) -> CliResult<LoadedScene> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scene(&text, &path.display().to_string())
}
