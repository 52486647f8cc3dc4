//! Static SVG rendering of a coverage plan.
//!
//! Palette: workspace outline black, obstacles grey, nominal slices blue,
//! `CorridorExpanded` slices red. Each slice also gets a band of width twice
//! the coverage radius in its own color at opacity 0.3.

use std::fmt::Write as _;
use std::path::Path;

use sweepopt::geometry::Point2;
use sweepopt::metrics::dense_samples;
use sweepopt::planner::{CoveragePlan, Scene, SliceFlag};

use crate::error::{CliError, CliResult};

pub const OUTLINE_COLOR: &str = "#000000";
pub const OBSTACLE_COLOR: &str = "#7f7f7f";
pub const NOMINAL_COLOR: &str = "#1f77b4";
pub const EXPANDED_COLOR: &str = "#d62728";
pub const BAND_OPACITY: f64 = 0.3;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;

pub fn slice_color(flag: SliceFlag) -> &'static str {
    match flag {
        SliceFlag::Nominal => NOMINAL_COLOR,
        SliceFlag::CorridorExpanded => EXPANDED_COLOR,
    }
}

/// World to canvas: uniform scale, y up.
struct View {
    min: Point2<f64>,
    scale: f64,
    height: f64,
}

impl View {
    fn new(scene: &Scene<f64>) -> Self {
        let (min, max) = scene.workspace.bounding_box();
        let span = (max.x - min.x).max(max.y - min.y);
        let scale = (CANVAS - 2.0 * MARGIN) / span;
        Self { min, scale, height: (max.y - min.y) * scale + 2.0 * MARGIN }
    }

    fn width(&self, scene: &Scene<f64>) -> f64 {
        let (min, max) = scene.workspace.bounding_box();
        (max.x - min.x) * self.scale + 2.0 * MARGIN
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.min.x) * self.scale, self.height - MARGIN - (y - self.min.y) * self.scale)
    }

    fn points(&self, pts: impl Iterator<Item = (f64, f64)>) -> String {
        pts.map(|(x, y)| {
            let (u, v) = self.map(x, y);
            format!("{u:.3},{v:.3}")
        })
        .collect::<Vec<_>>()
        .join(" ")
    }
}

/// SVG document for `plan` over `scene`. Byte-identical for identical input.
pub fn svg_string(plan: &CoveragePlan<f64>, scene: &Scene<f64>) -> String {
    let view = View::new(scene);
    let (w, h) = (view.width(scene), view.height);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let paths: Vec<(SliceFlag, String)> = plan
        .slices
        .iter()
        .map(|s| (s.flag, view.points(dense_samples(&s.trajectory).iter().map(|x| (x[0], x[1])))))
        .collect();

    let band = 2.0 * scene.robot.coverage_radius * view.scale;
    let _ = writeln!(out, r#"<g id="bands" fill="none" stroke-opacity="{BAND_OPACITY}" stroke-linecap="round" stroke-linejoin="round">"#);
    for (flag, pts) in &paths {
        let _ = writeln!(out, r#"<polyline points="{pts}" stroke="{}" stroke-width="{band:.3}"/>"#, slice_color(*flag));
    }
    let _ = writeln!(out, "</g>");

    let outline = view.points(scene.workspace.vertices().iter().map(|p| (p.x, p.y)));
    let _ = writeln!(
        out,
        r#"<polygon id="workspace" points="{outline}" fill="none" stroke="{OUTLINE_COLOR}" stroke-width="2"/>"#
    );

    let _ = writeln!(out, r#"<g id="obstacles" fill="{OBSTACLE_COLOR}">"#);
    for o in &scene.obstacles {
        let (cx, cy) = view.map(o.center.x, o.center.y);
        let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, o.radius * view.scale);
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g id="slices" fill="none" stroke-width="1.5">"#);
    for (flag, pts) in &paths {
        let _ = writeln!(out, r#"<polyline points="{pts}" stroke="{}"/>"#, slice_color(*flag));
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

pub fn render_svg(plan: &CoveragePlan<f64>, scene: &Scene<f64>, path: &Path) -> CliResult<()> {
    std::fs::write(path, svg_string(plan, scene)).map_err(|e| CliError::io(path, e))
}
