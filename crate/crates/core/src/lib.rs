//! Optimal-control coverage path planning.
//!
//! A convex field is swept with parallel back-and-forth slices. The sweep
//! direction minimizes the sum of altitudes of the field and its circular
//! obstacles, and each slice is a free-final-time double-integrator problem
//! transcribed on Legendre–Gauss–Lobatto nodes and solved with an augmented
//! Lagrangian method.
//!
//! The numerical core is generic over the scalar type; the aliases below fix
//! it to `f64` (or `f32` for the collocation grid).

// `!(a <= b)` is used on purpose so NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collocation;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod nlp_solver;
pub mod oracle;
pub mod planner;
pub mod scalar;
pub mod transcription;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point2_64 = geometry::Point2<f64>;
pub type Polygon64 = geometry::Polygon<f64>;
pub type CircleObstacle64 = geometry::CircleObstacle<f64>;
pub type SweepDirection64 = geometry::SweepDirection<f64>;
pub type LglGrid64 = collocation::LglGrid<f64>;
pub type LglGrid32 = collocation::LglGrid<f32>;
pub type SliceProblem64 = transcription::SliceProblem<f64>;
pub type Trajectory64 = transcription::Trajectory<f64>;
pub type Scene64 = planner::Scene<f64>;
pub type CoveragePlan64 = planner::CoveragePlan<f64>;
