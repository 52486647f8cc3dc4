use thiserror::Error;

/// Errors raised by the planning pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),

    #[error("collocation order must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("solution violates constraints by {violation:e} (tolerance {tolerance:e})")]
    InfeasibleSolution { violation: f64, tolerance: f64 },

    #[error("weight must lie in (0, 1), got {0}")]
    InvalidWeight(f64),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("slice {slice}: obstacle {obstacle} contains the slice endpoint")]
    BlockedEndpoint { slice: usize, obstacle: usize },

    #[error("slice {slice} is infeasible: {reason}")]
    SliceInfeasible { slice: usize, reason: String },

    #[error("raster cell {cell} exceeds half the coverage radius ({limit})")]
    ResolutionTooCoarse { cell: f64, limit: f64 },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("could not place obstacle {index} after {attempts} attempts")]
    PlacementFailed { index: usize, attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
