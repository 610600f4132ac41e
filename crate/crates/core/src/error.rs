use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level {level} exceeds the configured cap {cap}")]
    LevelCap { level: usize, cap: usize },

    #[error("array of length {got} does not match level {level} (expected {expected})")]
    LengthMismatch { level: usize, expected: usize, got: usize },

    #[error("target level {target} is deeper than source level {source_level}")]
    NotNested { target: usize, source_level: usize },

    #[error("reference level {reference} must exceed level {level}")]
    ReferenceLevel { level: usize, reference: usize },

    #[error("level {0} has no interior vertices")]
    DegenerateLevel(usize),

    #[error("eigendecomposition failed: {0}")]
    Eigensolver(String),

    #[error("eigenpair check failed: {what} = {value:e} (tolerance {tolerance:e})")]
    Residual { what: &'static str, value: f64, tolerance: f64 },

    #[error("function is nonzero on the boundary (max |f| = {0:e})")]
    BoundaryViolation(f64),

    #[error("Voronoi cell of vertex {0} is empty")]
    EmptyCell(usize),

    #[error("distance bin r = {r} contains no vertex pairs")]
    InsufficientPairs { r: f64 },

    #[error("only {got} dyadic scales available, need at least {need}")]
    RegimeWindow { got: usize, need: usize },

    #[error("Weyl window too small at level {0} (need m >= 4)")]
    WeylWindow(usize),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
