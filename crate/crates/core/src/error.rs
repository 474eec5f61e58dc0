//! Error types for the geometry, flow and monitoring layers.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("grid must be at least 16x16 with even sides, got {nx}x{ny}")]
    InvalidGrid { nx: usize, ny: usize },
    #[error("non-finite field value at grid node ({i}, {j})")]
    NonFiniteField { i: usize, j: usize },
    #[error("degenerate curve: edge {edge} has length {len:.3e} < {eps:.3e}")]
    DegenerateCurve { edge: usize, len: f64, eps: f64 },
    #[error("curve needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("time {t} outside the background's allowed interval ({detail})")]
    TimeOutOfRange { t: f64, detail: String },
    #[error("metric not positive definite at probe point (min eigenvalue {min_eig:.3e})")]
    SingularMetric { min_eig: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("time step {dt:.3e} violates stability bound {bound:.3e} (dt <= 0.2 h^2 e^(2 min phi))")]
    UnstableStep { dt: f64, bound: f64 },
    #[error("blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },
    #[error("instability at t = {t}: step change {change:.3e} exceeds 1")]
    Instability { t: f64, change: f64 },
    #[error("positivity loss in conjugate heat solve at t = {t}: min u = {min_u:.3e}")]
    PositivityLoss { t: f64, min_u: f64 },
    #[error("curve collapsed at t = {t}: length {len:.3e}")]
    CurveCollapse { t: f64, len: f64 },
    #[error("trajectory has too few snapshots around t = {t} (need 3)")]
    InsufficientSnapshots { t: f64 },
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonitorError {
    #[error("tau = {0} must be positive")]
    NonpositiveTau(f64),
    #[error("bundle mismatch: {0}")]
    GridMismatch(String),
    #[error("mass integral requires a compact ambient, got {0}")]
    NoncompactAmbient(String),
    #[error("scalar curvature {0:.3e} must be positive for log R")]
    NonpositiveCurvature(f64),
    #[error("u must be positive, got {0:.3e}")]
    NonpositiveU(f64),
    #[error("invalid time ordering for {kind} soliton: {detail}")]
    InvalidTimeOrdering { kind: String, detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
