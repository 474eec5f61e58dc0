//! 2-D ambient geometry: grids, conformal metrics, analytic backgrounds and
//! immersed closed curves.

pub mod background;
pub mod conformal;
pub mod curve;
pub mod grid;
pub mod metricfield;

pub use background::{AnalyticBackground, BackgroundData, BackgroundKind, FlowDirection};
pub use conformal::ConformalTorus;
pub use curve::{CurveGeometry, CurveKind, CurveState};
pub use grid::{Grid2, StencilOrder};
pub use metricfield::MetricField;
