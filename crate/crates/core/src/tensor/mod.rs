//! General-dimension pointwise Riemannian calculus with identity auditing.

pub mod calculus;
pub mod checks;
pub mod evolution;
pub mod fields;
pub mod metric;

pub use calculus::{christoffel_at, curvature_at};
pub use checks::{bianchi_residuals, h_evolution_point, ledger_suite, CheckSample};
pub use metric::{MetricMap, ScalarMap, TrigMetric, TrigPoly};
