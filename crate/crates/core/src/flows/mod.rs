//! Time integration of the coupled evolutions: ambient metric under
//! `g_t = -2Q`, the conjugate heat equation for `u`, and curve shortening
//! inside the moving metric.

pub mod curve_flow;
pub mod heat;
pub mod ricci;

use crate::error::FlowError;
use crate::geometry::background::{AnalyticBackground, FlowDirection};
use crate::geometry::conformal::ConformalTorus;
use crate::geometry::grid::Grid2;
use crate::geometry::metricfield::MetricField;

pub use curve_flow::{curve_flow_run, CurveRun};
pub use heat::{conjugate_heat_solve, UTerminal};
pub use ricci::{ricci_flow_run, sphere_family, static_family};

/// The `Q` in `g_t = -2Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QMode {
    /// `Q = Ric` (Ricci flow)
    Ricci,
    /// `Q = -Ric` (backward Ricci flow)
    BackwardRicci,
    /// `Q = 0`
    Static,
}

impl QMode {
    /// Sign of `Q` against `Ric`: `Q = q_sign * Ric`.
    pub fn q_sign(self) -> f64 {
        match self {
            QMode::Ricci => 1.0,
            QMode::BackwardRicci => -1.0,
            QMode::Static => 0.0,
        }
    }
}

impl From<FlowDirection> for QMode {
    fn from(d: FlowDirection) -> Self {
        match d {
            FlowDirection::Ricci => QMode::Ricci,
            FlowDirection::BackwardRicci => QMode::BackwardRicci,
            FlowDirection::Static => QMode::Static,
        }
    }
}

/// The zeroth-order coefficient in `u_t = -Delta u + K u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KMode {
    /// `K = R` literally.
    ScalarCurvature,
    /// `K = tr Q` (so `K = R` under Ricci flow, `-R` under backward).
    TraceQ,
    Zero,
}

impl KMode {
    /// `K` as a multiple of the scalar curvature for the given `Q`.
    pub fn r_coefficient(self, q: QMode) -> f64 {
        match self {
            KMode::ScalarCurvature => 1.0,
            KMode::TraceQ => q.q_sign(),
            KMode::Zero => 0.0,
        }
    }
}

/// Configuration of an ambient metric run.
#[derive(Clone, Copy, Debug)]
pub struct AmbientFlowConfig {
    pub q_mode: QMode,
    pub k_mode: KMode,
    /// Reference time `T` for `tau = T - t`; must satisfy `t1 < T`.
    pub reference_time: f64,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub snapshot_stride: usize,
}

/// Stability constant for the explicit conformal/heat steps.
pub const STABILITY_FACTOR: f64 = 0.2;

/// Runs keep `tau = T - t` at or above this floor; the monitored quantities
/// are singular at `t = T`.
pub const TAU_MIN: f64 = 1e-3;

impl AmbientFlowConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.t1 > self.t0) {
            return Err(FlowError::InvalidConfig(format!(
                "need t1 > t0, got [{}, {}]",
                self.t0, self.t1
            )));
        }
        if !(self.t1 <= self.reference_time - TAU_MIN) {
            return Err(FlowError::InvalidConfig(format!(
                "need t1 <= T - tau_min = {} (tau stays above the {TAU_MIN} floor), got t1 = {}",
                self.reference_time - TAU_MIN,
                self.t1
            )));
        }
        if !(self.dt > 0.0) {
            return Err(FlowError::InvalidConfig(format!("dt = {} must be > 0", self.dt)));
        }
        if self.snapshot_stride == 0 {
            return Err(FlowError::InvalidConfig("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Explicit-step bound `dt <= 0.2 h^2 e^{2 min phi}` for a grid.
    pub fn stability_bound(phi: &Grid2) -> f64 {
        let h = phi.hx().min(phi.hy());
        STABILITY_FACTOR * h * h * (2.0 * phi.min()).exp()
    }
}

/// Where a trajectory came from; exact families admit closed-form evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ExactFamily,
    Numeric,
}

/// The scalar field `u` attached to one snapshot.
#[derive(Clone, Debug)]
pub enum UField {
    Grid(Grid2),
    /// Spatially constant value.
    Const(f64),
    /// `u(x, y) = base + amp cos(k x)` (exact flat-torus solutions).
    CosineX { base: f64, amp: f64, k: f64 },
}

impl UField {
    pub fn value_at(&self, p: [f64; 2]) -> f64 {
        match self {
            UField::Grid(g) => g.bilinear(p),
            UField::Const(c) => *c,
            UField::CosineX { base, amp, k } => base + amp * (k * p[0]).cos(),
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            UField::Grid(g) => g.min(),
            UField::Const(c) => *c,
            UField::CosineX { base, amp, .. } => base - amp.abs(),
        }
    }
}

/// One instant of the ambient flow.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub metric: MetricField,
    pub u: Option<UField>,
}

/// Time-stamped sequence of metric snapshots (plus optional `u`).
#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub snapshots: Vec<Snapshot>,
    pub q_mode: QMode,
    pub provenance: Provenance,
    /// Present for closed-form families; lets evaluators avoid interpolation.
    pub family: Option<AnalyticBackground>,
}

impl FlowTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn t0(&self) -> f64 {
        self.snapshots.first().map(|s| s.t).unwrap_or(0.0)
    }

    pub fn t1(&self) -> f64 {
        self.snapshots.last().map(|s| s.t).unwrap_or(0.0)
    }

    /// Index of the snapshot closest to `t`, requiring interior brackets.
    pub fn bracket(&self, t: f64) -> Result<usize, FlowError> {
        let n = self.snapshots.len();
        if n < 3 {
            return Err(FlowError::InsufficientSnapshots { t });
        }
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (i, s) in self.snapshots.iter().enumerate() {
            let d = (s.t - t).abs();
            if d < bd {
                bd = d;
                best = i;
            }
        }
        if best == 0 || best + 1 == n {
            return Err(FlowError::InsufficientSnapshots { t });
        }
        Ok(best)
    }

    /// Metric at an arbitrary time: closed form for exact families, linear
    /// interpolation of `phi` between grid snapshots otherwise.
    pub fn metric_at_time(&self, t: f64) -> Result<MetricField, FlowError> {
        if let Some(family) = &self.family {
            return Ok(family.slice(t)?);
        }
        let n = self.snapshots.len();
        if n == 1 {
            return Ok(self.snapshots[0].metric.clone());
        }
        // clamp to range, find the surrounding pair
        let t = t
            .max(self.snapshots[0].t)
            .min(self.snapshots[n - 1].t);
        let mut hi = 1;
        while hi + 1 < n && self.snapshots[hi].t < t {
            hi += 1;
        }
        let lo = hi - 1;
        let (sa, sb) = (&self.snapshots[lo], &self.snapshots[hi]);
        let w = if sb.t > sa.t { (t - sa.t) / (sb.t - sa.t) } else { 0.0 };
        match (&sa.metric, &sb.metric) {
            (MetricField::Grid(a), MetricField::Grid(b)) => {
                let phi = a.phi.zip(&b.phi, |x, y| (1.0 - w) * x + w * y);
                Ok(MetricField::Grid(ConformalTorus::new(phi, t)?))
            }
            // static analytic snapshots are identical
            _ => Ok(sa.metric.clone()),
        }
    }

    /// Attach solved `u` fields (one per snapshot).
    pub fn with_u(&self, fields: Vec<UField>) -> FlowTrajectory {
        assert_eq!(fields.len(), self.snapshots.len());
        let mut out = self.clone();
        for (s, u) in out.snapshots.iter_mut().zip(fields) {
            s.u = Some(u);
        }
        out
    }

    /// Time-reversed trajectory: `t -> t0 + t1 - t` with Q flipped. If `g`
    /// solves `g_t = -2Q`, the reversal solves the flipped flow exactly; this
    /// is how generic backward-Ricci trajectories are produced, since the
    /// initial-value backward problem amplifies grid-scale noise like
    /// `e^{k^2 t}` and trips the instability guard immediately.
    pub fn reversed(&self) -> FlowTrajectory {
        assert!(
            self.family.is_none(),
            "reversal is for numeric trajectories; exact families are\
             constructed directly in either direction"
        );
        let t0 = self.t0();
        let t1 = self.t1();
        let mut snapshots: Vec<Snapshot> = self
            .snapshots
            .iter()
            .rev()
            .map(|s| {
                let mut c = s.clone();
                c.t = t0 + t1 - s.t;
                if let MetricField::Grid(m) = &mut c.metric {
                    m.t = c.t;
                }
                c
            })
            .collect();
        snapshots.shrink_to_fit();
        FlowTrajectory {
            snapshots,
            q_mode: match self.q_mode {
                QMode::Ricci => QMode::BackwardRicci,
                QMode::BackwardRicci => QMode::Ricci,
                QMode::Static => QMode::Static,
            },
            provenance: self.provenance,
            family: None,
        }
    }
}
