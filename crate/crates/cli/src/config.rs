//! Scenario configuration schemas: one flat JSON document per scenario,
//! deserialized strictly and range-checked before dispatch.

use serde::{Deserialize, Serialize};

use flowlab_core::flows::{KMode, QMode};
use flowlab_core::geometry::FlowDirection;

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum QModeCfg {
    Ricci,
    BackwardRicci,
    Static,
}

impl From<QModeCfg> for QMode {
    fn from(v: QModeCfg) -> Self {
        match v {
            QModeCfg::Ricci => QMode::Ricci,
            QModeCfg::BackwardRicci => QMode::BackwardRicci,
            QModeCfg::Static => QMode::Static,
        }
    }
}

impl From<QModeCfg> for FlowDirection {
    fn from(v: QModeCfg) -> Self {
        match v {
            QModeCfg::Ricci => FlowDirection::Ricci,
            QModeCfg::BackwardRicci => FlowDirection::BackwardRicci,
            QModeCfg::Static => FlowDirection::Static,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KModeCfg {
    ScalarCurvature,
    TraceQ,
    Zero,
}

impl From<KModeCfg> for KMode {
    fn from(v: KModeCfg) -> Self {
        match v {
            KModeCfg::ScalarCurvature => KMode::ScalarCurvature,
            KModeCfg::TraceQ => KMode::TraceQ,
            KModeCfg::Zero => KMode::Zero,
        }
    }
}

fn default_metrics() -> usize {
    20
}
fn default_points() -> usize {
    10
}
fn default_tolerance() -> f64 {
    1e-7
}

/// `verify-identities`: randomized residual suite over trig metrics.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyIdentitiesCfg {
    pub dim: usize,
    #[serde(default = "default_metrics")]
    pub metrics: usize,
    #[serde(default = "default_points")]
    pub points_per_metric: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl VerifyIdentitiesCfg {
    pub fn validate(&self) -> Result<(), String> {
        if self.dim != 2 && self.dim != 3 {
            return Err(format!("dim must be 2 or 3, got {}", self.dim));
        }
        if self.metrics == 0 || self.points_per_metric == 0 {
            return Err("metrics and points_per_metric must be >= 1".into());
        }
        if !(self.tolerance > 0.0) {
            return Err(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundCfg {
    ConformalTorus,
    RoundSphere,
    FlatTorus,
    FlatPlane,
    Cigar,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UTerminalCfg {
    Constant { value: f64 },
    Cosine { base: f64, amp: f64, k: f64 },
}

impl UTerminalCfg {
    pub fn validate(&self) -> Result<(), String> {
        let min = match self {
            UTerminalCfg::Constant { value } => *value,
            UTerminalCfg::Cosine { base, amp, .. } => base - amp.abs(),
        };
        if min <= 0.0 {
            return Err(format!("terminal u must be positive (min = {min})"));
        }
        Ok(())
    }

    pub fn to_core(&self) -> flowlab_core::flows::UTerminal {
        match self {
            UTerminalCfg::Constant { value } => flowlab_core::flows::UTerminal::Const(*value),
            UTerminalCfg::Cosine { base, amp, k } => flowlab_core::flows::UTerminal::CosineX {
                base: *base,
                amp: *amp,
                k: *k,
            },
        }
    }
}

/// `run-flow`: an ambient metric run with optional conjugate-heat solve.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunFlowCfg {
    pub background: BackgroundCfg,
    #[serde(default)]
    pub grid_n: usize,
    #[serde(default = "tau_len")]
    pub lx: f64,
    #[serde(default = "tau_len")]
    pub ly: f64,
    /// Initial conformal exponent: offset + seeded random trig modes.
    #[serde(default)]
    pub phi_offset: f64,
    #[serde(default)]
    pub phi_amplitude: f64,
    #[serde(default = "default_phi_modes")]
    pub phi_modes: usize,
    #[serde(default)]
    pub rho0: f64,
    pub q_mode: QModeCfg,
    #[serde(default = "default_k_mode")]
    pub k_mode: KModeCfg,
    pub t0: f64,
    pub t1: f64,
    pub reference_time: f64,
    pub dt: f64,
    pub snapshot_stride: usize,
    #[serde(default)]
    pub u_terminal: Option<UTerminalCfg>,
}

fn tau_len() -> f64 {
    std::f64::consts::TAU
}
fn default_phi_modes() -> usize {
    3
}
fn default_k_mode() -> KModeCfg {
    KModeCfg::TraceQ
}

impl RunFlowCfg {
    pub fn validate(&self) -> Result<(), String> {
        match self.background {
            BackgroundCfg::ConformalTorus => {
                if self.grid_n < 16 || !self.grid_n.is_multiple_of(2) {
                    return Err(format!(
                        "grid_n must be even and >= 16, got {}",
                        self.grid_n
                    ));
                }
                if !(self.lx > 0.0 && self.ly > 0.0) {
                    return Err("periods lx, ly must be positive".into());
                }
            }
            BackgroundCfg::RoundSphere => {
                if !(self.rho0 > 0.0) {
                    return Err(format!("rho0 must be > 0, got {}", self.rho0));
                }
            }
            _ => return Err("run-flow supports conformal_torus or round_sphere".into()),
        }
        if !(self.t1 > self.t0) {
            return Err(format!("need t1 > t0, got [{}, {}]", self.t0, self.t1));
        }
        if !(self.t1 <= self.reference_time - flowlab_core::flows::TAU_MIN) {
            return Err(format!(
                "need t1 <= reference_time - {} (the tau floor), got t1 = {}, T = {}",
                flowlab_core::flows::TAU_MIN,
                self.t1,
                self.reference_time
            ));
        }
        if !(self.dt > 0.0) {
            return Err(format!("dt must be > 0, got {}", self.dt));
        }
        if self.snapshot_stride == 0 {
            return Err("snapshot_stride must be >= 1".into());
        }
        if let Some(u) = &self.u_terminal {
            u.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveCfg {
    Circle {
        center: [f64; 2],
        radius: f64,
        vertices: usize,
    },
    Latitude {
        angle: f64,
        vertices: usize,
    },
}

impl CurveCfg {
    pub fn validate(&self) -> Result<(), String> {
        let v = match self {
            CurveCfg::Circle { radius, vertices, .. } => {
                if !(*radius > 0.0) {
                    return Err(format!("circle radius must be > 0, got {radius}"));
                }
                *vertices
            }
            CurveCfg::Latitude { angle, vertices } => {
                if !(*angle > 0.0 && *angle < std::f64::consts::PI) {
                    return Err(format!("latitude angle must lie in (0, pi), got {angle}"));
                }
                *vertices
            }
        };
        if v < 8 {
            return Err(format!("curve needs at least 8 vertices, got {v}"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityPreset {
    /// Static flat torus with the exact cosine solution.
    FlatStaticExact,
    /// Shrinking round sphere with spatially constant `u`.
    SphereSoliton,
    /// Backward round sphere with `u = R`.
    SphereBackwardR,
    /// Numeric conformal-torus run.
    TorusNumeric,
}

/// `monotonicity`: balance records along a run bundle.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityCfg {
    pub preset: MonotonicityPreset,
    pub t0: f64,
    pub t1: f64,
    pub reference_time: f64,
    /// Number of records (snapshot count) for exact presets.
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    pub curve: CurveCfg,
    #[serde(default)]
    pub rho0: f64,
    #[serde(default)]
    pub c_scale: f64,
    #[serde(default)]
    pub grid_n: usize,
    #[serde(default)]
    pub dt: f64,
    #[serde(default)]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub phi_offset: f64,
    #[serde(default)]
    pub phi_amplitude: f64,
    #[serde(default)]
    pub u_terminal: Option<UTerminalCfg>,
}

fn default_snapshots() -> usize {
    60
}

impl MonotonicityCfg {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.t1 > self.t0) {
            return Err(format!("need t1 > t0, got [{}, {}]", self.t0, self.t1));
        }
        if !(self.t1 <= self.reference_time - flowlab_core::flows::TAU_MIN) {
            return Err(format!(
                "need t1 <= reference_time - {} (the tau floor), got t1 = {}, T = {}",
                flowlab_core::flows::TAU_MIN,
                self.t1,
                self.reference_time
            ));
        }
        self.curve.validate()?;
        match self.preset {
            MonotonicityPreset::SphereSoliton | MonotonicityPreset::SphereBackwardR => {
                if !(self.rho0 > 0.0) {
                    return Err("sphere presets need rho0 > 0".into());
                }
                if !matches!(self.curve, CurveCfg::Latitude { .. }) {
                    return Err("sphere presets take a latitude curve".into());
                }
            }
            MonotonicityPreset::FlatStaticExact => {
                if !matches!(self.curve, CurveCfg::Circle { .. }) {
                    return Err("the flat preset takes a circle curve".into());
                }
            }
            MonotonicityPreset::TorusNumeric => {
                if self.grid_n < 16 || !self.grid_n.is_multiple_of(2) {
                    return Err(format!(
                        "grid_n must be even and >= 16, got {}",
                        self.grid_n
                    ));
                }
                if !(self.dt > 0.0) || self.snapshot_stride == 0 {
                    return Err("numeric preset needs dt > 0 and snapshot_stride >= 1".into());
                }
                if self.u_terminal.is_none() {
                    return Err("numeric preset needs u_terminal".into());
                }
                if !matches!(self.curve, CurveCfg::Circle { .. }) {
                    return Err("the torus preset takes a circle curve".into());
                }
            }
        }
        if self.snapshots < 3 {
            return Err("need at least 3 snapshots for time differences".into());
        }
        if let Some(u) = &self.u_terminal {
            u.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum HarnackKindCfg {
    Trace,
    Matrix,
    Dim2,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PotentialCfg {
    Zero,
    Cigar,
    Expander,
}

/// `harnack`: pointwise quadratic evaluations on an analytic background.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HarnackCfg {
    pub kind: HarnackKindCfg,
    pub background: BackgroundCfg,
    #[serde(default)]
    pub rho0: f64,
    #[serde(default = "static_dir")]
    pub direction: QModeCfg,
    pub time: f64,
    pub reference_time: f64,
    pub points: Vec<[f64; 2]>,
    /// Direction for the trace/dim2 forms and `V` for the matrix form:
    /// chart components, normalized in the metric.
    #[serde(default = "axis_x")]
    pub v_dir: [f64; 2],
    /// `U` for the matrix form, normalized then scaled by `u_scale`.
    #[serde(default = "axis_y")]
    pub u_dir: [f64; 2],
    #[serde(default)]
    pub u_scale: f64,
    #[serde(default)]
    pub potential: Option<PotentialCfg>,
    /// `T_min` for the expander potential.
    #[serde(default)]
    pub t_min: f64,
}

fn static_dir() -> QModeCfg {
    QModeCfg::Static
}
fn axis_x() -> [f64; 2] {
    [1.0, 0.0]
}
fn axis_y() -> [f64; 2] {
    [0.0, 1.0]
}

impl HarnackCfg {
    pub fn validate(&self) -> Result<(), String> {
        if self.points.is_empty() {
            return Err("points must be non-empty".into());
        }
        if !(self.time < self.reference_time) {
            return Err(format!(
                "need time < reference_time (tau > 0), got {} vs {}",
                self.time, self.reference_time
            ));
        }
        if self.background == BackgroundCfg::RoundSphere && !(self.rho0 > 0.0) {
            return Err("round_sphere needs rho0 > 0".into());
        }
        if self.background == BackgroundCfg::ConformalTorus {
            return Err("harnack runs on analytic backgrounds".into());
        }
        if self.v_dir == [0.0, 0.0] {
            return Err("v_dir must be nonzero".into());
        }
        if matches!(self.potential, Some(PotentialCfg::Expander)) && self.time <= self.t_min {
            return Err(format!(
                "expander potential needs time > t_min, got {} vs {}",
                self.time, self.t_min
            ));
        }
        Ok(())
    }
}

/// `solitons`: randomized sign audit of the soliton trace term.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonsCfg {
    #[serde(default = "default_soliton_samples")]
    pub samples: usize,
}

fn default_soliton_samples() -> usize {
    1000
}

impl SolitonsCfg {
    pub fn validate(&self) -> Result<(), String> {
        if self.samples == 0 {
            return Err("samples must be >= 1".into());
        }
        Ok(())
    }
}
