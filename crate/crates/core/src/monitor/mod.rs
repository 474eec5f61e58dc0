//! The monotonicity quantity, its exact balance decomposition, mass
//! integrals, soliton trace terms and the three Harnack quadratics.
//!
//! For a curve in a surface the monitored quantity is
//! `Theta = tau^{(m-n)/2} int_gamma u ds` and its time derivative splits as
//!
//! ```text
//! dTheta/dt = termA + termB + termC
//! termA = -tau^p int |k + d_nu f|^2 e^{-f} ds          (p = (m-n)/2, f = -log u)
//! termB =  tau^p int (hess_nunu f + Q(nu,nu) - 1/(2 tau)) e^{-f} ds
//! termC =  tau^p int (K - tr Q) e^{-f} ds
//! ```
//!
//! The records report each term by quadrature and `dTheta/dt` by central
//! differences, so the residual measures the discrete validity of the
//! balance identity.

use crate::error::MonitorError;
use crate::flows::{FlowTrajectory, KMode, QMode, UField};
use crate::geometry::curve::CurveState;
use crate::geometry::grid::{Grid2, StencilOrder};
use crate::geometry::metricfield::MetricField;
use crate::tensor::calculus::{hessian, ricci, riemann_lower};
use crate::tensor::fields::{CovDeriv, RicciOf, ScalarCurvOf, TensorMap};
use crate::tensor::metric::{CigarChart, MetricMap, ScalarMap, SphereChart};

/// One time sample of the monotonicity balance.
#[derive(Clone, Copy, Debug)]
pub struct MonotonicityRecord {
    pub t: f64,
    pub tau: f64,
    pub theta: f64,
    pub dtheta_dt: f64,
    pub term_a: f64,
    pub term_b: f64,
    pub term_c: f64,
    pub residual: f64,
}

/// Pointwise Harnack evaluation, as emitted by reports.
#[derive(Clone, Copy, Debug)]
pub struct HarnackSample {
    pub location: [f64; 2],
    pub t: f64,
    pub tau: f64,
    pub kind: HarnackKind,
    /// `nu` for the trace and dim-2 forms, `V` for the matrix form.
    pub v_dir: [f64; 2],
    /// `U` for the matrix form; zero otherwise.
    pub u_dir: [f64; 2],
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarnackKind {
    LyhTrace,
    Matrix,
    Dim2,
}

impl HarnackKind {
    pub fn name(&self) -> &'static str {
        match self {
            HarnackKind::LyhTrace => "lyh_trace",
            HarnackKind::Matrix => "matrix_4_2",
            HarnackKind::Dim2 => "dim2",
        }
    }
}

/// A run bundle: metric trajectory with `u`, plus aligned curve states.
pub struct RunBundle<'a> {
    pub traj: &'a FlowTrajectory,
    pub curves: &'a [CurveState],
    /// Ambient dimension (2 for every discretized run).
    pub m: usize,
    /// Submanifold dimension (1 for curves).
    pub n: usize,
    /// Reference time `T` in `tau = T - t`.
    pub reference_time: f64,
    pub k_mode: KMode,
}

// -- potential (f = -log u) evaluation ---------------------------------------

struct PotentialEval<'a> {
    metric: &'a MetricField,
    u: &'a UField,
    f_grid: Option<Grid2>,
}

impl<'a> PotentialEval<'a> {
    fn new(metric: &'a MetricField, u: &'a UField) -> Result<Self, MonitorError> {
        let min_u = u.min_value();
        if min_u <= 0.0 {
            return Err(MonitorError::NonpositiveU(min_u));
        }
        let f_grid = match u {
            UField::Grid(g) => Some(g.map(|v| -v.ln())),
            _ => None,
        };
        Ok(PotentialEval { metric, u, f_grid })
    }

    /// `(u, df, hess f)` at `p`, the Hessian covariant in the metric.
    fn at(&self, p: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let uval = self.u.value_at(p);
        let (df, d2f) = match self.u {
            UField::Const(_) => ([0.0, 0.0], [[0.0, 0.0], [0.0, 0.0]]),
            UField::CosineX { base, amp, k } => {
                let u = base + amp * (k * p[0]).cos();
                let ux = -amp * k * (k * p[0]).sin();
                let uxx = -amp * k * k * (k * p[0]).cos();
                // f = -ln u
                let fx = -ux / u;
                let fxx = -uxx / u + (ux / u) * (ux / u);
                ([fx, 0.0], [[fxx, 0.0], [0.0, 0.0]])
            }
            UField::Grid(_) => {
                let f = self.f_grid.as_ref().unwrap();
                let df = [
                    f.bilinear_of(p, |i, j| f.dx_at(i, j, StencilOrder::Four)),
                    f.bilinear_of(p, |i, j| f.dy_at(i, j, StencilOrder::Four)),
                ];
                let d2f = [
                    [
                        f.bilinear_of(p, |i, j| f.dxx_at(i, j, StencilOrder::Four)),
                        f.bilinear_of(p, |i, j| f.dxy_at(i, j, StencilOrder::Four)),
                    ],
                    [
                        f.bilinear_of(p, |i, j| f.dxy_at(i, j, StencilOrder::Four)),
                        f.bilinear_of(p, |i, j| f.dyy_at(i, j, StencilOrder::Four)),
                    ],
                ];
                (df, d2f)
            }
        };
        // covariant correction
        let gam = self.metric.christoffel_at(p);
        let mut hess = d2f;
        for a in 0..2 {
            for b in 0..2 {
                for k in 0..2 {
                    hess[a][b] -= gam[k][a][b] * df[k];
                }
            }
        }
        (uval, df, hess)
    }
}

// -- Theta and the balance ----------------------------------------------------

/// `Theta = tau^{(m-n)/2} int_gamma u ds`.
pub fn theta(
    curve: &CurveState,
    metric: &MetricField,
    u: &UField,
    tau: f64,
    m: usize,
    n: usize,
) -> Result<f64, MonitorError> {
    if tau <= 0.0 {
        return Err(MonitorError::NonpositiveTau(tau));
    }
    let min_u = u.min_value();
    if min_u <= 0.0 {
        return Err(MonitorError::NonpositiveU(min_u));
    }
    let samples: Vec<f64> = curve.vertices().iter().map(|v| u.value_at(*v)).collect();
    let integral = curve.integral(metric, &samples)?;
    Ok(tau.powf((m - n) as f64 / 2.0) * integral)
}

/// Balance records at every interior snapshot of the bundle.
pub fn monotonicity_balance(bundle: &RunBundle) -> Result<Vec<MonotonicityRecord>, MonitorError> {
    let traj = bundle.traj;
    if bundle.curves.len() != traj.snapshots.len() {
        return Err(MonitorError::GridMismatch(format!(
            "{} curve states vs {} snapshots",
            bundle.curves.len(),
            traj.snapshots.len()
        )));
    }
    for (c, s) in bundle.curves.iter().zip(&traj.snapshots) {
        if (c.t - s.t).abs() > 1e-9 * (1.0 + s.t.abs()) {
            return Err(MonitorError::GridMismatch(format!(
                "curve at t = {} vs snapshot at t = {}",
                c.t, s.t
            )));
        }
    }
    let p_exp = (bundle.m - bundle.n) as f64 / 2.0;
    let q_sign = traj.q_mode.q_sign();
    let k_coef = bundle.k_mode.r_coefficient(traj.q_mode);

    let n_snap = traj.snapshots.len();
    let mut thetas = Vec::with_capacity(n_snap);
    let mut terms = Vec::with_capacity(n_snap);
    for (snap, curve) in traj.snapshots.iter().zip(bundle.curves) {
        let tau = bundle.reference_time - snap.t;
        if tau <= 0.0 {
            return Err(MonitorError::NonpositiveTau(tau));
        }
        let u = snap
            .u
            .as_ref()
            .ok_or_else(|| MonitorError::GridMismatch("snapshot carries no u field".into()))?;
        let pot = PotentialEval::new(&snap.metric, u)?;
        let geo = curve.geometry(&snap.metric)?;

        let mut int_u = 0.0;
        let mut int_a = 0.0;
        let mut int_b = 0.0;
        let mut int_c = 0.0;
        for (i, v) in curve.vertices().iter().enumerate() {
            let (uval, df, hess) = pot.at(*v);
            let nu = geo.normal[i];
            let ds = geo.ds[i];
            let k = geo.curvature[i];
            let dfnu = df[0] * nu[0] + df[1] * nu[1];
            let hess_nn = hess[0][0] * nu[0] * nu[0]
                + 2.0 * hess[0][1] * nu[0] * nu[1]
                + hess[1][1] * nu[1] * nu[1];
            let r = snap.metric.scalar_curvature_at(*v);
            let g = snap.metric.metric_at(*v);
            let nu_norm2 =
                g[0][0] * nu[0] * nu[0] + 2.0 * g[0][1] * nu[0] * nu[1] + g[1][1] * nu[1] * nu[1];
            let q_nn = q_sign * 0.5 * r * nu_norm2;
            let k_val = k_coef * r;
            let tr_q = q_sign * r;
            int_u += uval * ds;
            int_a += -(k + dfnu) * (k + dfnu) * uval * ds;
            int_b += (hess_nn + q_nn - 0.5 / tau) * uval * ds;
            int_c += (k_val - tr_q) * uval * ds;
        }
        let scale = tau.powf(p_exp);
        thetas.push(scale * int_u);
        terms.push((scale * int_a, scale * int_b, scale * int_c, tau, snap.t));
    }

    let mut records = Vec::with_capacity(n_snap.saturating_sub(2));
    for i in 1..n_snap - 1 {
        let dt2 = traj.snapshots[i + 1].t - traj.snapshots[i - 1].t;
        let dtheta = (thetas[i + 1] - thetas[i - 1]) / dt2;
        let (a, b, c, tau, t) = terms[i];
        records.push(MonotonicityRecord {
            t,
            tau,
            theta: thetas[i],
            dtheta_dt: dtheta,
            term_a: a,
            term_b: b,
            term_c: c,
            residual: dtheta - (a + b + c),
        });
    }
    Ok(records)
}

/// `int_M u dV` per snapshot; compact ambients only.
pub fn mass_integral(traj: &FlowTrajectory) -> Result<Vec<(f64, f64)>, MonitorError> {
    let mut out = Vec::with_capacity(traj.snapshots.len());
    for snap in &traj.snapshots {
        let u = snap
            .u
            .as_ref()
            .ok_or_else(|| MonitorError::GridMismatch("snapshot carries no u field".into()))?;
        let mass = match (&snap.metric, u) {
            (MetricField::Grid(m), _) => {
                let cell = m.phi.hx() * m.phi.hy();
                let mut acc = 0.0;
                for j in 0..m.phi.ny {
                    for i in 0..m.phi.nx {
                        let x = i as f64 * m.phi.hx();
                        let y = j as f64 * m.phi.hy();
                        acc += u.value_at([x, y]) * (2.0 * m.phi.node(i, j)).exp();
                    }
                }
                acc * cell
            }
            (MetricField::FlatTorus { lx, ly }, UField::Grid(g)) => {
                g.sum() * g.hx() * g.hy() * (lx * ly / (g.lx * g.ly))
            }
            (MetricField::FlatTorus { lx, ly }, UField::Const(c)) => c * lx * ly,
            (MetricField::FlatTorus { lx, ly }, UField::CosineX { base, .. }) => {
                // the cosine integrates to zero over whole periods
                base * lx * ly
            }
            (MetricField::Sphere { rho2 }, UField::Const(c)) => {
                c * 4.0 * std::f64::consts::PI * rho2
            }
            (MetricField::Sphere { .. }, _) => {
                return Err(MonitorError::GridMismatch(
                    "sphere mass integral needs spatially constant u".into(),
                ))
            }
            (m, _) => {
                return Err(MonitorError::NoncompactAmbient(m.kind_name().into()));
            }
        };
        out.push((snap.t, mass));
    }
    Ok(out)
}

// -- soliton trace term --------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonKind {
    Expanding,
    Steady,
    Shrinking,
}

impl SolitonKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolitonKind::Expanding => "expanding",
            SolitonKind::Steady => "steady",
            SolitonKind::Shrinking => "shrinking",
        }
    }
}

/// Normal trace of the soliton identity:
/// `((m-n)/2) (1/(T_ext - t) - 1/(T - t))` for expanding/shrinking families
/// and `((m-n)/2) (-1/(T - t))` for steady ones.
pub fn soliton_trace_term(
    kind: SolitonKind,
    m: usize,
    n: usize,
    t: f64,
    reference_time: f64,
    t_ext: f64,
) -> Result<f64, MonitorError> {
    let bad = |detail: String| MonitorError::InvalidTimeOrdering {
        kind: kind.name().into(),
        detail,
    };
    if t >= reference_time {
        return Err(bad(format!("need t < T, got t = {t}, T = {reference_time}")));
    }
    let half = (m as f64 - n as f64) / 2.0;
    match kind {
        SolitonKind::Expanding => {
            if t <= t_ext {
                return Err(bad(format!("need t > T_min = {t_ext}, got t = {t}")));
            }
            Ok(half * (1.0 / (t_ext - t) - 1.0 / (reference_time - t)))
        }
        SolitonKind::Steady => Ok(half * (-1.0 / (reference_time - t))),
        SolitonKind::Shrinking => {
            if t >= t_ext {
                return Err(bad(format!("need t < T_max = {t_ext}, got t = {t}")));
            }
            Ok(half * (1.0 / (t_ext - t) - 1.0 / (reference_time - t)))
        }
    }
}

// -- Harnack quadratics ----------------------------------------------------------

/// Where the potential `f` of a trace evaluation comes from.
pub enum PotentialRef<'a> {
    Zero,
    /// `f = -log u`.
    FromU(&'a UField),
    /// Gaussian expander potential at time `t`.
    Expander { t_min: f64, t: f64 },
    /// Cigar potential `-log(1 + r^2)`.
    Cigar,
}

/// Trace form for curves in surfaces:
/// `hess_nunu f + q_sign Ric(nu, nu) - 1/(2 tau)`.
pub fn harnack_trace(
    metric: &MetricField,
    f: &PotentialRef,
    p: [f64; 2],
    nu: [f64; 2],
    tau: f64,
    q_mode: QMode,
) -> Result<f64, MonitorError> {
    if tau <= 0.0 {
        return Err(MonitorError::NonpositiveTau(tau));
    }
    let hess_nn = match f {
        PotentialRef::Zero => 0.0,
        PotentialRef::FromU(u) => {
            let pot = PotentialEval::new(metric, u)?;
            let (_, _, hess) = pot.at(p);
            hess[0][0] * nu[0] * nu[0] + 2.0 * hess[0][1] * nu[0] * nu[1]
                + hess[1][1] * nu[1] * nu[1]
        }
        PotentialRef::Expander { t_min, t } => {
            // hess f = g / (2 (T_min - t)) on the flat plane
            let g = metric.metric_at(p);
            let nn = g[0][0] * nu[0] * nu[0] + 2.0 * g[0][1] * nu[0] * nu[1]
                + g[1][1] * nu[1] * nu[1];
            nn / (2.0 * (t_min - t))
        }
        PotentialRef::Cigar => {
            let h = hessian(&CigarChart, &crate::tensor::metric::CigarPotential, p);
            h[0][0] * nu[0] * nu[0] + 2.0 * h[0][1] * nu[0] * nu[1] + h[1][1] * nu[1] * nu[1]
        }
    };
    let ric = metric.ricci_at(p);
    let ric_nn =
        ric[0][0] * nu[0] * nu[0] + 2.0 * ric[0][1] * nu[0] * nu[1] + ric[1][1] * nu[1] * nu[1];
    Ok(hess_nn + q_mode.q_sign() * ric_nn - 0.5 / tau)
}

/// Matrix quadratic
/// `[hess R + 2 Ric^2 + Ric/tau](V,V) - 2 (nabla_k Ric)(V,V) U^k + 2 R_{ipjq} V^i U^p V^j U^q`.
/// No sign is assumed; the value is reported raw.
pub fn harnack_matrix(
    metric: &MetricField,
    p: [f64; 2],
    v: [f64; 2],
    u_dir: [f64; 2],
    tau: f64,
) -> f64 {
    let (hess_r, covric, ric, rl, gi) = match metric {
        MetricField::FlatPlane | MetricField::FlatTorus { .. } => (
            [[0.0; 2]; 2],
            [[[0.0; 2]; 2]; 2],
            [[0.0; 2]; 2],
            [[[[0.0; 2]; 2]; 2]; 2],
            [[1.0, 0.0], [0.0, 1.0]],
        ),
        MetricField::Sphere { rho2 } => {
            let chart = SphereChart { rho2: *rho2 };
            let g = chart.eval(p);
            let gi = crate::tensor::calculus::invert(&g);
            (
                [[0.0; 2]; 2],
                [[[0.0; 2]; 2]; 2],
                ricci(&chart, p),
                riemann_lower(&chart, p),
                gi,
            )
        }
        MetricField::Cigar => {
            let chart = CigarChart;
            let g = chart.eval(p);
            let gi = crate::tensor::calculus::invert(&g);
            let rfield = ScalarCurvOf(&chart);
            let hess_r = hessian(&chart, &rfield, p);
            let ricf = RicciOf(&chart);
            let cr = CovDeriv::new(&chart, &ricf).eval(p);
            let mut covric = [[[0.0; 2]; 2]; 2];
            for k in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        covric[k][a][b] = cr[k * 4 + a * 2 + b];
                    }
                }
            }
            (hess_r, covric, ricci(&chart, p), riemann_lower(&chart, p), gi)
        }
        MetricField::Grid(m) => {
            let ctx = crate::tensor::evolution::GridCtx::new(m);
            let (i, j) = ctx.nearest_node(p);
            let e2p = ctx.e2p.node(i, j);
            let r0 = ctx.r.node(i, j);
            let gm = [[e2p, 0.0], [0.0, e2p]];
            let gi = [[1.0 / e2p, 0.0], [0.0, 1.0 / e2p]];
            let grad_r = ctx.cov_deriv(std::slice::from_ref(&ctx.r), 0);
            let hess_r_g = ctx.cov_deriv(&grad_r, 1);
            let hess_r = [
                [hess_r_g[0].node(i, j), hess_r_g[1].node(i, j)],
                [hess_r_g[2].node(i, j), hess_r_g[3].node(i, j)],
            ];
            let ric_g = ctx.ricci_grids();
            let ric_comps = [
                ric_g[0].clone(),
                ric_g[1].clone(),
                ric_g[1].clone(),
                ric_g[2].clone(),
            ];
            let covric_g = ctx.cov_deriv(&ric_comps, 2);
            let mut covric = [[[0.0; 2]; 2]; 2];
            for k in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        covric[k][a][b] = covric_g[k * 4 + a * 2 + b].node(i, j);
                    }
                }
            }
            let ric = [
                [ric_g[0].node(i, j), ric_g[1].node(i, j)],
                [ric_g[1].node(i, j), ric_g[2].node(i, j)],
            ];
            let mut rl = [[[[0.0; 2]; 2]; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            rl[a][b][c][d] =
                                0.5 * r0 * (gm[a][c] * gm[b][d] - gm[a][d] * gm[b][c]);
                        }
                    }
                }
            }
            (hess_r, covric, ric, rl, gi)
        }
    };

    let mut val = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut ric_sq = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    ric_sq += gi[a][b] * ric[i][a] * ric[b][j];
                }
            }
            val += (hess_r[i][j] + 2.0 * ric_sq + ric[i][j] / tau) * v[i] * v[j];
            for k in 0..2 {
                val -= 2.0 * covric[k][i][j] * u_dir[k] * v[i] * v[j];
            }
        }
    }
    for i in 0..2 {
        for pp in 0..2 {
            for j in 0..2 {
                for q in 0..2 {
                    val += 2.0 * rl[i][pp][j][q] * v[i] * u_dir[pp] * v[j] * u_dir[q];
                }
            }
        }
    }
    val
}

/// Dimension-2 quadratic `hess_nunu log R + R/2 + 1/(2 tau)`; needs `R > 0`.
pub fn dim2_harnack(
    metric: &MetricField,
    p: [f64; 2],
    nu: [f64; 2],
    tau: f64,
) -> Result<f64, MonitorError> {
    if tau <= 0.0 {
        return Err(MonitorError::NonpositiveTau(tau));
    }
    let r = metric.scalar_curvature_at(p);
    if r <= 0.0 {
        return Err(MonitorError::NonpositiveCurvature(r));
    }
    let hess_nn = match metric {
        MetricField::FlatPlane | MetricField::FlatTorus { .. } => unreachable!("R = 0 rejected"),
        MetricField::Sphere { .. } => 0.0, // R spatially constant
        MetricField::Cigar => {
            struct CigarLogR;
            impl ScalarMap<2> for CigarLogR {
                fn eval<T: crate::dual::Real>(&self, x: [T; 2]) -> T {
                    (T::cst(4.0) / (T::cst(1.0) + x[0] * x[0] + x[1] * x[1])).ln()
                }
            }
            let h = hessian(&CigarChart, &CigarLogR, p);
            h[0][0] * nu[0] * nu[0] + 2.0 * h[0][1] * nu[0] * nu[1] + h[1][1] * nu[1] * nu[1]
        }
        MetricField::Grid(m) => {
            // log R on nodes, covariant Hessian by stencils
            let r4 = m.scalar_curvature_grid(StencilOrder::Four);
            if r4.min() <= 0.0 {
                return Err(MonitorError::NonpositiveCurvature(r4.min()));
            }
            let logr = r4.map(|v| v.ln());
            let df = [
                logr.bilinear_of(p, |i, j| logr.dx_at(i, j, StencilOrder::Four)),
                logr.bilinear_of(p, |i, j| logr.dy_at(i, j, StencilOrder::Four)),
            ];
            let mut hess = [
                [
                    logr.bilinear_of(p, |i, j| logr.dxx_at(i, j, StencilOrder::Four)),
                    logr.bilinear_of(p, |i, j| logr.dxy_at(i, j, StencilOrder::Four)),
                ],
                [
                    logr.bilinear_of(p, |i, j| logr.dxy_at(i, j, StencilOrder::Four)),
                    logr.bilinear_of(p, |i, j| logr.dyy_at(i, j, StencilOrder::Four)),
                ],
            ];
            let gam = metric.christoffel_at(p);
            for a in 0..2 {
                for b in 0..2 {
                    for k in 0..2 {
                        hess[a][b] -= gam[k][a][b] * df[k];
                    }
                }
            }
            hess[0][0] * nu[0] * nu[0] + 2.0 * hess[0][1] * nu[0] * nu[1]
                + hess[1][1] * nu[1] * nu[1]
        }
    };
    Ok(hess_nn + 0.5 * r + 0.5 / tau)
}
