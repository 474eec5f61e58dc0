//! Curve shortening inside the (possibly moving) ambient metric.
//!
//! Explicit step `x <- x + dt k nu` with the geodesic curvature of the
//! current metric snapshot, then uniform-in-arclength resampling to the
//! original vertex count. On the round-sphere family a latitude circle
//! reduces exactly to `d theta / dt = -cot(theta) / rho(t)^2`, integrated
//! with RK4.

use crate::error::FlowError;
use crate::flows::FlowTrajectory;
use crate::geometry::background::BackgroundKind;
use crate::geometry::curve::{CurveKind, CurveState};

/// Result of a curve run: one state per ambient snapshot time, stopping early
/// on collapse.
#[derive(Clone, Debug)]
pub struct CurveRun {
    pub states: Vec<CurveState>,
    /// Set when the flow stopped before the end of the trajectory.
    pub collapsed_at: Option<f64>,
}

/// Curve substep factor: dt = CURVE_DT_FACTOR * (min edge)^2, safely inside
/// the stability bound 0.2 (min edge)^2; explicit Euler is first order, so the
/// margin also buys accuracy.
const CURVE_DT_FACTOR: f64 = 0.05;

/// Threshold: the flow stops once total length < 10 eps_edge.
fn collapsed(len: f64, eps_edge: f64) -> bool {
    len < 10.0 * eps_edge
}

pub fn curve_flow_run(
    traj: &FlowTrajectory,
    gamma0: &CurveState,
) -> Result<CurveRun, FlowError> {
    if traj.snapshots.len() < 2 {
        return Err(FlowError::InsufficientSnapshots { t: traj.t0() });
    }
    // exact latitude reduction on the sphere family
    if let (Some(bg), CurveKind::Latitude { theta0 }) = (&traj.family, gamma0.kind) {
        if bg.kind == BackgroundKind::RoundSphere {
            return latitude_run(traj, gamma0, theta0);
        }
    }
    polyline_run(traj, gamma0)
}

fn latitude_run(
    traj: &FlowTrajectory,
    gamma0: &CurveState,
    theta0: f64,
) -> Result<CurveRun, FlowError> {
    let bg = traj.family.as_ref().unwrap();
    let n = gamma0.len();
    let rate = |theta: f64, t: f64| -> f64 {
        let rho2 = bg.rho2(t).expect("range validated by trajectory");
        -1.0 / theta.tan() / rho2
    };
    let mut theta = theta0;
    let mut states = Vec::with_capacity(traj.snapshots.len());
    let mut collapsed_at = None;
    states.push(gamma0.with_vertices(gamma0.vertices().to_vec(), traj.t0()));

    'outer: for w in traj.snapshots.windows(2) {
        let (ta, tb) = (w[0].t, w[1].t);
        // RK4 with substeps bounded by the curvature scale
        let span = tb - ta;
        let substeps = ((span * 50.0 / bg.rho2(ta).unwrap()).ceil() as usize).max(4);
        let dt = span / substeps as f64;
        for s in 0..substeps {
            let t = ta + dt * s as f64;
            let k1 = rate(theta, t);
            let k2 = rate(theta + 0.5 * dt * k1, t + 0.5 * dt);
            let k3 = rate(theta + 0.5 * dt * k2, t + 0.5 * dt);
            let k4 = rate(theta + dt * k3, t + dt);
            theta += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let rho2 = bg.rho2(t + dt)?;
            let len = std::f64::consts::TAU * rho2.sqrt() * theta.sin();
            if !(0.0..std::f64::consts::PI).contains(&theta) || collapsed(len, gamma0.eps_edge) {
                collapsed_at = Some(t + dt);
                break 'outer;
            }
        }
        let metric = traj.metric_at_time(tb)?;
        let lat = CurveState::latitude(theta, n, tb, &metric)?;
        states.push(lat.with_vertices(lat.vertices().to_vec(), tb));
    }

    Ok(CurveRun {
        states,
        collapsed_at,
    })
}

fn polyline_run(traj: &FlowTrajectory, gamma0: &CurveState) -> Result<CurveRun, FlowError> {
    let mut curve = gamma0.with_vertices(gamma0.vertices().to_vec(), traj.t0());
    let mut states = Vec::with_capacity(traj.snapshots.len());
    states.push(curve.clone());
    let mut collapsed_at = None;

    'outer: for w in traj.snapshots.windows(2) {
        let (ta, tb) = (w[0].t, w[1].t);
        let mut t = ta;
        while t < tb - 1e-15 {
            let metric = traj.metric_at_time(t)?;
            let edges = curve.edge_lengths(&metric);
            let min_edge = edges.iter().cloned().fold(f64::INFINITY, f64::min);
            let total: f64 = edges.iter().sum();
            if collapsed(total, curve.eps_edge) {
                collapsed_at = Some(t);
                break 'outer;
            }
            let dt = (CURVE_DT_FACTOR * min_edge * min_edge).min(tb - t);
            let geo = curve.geometry(&metric)?;
            let verts: Vec<[f64; 2]> = curve
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    [
                        v[0] + dt * geo.curvature[i] * geo.normal[i][0],
                        v[1] + dt * geo.curvature[i] * geo.normal[i][1],
                    ]
                })
                .collect();
            curve = curve.with_vertices(verts, t + dt).resampled_uniform(&metric);
            t += dt;
        }
        curve = curve.with_vertices(curve.vertices().to_vec(), tb);
        states.push(curve.clone());
    }

    Ok(CurveRun {
        states,
        collapsed_at,
    })
}
