//! Conjugate heat equation `u_t = -Delta u + K u` along a metric trajectory.
//!
//! The backward-in-t problem is integrated in the well-posed direction
//! `tau = t1 - t`: `u_tau = Delta_{g(t)} u - K u`, from terminal data at `t1`
//! down to `t0`, with the metric interpolated linearly in `phi` between
//! snapshots. Spatially constant data on exact families reduces to closed
//! forms and is reproduced exactly.

use crate::error::FlowError;
use crate::flows::{AmbientFlowConfig, FlowTrajectory, KMode, UField};
use crate::geometry::background::BackgroundKind;
use crate::geometry::grid::{Grid2, StencilOrder};
use crate::geometry::metricfield::MetricField;

/// Terminal data for the conjugate solve.
#[derive(Clone, Debug)]
pub enum UTerminal {
    Const(f64),
    /// `base + amp cos(k x)`
    CosineX { base: f64, amp: f64, k: f64 },
    Grid(Grid2),
}

impl UTerminal {
    fn min_value(&self) -> f64 {
        match self {
            UTerminal::Const(c) => *c,
            UTerminal::CosineX { base, amp, .. } => base - amp.abs(),
            UTerminal::Grid(g) => g.min(),
        }
    }
}

/// Solve for `u` at every snapshot time of `traj`; entry `i` matches
/// `traj.snapshots[i]`.
pub fn conjugate_heat_solve(
    traj: &FlowTrajectory,
    terminal: &UTerminal,
    k_mode: KMode,
) -> Result<Vec<UField>, FlowError> {
    if traj.snapshots.len() < 2 {
        return Err(FlowError::InsufficientSnapshots { t: traj.t1() });
    }
    if terminal.min_value() <= 0.0 {
        return Err(FlowError::PositivityLoss {
            t: traj.t1(),
            min_u: terminal.min_value(),
        });
    }

    // closed-form routes on exact families
    if let Some(bg) = &traj.family {
        match (bg.kind, terminal) {
            (BackgroundKind::RoundSphere, UTerminal::Const(c)) => {
                return Ok(sphere_constant_solution(traj, *c, k_mode));
            }
            (BackgroundKind::FlatTorus | BackgroundKind::FlatPlane, UTerminal::Const(c)) => {
                // flat static: R = 0, so K = 0 in every mode; u stays constant
                return Ok(traj.snapshots.iter().map(|_| UField::Const(*c)).collect());
            }
            (BackgroundKind::FlatTorus, UTerminal::CosineX { base, amp, k }) => {
                // exact mode decay e^{-k^2 (t1 - t)}
                let t1 = traj.t1();
                return Ok(traj
                    .snapshots
                    .iter()
                    .map(|s| UField::CosineX {
                        base: *base,
                        amp: amp * (-(k * k) * (t1 - s.t)).exp(),
                        k: *k,
                    })
                    .collect());
            }
            (BackgroundKind::RoundSphere, _) => {
                return Err(FlowError::InvalidConfig(
                    "sphere-family heat solve supports spatially constant terminal data only"
                        .into(),
                ));
            }
            (BackgroundKind::Cigar | BackgroundKind::GaussianExpander, _) => {
                return Err(FlowError::InvalidConfig(
                    "conjugate heat solve needs a compact ambient".into(),
                ));
            }
            _ => {}
        }
    }

    grid_solve(traj, terminal, k_mode)
}

/// `d(log u)/dt = K(t)` with `K = c_r R(t)` on the round sphere; integrates in
/// closed form since `R = 2 / rho^2(t)` has an elementary antiderivative.
fn sphere_constant_solution(traj: &FlowTrajectory, c: f64, k_mode: KMode) -> Vec<UField> {
    let bg = traj.family.as_ref().unwrap();
    let cr = k_mode.r_coefficient(traj.q_mode);
    let sign = match bg.direction {
        crate::geometry::background::FlowDirection::Ricci => -1.0,
        crate::geometry::background::FlowDirection::BackwardRicci => 1.0,
        crate::geometry::background::FlowDirection::Static => 0.0,
    };
    let t1 = traj.t1();
    traj.snapshots
        .iter()
        .map(|s| {
            // antiderivative of R: sign * ln rho^2(t) (static: R t)
            let a = |t: f64| -> f64 {
                let rho2 = bg.rho2(t).expect("validated range");
                if sign == 0.0 {
                    (2.0 / rho2) * t
                } else {
                    sign * rho2.ln()
                }
            };
            let log_u = c.ln() + cr * (a(s.t) - a(t1));
            UField::Const(log_u.exp())
        })
        .collect()
}

struct GridMetricView<'a> {
    traj: &'a FlowTrajectory,
    static_flat: Option<(usize, usize, f64, f64)>,
}

impl<'a> GridMetricView<'a> {
    fn phi_at_time(&self, t: f64) -> Result<Grid2, FlowError> {
        if let Some((nx, ny, lx, ly)) = self.static_flat {
            return Ok(Grid2::constant(nx, ny, lx, ly, 0.0));
        }
        match self.traj.metric_at_time(t)? {
            MetricField::Grid(m) => Ok(m.phi),
            _ => Err(FlowError::InvalidConfig(
                "conjugate heat grid solve needs grid or flat-torus snapshots".into(),
            )),
        }
    }
}

fn grid_solve(
    traj: &FlowTrajectory,
    terminal: &UTerminal,
    k_mode: KMode,
) -> Result<Vec<UField>, FlowError> {
    // figure out the grid shape
    let shape = match &traj.snapshots[0].metric {
        MetricField::Grid(m) => (m.phi.nx, m.phi.ny, m.phi.lx, m.phi.ly),
        MetricField::FlatTorus { lx, ly } => match terminal {
            UTerminal::Grid(g) => (g.nx, g.ny, *lx, *ly),
            _ => (64, 64, *lx, *ly),
        },
        _ => {
            return Err(FlowError::InvalidConfig(
                "conjugate heat grid solve needs grid or flat-torus snapshots".into(),
            ))
        }
    };
    let view = GridMetricView {
        traj,
        static_flat: match &traj.snapshots[0].metric {
            MetricField::FlatTorus { lx, ly } => Some((shape.0, shape.1, *lx, *ly)),
            _ => None,
        },
    };

    let mut u = match terminal {
        UTerminal::Const(c) => Grid2::constant(shape.0, shape.1, shape.2, shape.3, *c),
        UTerminal::CosineX { base, amp, k } => {
            Grid2::from_fn(shape.0, shape.1, shape.2, shape.3, |x, _| {
                base + amp * (k * x).cos()
            })
        }
        UTerminal::Grid(g) => {
            if (g.nx, g.ny) != (shape.0, shape.1) {
                return Err(FlowError::InvalidConfig(format!(
                    "terminal grid {}x{} does not match metric grid {}x{}",
                    g.nx, g.ny, shape.0, shape.1
                )));
            }
            g.clone()
        }
    };

    let cr = k_mode.r_coefficient(traj.q_mode);
    let rate = |u: &Grid2, phi: &Grid2| -> Grid2 {
        // u_tau = e^{-2 phi} Delta0 u - c_r R u, R = -2 e^{-2 phi} Delta0 phi
        let lap_u = u.laplacian(StencilOrder::Two);
        let lap_phi = phi.laplacian(StencilOrder::Two);
        let mut out = u.clone();
        for idx in 0..out.data().len() {
            let e = (-2.0 * phi.data()[idx]).exp();
            let r = -2.0 * e * lap_phi.data()[idx];
            out.data_mut()[idx] = e * lap_u.data()[idx] - cr * r * u.data()[idx];
        }
        out
    };

    let n = traj.snapshots.len();
    let mut fields: Vec<Option<UField>> = vec![None; n];
    fields[n - 1] = Some(UField::Grid(u.clone()));

    // march tau = t1 - t forward, interval by interval
    for i in (0..n - 1).rev() {
        let ta = traj.snapshots[i].t;
        let tb = traj.snapshots[i + 1].t;
        let span = tb - ta;
        let phi_probe = view.phi_at_time(tb)?;
        let bound = AmbientFlowConfig::stability_bound(&phi_probe);
        let substeps = (span / bound).ceil().max(1.0) as usize;
        let dt = span / substeps as f64;
        for s in 0..substeps {
            let t_here = tb - dt * s as f64;
            let phi_mid = view.phi_at_time(t_here - 0.5 * dt)?;
            let phi_here = view.phi_at_time(t_here)?;
            let k1 = rate(&u, &phi_here);
            let mid = u.zip(&k1, |a, b| a + 0.5 * dt * b);
            let k2 = rate(&mid, &phi_mid);
            u = u.zip(&k2, |a, b| a + dt * b);
        }
        let min_u = u.min();
        if min_u <= 0.0 {
            return Err(FlowError::PositivityLoss { t: ta, min_u });
        }
        fields[i] = Some(UField::Grid(u.clone()));
    }

    Ok(fields.into_iter().map(|f| f.unwrap()).collect())
}
