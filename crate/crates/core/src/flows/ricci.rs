//! Ambient metric runs: the conformal-factor PDE and exact families.
//!
//! In the conformal chart `g = e^{2 phi} delta`, `g_t = -2Q` becomes
//! `phi_t = -R/2` (Ricci), `phi_t = +R/2` (backward Ricci), with
//! `R = -2 e^{-2 phi} Delta0 phi`. Stepping is explicit RK2 (midpoint).

use crate::error::FlowError;
use crate::geometry::background::{AnalyticBackground, BackgroundKind, FlowDirection};
use crate::geometry::conformal::ConformalTorus;
use crate::geometry::grid::{Grid2, StencilOrder};
use crate::geometry::metricfield::MetricField;
use crate::flows::{
    AmbientFlowConfig, FlowTrajectory, Provenance, QMode, Snapshot,
};

fn phi_rate(phi: &Grid2, q_sign: f64) -> Grid2 {
    // phi_t = -q_sign * R / 2, R = -2 e^{-2 phi} Delta0 phi
    let lap = phi.laplacian(StencilOrder::Two);
    lap.zip(phi, |l, p| q_sign * (-2.0 * p).exp() * l)
}

/// Integrate the conformal metric flow from `initial` over `[t0, t1]`.
pub fn ricci_flow_run(
    initial: &ConformalTorus,
    cfg: &AmbientFlowConfig,
) -> Result<FlowTrajectory, FlowError> {
    cfg.validate()?;
    let bound = AmbientFlowConfig::stability_bound(&initial.phi);
    if cfg.dt > bound {
        return Err(FlowError::UnstableStep {
            dt: cfg.dt,
            bound,
        });
    }
    let q_sign = cfg.q_mode.q_sign();

    // uniform steps landing exactly on t1, snapshot count a multiple of stride
    let span = cfg.t1 - cfg.t0;
    let mut n_steps = (span / cfg.dt - 1e-12).ceil().max(1.0) as usize;
    n_steps = n_steps.div_ceil(cfg.snapshot_stride) * cfg.snapshot_stride;
    let dt = span / n_steps as f64;

    let mut phi = initial.phi.clone();
    let mut snapshots = Vec::with_capacity(n_steps / cfg.snapshot_stride + 1);
    snapshots.push(Snapshot {
        t: cfg.t0,
        metric: MetricField::Grid(ConformalTorus::new(phi.clone(), cfg.t0)?),
        u: None,
    });

    let r_cap = 1.0 / (10.0 * dt);
    for step in 0..n_steps {
        let t = cfg.t0 + dt * step as f64;
        if q_sign != 0.0 {
            let k1 = phi_rate(&phi, q_sign);
            let mid = phi.zip(&k1, |p, k| p + 0.5 * dt * k);
            let k2 = phi_rate(&mid, q_sign);
            let next = phi.zip(&k2, |p, k| p + dt * k);

            let change = next.zip(&phi, |a, b| a - b).max_abs();
            if change > 1.0 {
                return Err(FlowError::Instability { t, change });
            }
            phi = next;
            if phi.max_abs() > 10.0 {
                return Err(FlowError::BlowUp {
                    t,
                    detail: format!("max|phi| = {:.3}", phi.max_abs()),
                });
            }
        }
        if (step + 1).is_multiple_of(cfg.snapshot_stride) {
            let ts = cfg.t0 + dt * (step + 1) as f64;
            let snap = ConformalTorus::new(phi.clone(), ts)?;
            let r_max = snap.scalar_curvature_grid(StencilOrder::Two).max_abs();
            if r_max > r_cap {
                return Err(FlowError::BlowUp {
                    t: ts,
                    detail: format!("max|R| = {r_max:.3e} exceeds 1/(10 dt)"),
                });
            }
            snapshots.push(Snapshot {
                t: ts,
                metric: MetricField::Grid(snap),
                u: None,
            });
        }
    }

    Ok(FlowTrajectory {
        snapshots,
        q_mode: cfg.q_mode,
        provenance: Provenance::Numeric,
        family: None,
    })
}

/// Exact round-sphere family sampled at `n_snapshots + 1` uniform times.
pub fn sphere_family(
    rho0: f64,
    direction: FlowDirection,
    t_range: (f64, f64),
    n_snapshots: usize,
) -> Result<FlowTrajectory, FlowError> {
    let bg = AnalyticBackground::round_sphere(rho0, direction);
    // validate the whole range up front
    bg.rho2(t_range.0)?;
    bg.rho2(t_range.1)?;
    let mut snapshots = Vec::with_capacity(n_snapshots + 1);
    for i in 0..=n_snapshots {
        let t = t_range.0 + (t_range.1 - t_range.0) * i as f64 / n_snapshots as f64;
        snapshots.push(Snapshot {
            t,
            metric: bg.slice(t)?,
            u: None,
        });
    }
    Ok(FlowTrajectory {
        snapshots,
        q_mode: direction.into(),
        provenance: Provenance::ExactFamily,
        family: Some(bg),
    })
}

/// Constant-in-time family for a static background.
pub fn static_family(
    background: &AnalyticBackground,
    t_range: (f64, f64),
    n_snapshots: usize,
) -> Result<FlowTrajectory, FlowError> {
    debug_assert!(matches!(
        background.direction,
        FlowDirection::Static
    ) || matches!(background.kind, BackgroundKind::FlatPlane | BackgroundKind::FlatTorus));
    let mut snapshots = Vec::with_capacity(n_snapshots + 1);
    for i in 0..=n_snapshots {
        let t = t_range.0 + (t_range.1 - t_range.0) * i as f64 / n_snapshots as f64;
        snapshots.push(Snapshot {
            t,
            metric: background.slice(t)?,
            u: None,
        });
    }
    Ok(FlowTrajectory {
        snapshots,
        q_mode: QMode::Static,
        provenance: Provenance::ExactFamily,
        family: Some(background.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::KMode;
    use std::f64::consts::TAU;

    fn cfg(t1: f64, dt: f64, stride: usize, q: QMode) -> AmbientFlowConfig {
        AmbientFlowConfig {
            q_mode: q,
            k_mode: KMode::TraceQ,
            reference_time: t1 + 1.0,
            t0: 0.0,
            t1,
            dt,
            snapshot_stride: stride,
        }
    }

    #[test]
    fn flat_torus_is_a_fixed_point() {
        let init =
            ConformalTorus::new(Grid2::constant(32, 32, TAU, TAU, 0.0), 0.0).unwrap();
        let traj = ricci_flow_run(&init, &cfg(0.01, 1e-3, 2, QMode::Ricci)).unwrap();
        for s in &traj.snapshots {
            if let MetricField::Grid(m) = &s.metric {
                assert!(m.phi.max_abs() < 1e-15);
            } else {
                panic!("expected grid metric");
            }
        }
    }

    #[test]
    fn unstable_dt_is_rejected() {
        let init =
            ConformalTorus::new(Grid2::constant(32, 32, TAU, TAU, 0.0), 0.0).unwrap();
        let bad = cfg(0.1, 1.0, 1, QMode::Ricci);
        assert!(matches!(
            ricci_flow_run(&init, &bad),
            Err(FlowError::UnstableStep { .. })
        ));
    }

    #[test]
    fn sup_r_nonincreasing_on_ricci_run() {
        // smoothing property of the discrete run, cross-checked at two resolutions
        for n in [64usize, 128] {
            let phi = Grid2::from_fn(n, n, TAU, TAU, |x, _| 0.1 * x.sin());
            let init = ConformalTorus::new(phi, 0.0).unwrap();
            let dt = 0.5 * AmbientFlowConfig::stability_bound(&init.phi);
            let traj = ricci_flow_run(&init, &cfg(0.2, dt, 50, QMode::Ricci)).unwrap();
            let mut last = f64::INFINITY;
            for s in &traj.snapshots {
                if let MetricField::Grid(m) = &s.metric {
                    let sup = m.scalar_curvature_grid(StencilOrder::Two).max_abs();
                    assert!(sup <= last + 1e-12, "sup|R| grew: {sup} > {last}");
                    last = sup;
                }
            }
        }
    }

    #[test]
    fn sup_r_nonincreasing_unit_time_reference_resolution() {
        let n = 256;
        let phi = Grid2::from_fn(n, n, TAU, TAU, |x, _| 0.1 * x.sin());
        let init = ConformalTorus::new(phi, 0.0).unwrap();
        let dt = 0.95 * AmbientFlowConfig::stability_bound(&init.phi);
        let traj = ricci_flow_run(&init, &cfg(1.0, dt, 2000, QMode::Ricci)).unwrap();
        let mut last = f64::INFINITY;
        for s in &traj.snapshots {
            if let MetricField::Grid(m) = &s.metric {
                let sup = m.scalar_curvature_grid(StencilOrder::Two).max_abs();
                assert!(sup <= last + 1e-12, "sup|R| grew at t = {}", s.t);
                last = sup;
            }
        }
    }

    #[test]
    fn backward_undoes_forward_to_first_order() {
        let n = 64;
        let phi = Grid2::from_fn(n, n, TAU, TAU, |x, y| 0.05 * x.sin() + 0.05 * y.cos());
        let init = ConformalTorus::new(phi.clone(), 0.0).unwrap();
        let dt = 0.5 * AmbientFlowConfig::stability_bound(&init.phi);
        let fwd = ricci_flow_run(&init, &cfg(0.02, dt, 1, QMode::Ricci)).unwrap();
        let last = match &fwd.snapshots.last().unwrap().metric {
            MetricField::Grid(m) => m.phi.clone(),
            _ => unreachable!(),
        };
        let back = ricci_flow_run(
            &ConformalTorus::new(last, 0.0).unwrap(),
            &cfg(0.02, dt, 1, QMode::BackwardRicci),
        )
        .unwrap();
        let recovered = match &back.snapshots.last().unwrap().metric {
            MetricField::Grid(m) => m.phi.clone(),
            _ => unreachable!(),
        };
        let err = recovered.zip(&phi, |a, b| a - b).max_abs();
        assert!(err < 5.0 * dt, "round trip error {err:.3e} vs dt {dt:.3e}");
    }

    #[test]
    fn sphere_family_radius_and_curvature() {
        // rho0 = sqrt(2), Ricci: rho^2 = 2(1 - t), R = 1/(1 - t)
        let traj = sphere_family(2.0_f64.sqrt(), FlowDirection::Ricci, (0.0, 0.5), 10).unwrap();
        for s in &traj.snapshots {
            if let MetricField::Sphere { rho2 } = s.metric {
                assert!((rho2 - 2.0 * (1.0 - s.t)).abs() < 1e-12);
                let r = s.metric.scalar_curvature_at([0.7, 0.1]);
                assert!((r - 1.0 / (1.0 - s.t)).abs() < 1e-12);
            } else {
                panic!("expected sphere");
            }
        }
        // backward: rho^2 = 2 + 2t
        let traj = sphere_family(2.0_f64.sqrt(), FlowDirection::BackwardRicci, (0.0, 1.0), 4)
            .unwrap();
        for s in &traj.snapshots {
            if let MetricField::Sphere { rho2 } = s.metric {
                assert!((rho2 - (2.0 + 2.0 * s.t)).abs() < 1e-12);
            }
        }
        // exhausted sphere is rejected
        assert!(sphere_family(1.0, FlowDirection::Ricci, (0.0, 0.6), 3).is_err());
    }

    #[test]
    fn static_direction_gives_constant_family() {
        let traj = sphere_family(1.5, FlowDirection::Static, (0.0, 2.0), 5).unwrap();
        for s in &traj.snapshots {
            if let MetricField::Sphere { rho2 } = s.metric {
                assert_eq!(rho2, 2.25);
            }
        }
    }

    #[test]
    fn backward_flow_of_rough_data_trips_the_guards() {
        // anti-diffusion amplifies the k = 16 mode like e^{256 t}; the
        // instability or blow-up guard must fire, not return garbage
        let n = 64;
        let phi = Grid2::from_fn(n, n, TAU, TAU, |x, _| 0.2 * (16.0 * x).cos());
        let init = ConformalTorus::new(phi, 0.0).unwrap();
        let dt = 0.9 * AmbientFlowConfig::stability_bound(&init.phi);
        let r = ricci_flow_run(&init, &cfg(0.5, dt, 5, QMode::BackwardRicci));
        assert!(
            matches!(
                r,
                Err(FlowError::Instability { .. }) | Err(FlowError::BlowUp { .. })
            ),
            "expected a guard to fire, got {r:?}"
        );
    }
}
