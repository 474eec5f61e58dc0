//! Scenario runners: each builds its run, writes the CSV next to a JSON
//! summary, and reports pass/fail against its thresholds.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::path::Path;

use flowlab_core::error::FlowError;
use flowlab_core::flows::{
    conjugate_heat_solve, curve_flow_run, ricci_flow_run, sphere_family, static_family,
    AmbientFlowConfig, FlowTrajectory, KMode, QMode, UTerminal,
};
use flowlab_core::geometry::{
    AnalyticBackground, ConformalTorus, CurveState, Grid2, MetricField, StencilOrder,
};
use flowlab_core::monitor::{
    dim2_harnack, harnack_matrix, harnack_trace, mass_integral, monotonicity_balance,
    soliton_trace_term, HarnackKind, HarnackSample, PotentialRef, RunBundle, SolitonKind,
};
use flowlab_core::tensor::checks::ledger_suite;
use flowlab_core::tensor::evolution::check_flow_evolutions;

use crate::config::*;
use crate::report::*;
use crate::CliError;

fn flow_err(e: FlowError) -> CliError {
    match e {
        FlowError::BlowUp { .. }
        | FlowError::Instability { .. }
        | FlowError::PositivityLoss { .. }
        | FlowError::CurveCollapse { .. } => CliError::Numerical(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn monitor_err(e: flowlab_core::error::MonitorError) -> CliError {
    use flowlab_core::error::MonitorError::*;
    match e {
        NonpositiveU(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

// ---------------------------------------------------------------- identities

pub fn run_verify_identities(
    cfg: &VerifyIdentitiesCfg,
    out: &Path,
    seed: u64,
) -> Result<serde_json::Value, CliError> {
    let paths = out_paths(out, "verify-identities")?;
    // fan out over metrics; each chunk is deterministic in (seed, index)
    let chunks: Vec<Vec<flowlab_core::tensor::CheckSample>> = (0..cfg.metrics)
        .into_par_iter()
        .map(|i| {
            let mut samples = ledger_suite(cfg.dim, 1, cfg.points_per_metric, seed ^ (i as u64) << 8);
            for s in samples.iter_mut() {
                s.point_index += i * cfg.points_per_metric;
            }
            samples
        })
        .collect();
    let mut rows = Vec::new();
    for chunk in chunks {
        for s in chunk {
            rows.push(IdentityRow {
                check_name: s.name.to_string(),
                dim: s.dim,
                point_index: s.point_index,
                residual: s.residual,
            });
        }
    }
    write_csv(&paths.csv, &rows)?;

    let mut per_check = serde_json::Map::new();
    for name in flowlab_core::tensor::checks::LEDGER_CHECK_NAMES {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.check_name == name)
            .map(|r| r.residual)
            .collect();
        let max = vals.iter().cloned().fold(0.0_f64, f64::max);
        let mean = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
        per_check.insert(
            name.to_string(),
            json!({"max_residual": max, "mean_residual": mean, "pass": max <= cfg.tolerance}),
        );
    }
    let max_all = rows.iter().map(|r| r.residual).fold(0.0_f64, f64::max);
    let summary = json!({
        "scenario": "verify-identities",
        "seed": seed,
        "config": serde_json::to_value(cfg).unwrap(),
        "checks": serde_json::Value::Object(per_check),
        "max_residual": max_all,
        "mean_residual": rows.iter().map(|r| r.residual).sum::<f64>() / rows.len() as f64,
        "pass": max_all <= cfg.tolerance,
    });
    write_summary(&paths.summary, &summary)?;
    Ok(summary)
}

// ------------------------------------------------------------------ run-flow

fn random_phi(n: usize, lx: f64, ly: f64, offset: f64, amp: f64, modes: usize, seed: u64) -> Grid2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for _ in 0..modes {
        let kx = rng.gen_range(0..=2) as f64;
        let ky = rng.gen_range(0..=2) as f64;
        let (kx, ky) = if kx == 0.0 && ky == 0.0 { (1.0, 0.0) } else { (kx, ky) };
        terms.push((amp * rng.gen_range(-1.0..1.0_f64), kx, ky, rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    Grid2::from_fn(n, n, lx, ly, |x, y| {
        offset
            + terms
                .iter()
                .map(|(c, kx, ky, ph)| c * (kx * x + ky * y + ph).cos())
                .sum::<f64>()
    })
}

fn build_trajectory(cfg: &RunFlowCfg, seed: u64) -> Result<FlowTrajectory, CliError> {
    match cfg.background {
        BackgroundCfg::ConformalTorus => {
            let phi = random_phi(
                cfg.grid_n,
                cfg.lx,
                cfg.ly,
                cfg.phi_offset,
                cfg.phi_amplitude,
                cfg.phi_modes,
                seed,
            );
            let init = ConformalTorus::new(phi, cfg.t0).map_err(|e| CliError::Validation(e.to_string()))?;
            let fc = AmbientFlowConfig {
                q_mode: cfg.q_mode.into(),
                k_mode: cfg.k_mode.into(),
                reference_time: cfg.reference_time,
                t0: cfg.t0,
                t1: cfg.t1,
                dt: cfg.dt,
                snapshot_stride: cfg.snapshot_stride,
            };
            ricci_flow_run(&init, &fc).map_err(flow_err)
        }
        BackgroundCfg::RoundSphere => {
            let n_snaps = (((cfg.t1 - cfg.t0) / (cfg.dt * cfg.snapshot_stride as f64)).round() as usize).max(2);
            sphere_family(cfg.rho0, cfg.q_mode.into(), (cfg.t0, cfg.t1), n_snaps).map_err(flow_err)
        }
        _ => Err(CliError::Validation(
            "run-flow supports conformal_torus or round_sphere".into(),
        )),
    }
}

pub fn run_flow(cfg: &RunFlowCfg, out: &Path, seed: u64) -> Result<serde_json::Value, CliError> {
    let paths = out_paths(out, "run-flow")?;
    let traj = build_trajectory(cfg, seed)?;
    let traj = if let Some(u) = &cfg.u_terminal {
        let fields = conjugate_heat_solve(&traj, &u.to_core(), cfg.k_mode.into()).map_err(flow_err)?;
        traj.with_u(fields)
    } else {
        traj
    };

    let mut rows = Vec::new();
    for s in &traj.snapshots {
        let (max_phi, max_r) = match &s.metric {
            MetricField::Grid(m) => (
                m.phi.max_abs(),
                m.scalar_curvature_grid(StencilOrder::Two).max_abs(),
            ),
            MetricField::Sphere { rho2 } => (0.0, 2.0 / rho2),
            _ => (0.0, 0.0),
        };
        let (mass, min_u) = match &s.u {
            Some(u) => {
                let single = FlowTrajectory {
                    snapshots: vec![s.clone()],
                    q_mode: traj.q_mode,
                    provenance: traj.provenance,
                    family: traj.family.clone(),
                };
                let m = mass_integral(&single).map_err(monitor_err)?[0].1;
                (m, u.min_value())
            }
            None => (f64::NAN, f64::NAN),
        };
        rows.push(FlowRow {
            t: s.t,
            tau: cfg.reference_time - s.t,
            max_abs_phi: max_phi,
            max_abs_r: max_r,
            mass,
            min_u,
        });
    }
    write_csv(&paths.csv, &rows)?;

    // probe the evolution laws mid-run
    let mid_t = 0.5 * (cfg.t0 + cfg.t1);
    let probe = [cfg.lx * 0.31, cfg.ly * 0.62];
    let evo = check_flow_evolutions(&traj, probe, mid_t).map_err(flow_err)?;
    let mass_drift = if cfg.u_terminal.is_some() {
        let m_ref = rows.last().unwrap().mass;
        rows.iter()
            .map(|r| (r.mass - m_ref).abs() / m_ref.abs())
            .fold(0.0_f64, f64::max)
    } else {
        f64::NAN
    };

    let summary = json!({
        "scenario": "run-flow",
        "seed": seed,
        "config": serde_json::to_value(cfg).unwrap(),
        "snapshots": traj.snapshots.len(),
        "evolution_residuals": {
            "ricci": evo.ricci,
            "scalar": evo.scalar,
            "christoffel": evo.christoffel,
            "probe_t": mid_t,
        },
        "mass_drift": mass_drift,
        "pass": evo.max() <= 1e-2,
    });
    write_summary(&paths.summary, &summary)?;
    Ok(summary)
}

// -------------------------------------------------------------- monotonicity

pub fn run_monotonicity(
    cfg: &MonotonicityCfg,
    out: &Path,
    seed: u64,
) -> Result<serde_json::Value, CliError> {
    let paths = out_paths(out, "monotonicity")?;
    let tau = std::f64::consts::TAU;

    let (traj, k_mode): (FlowTrajectory, KMode) = match cfg.preset {
        MonotonicityPreset::FlatStaticExact => {
            let bg = AnalyticBackground::flat_torus(tau, tau);
            let traj = static_family(&bg, (cfg.t0, cfg.t1), cfg.snapshots).map_err(flow_err)?;
            let terminal = cfg
                .u_terminal
                .clone()
                .unwrap_or(UTerminalCfg::Cosine {
                    base: 1.0,
                    amp: 0.5,
                    k: 1.0,
                });
            let u = conjugate_heat_solve(&traj, &terminal.to_core(), KMode::Zero).map_err(flow_err)?;
            (traj.with_u(u), KMode::Zero)
        }
        MonotonicityPreset::SphereSoliton => {
            let traj = sphere_family(
                cfg.rho0,
                flowlab_core::geometry::FlowDirection::Ricci,
                (cfg.t0, cfg.t1),
                cfg.snapshots,
            )
            .map_err(flow_err)?;
            let c = if cfg.c_scale > 0.0 { cfg.c_scale } else { 1.0 };
            let u = conjugate_heat_solve(&traj, &UTerminal::Const(c), KMode::ScalarCurvature)
                .map_err(flow_err)?;
            (traj.with_u(u), KMode::ScalarCurvature)
        }
        MonotonicityPreset::SphereBackwardR => {
            let traj = sphere_family(
                cfg.rho0,
                flowlab_core::geometry::FlowDirection::BackwardRicci,
                (cfg.t0, cfg.t1),
                cfg.snapshots,
            )
            .map_err(flow_err)?;
            let r1 = 2.0 / (cfg.rho0 * cfg.rho0 + 2.0 * cfg.t1);
            let u = conjugate_heat_solve(&traj, &UTerminal::Const(r1), KMode::TraceQ)
                .map_err(flow_err)?;
            (traj.with_u(u), KMode::TraceQ)
        }
        MonotonicityPreset::TorusNumeric => {
            let phi = random_phi(cfg.grid_n, tau, tau, cfg.phi_offset, cfg.phi_amplitude, 3, seed);
            let init =
                ConformalTorus::new(phi, cfg.t0).map_err(|e| CliError::Validation(e.to_string()))?;
            let fc = AmbientFlowConfig {
                q_mode: QMode::Ricci,
                k_mode: KMode::TraceQ,
                reference_time: cfg.reference_time,
                t0: cfg.t0,
                t1: cfg.t1,
                dt: cfg.dt,
                snapshot_stride: cfg.snapshot_stride,
            };
            let traj = ricci_flow_run(&init, &fc).map_err(flow_err)?;
            let u = conjugate_heat_solve(
                &traj,
                &cfg.u_terminal.as_ref().unwrap().to_core(),
                KMode::TraceQ,
            )
            .map_err(flow_err)?;
            (traj.with_u(u), KMode::TraceQ)
        }
    };

    let m0 = traj.snapshots[0].metric.clone();
    let gamma0 = match cfg.curve {
        CurveCfg::Circle {
            center,
            radius,
            vertices,
        } => CurveState::circle(center, radius, vertices, cfg.t0, &m0),
        CurveCfg::Latitude { angle, vertices } => {
            CurveState::latitude(angle, vertices, cfg.t0, &m0)
        }
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;

    let run = curve_flow_run(&traj, &gamma0).map_err(flow_err)?;
    if let Some(t) = run.collapsed_at {
        return Err(CliError::Numerical(format!(
            "curve collapsed at t = {t}; partial trajectory not reported"
        )));
    }
    let bundle = RunBundle {
        traj: &traj,
        curves: &run.states,
        m: 2,
        n: 1,
        reference_time: cfg.reference_time,
        k_mode,
    };
    let records = monotonicity_balance(&bundle).map_err(monitor_err)?;
    let rows: Vec<MonotonicityRow> = records
        .iter()
        .map(|r| MonotonicityRow {
            t: r.t,
            tau: r.tau,
            theta: r.theta,
            dtheta_dt: r.dtheta_dt,
            term_a: r.term_a,
            term_b: r.term_b,
            term_c: r.term_c,
            residual: r.residual,
        })
        .collect();
    write_csv(&paths.csv, &rows)?;

    let rel_residual = records
        .iter()
        .map(|r| {
            r.residual.abs() / (r.term_a.abs() + r.term_b.abs() + r.term_c.abs()).max(1e-9)
        })
        .fold(0.0_f64, f64::max);
    let threshold = match cfg.preset {
        MonotonicityPreset::TorusNumeric => 0.03,
        _ => 0.01,
    };
    let max_term_b = records.iter().map(|r| r.term_b.abs()).fold(0.0_f64, f64::max);
    let max_dtheta = records
        .iter()
        .map(|r| r.dtheta_dt)
        .fold(f64::NEG_INFINITY, f64::max);
    let nonincreasing = records.windows(2).all(|w| w[1].theta <= w[0].theta + 1e-12);

    let mut extra = serde_json::Map::new();
    if cfg.preset == MonotonicityPreset::SphereBackwardR {
        // dim2 quadratic along the run
        let mut min_dim2 = f64::INFINITY;
        for (snap, curve) in traj.snapshots.iter().zip(&run.states) {
            let geo = curve
                .geometry(&snap.metric)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            for (v, nu) in curve.vertices().iter().zip(&geo.normal) {
                let val = dim2_harnack(&snap.metric, *v, *nu, cfg.reference_time - snap.t)
                    .map_err(monitor_err)?;
                min_dim2 = min_dim2.min(val);
            }
        }
        extra.insert("min_dim2_harnack".into(), json!(min_dim2));
        extra.insert("theta_nonincreasing".into(), json!(nonincreasing));
    }

    let summary = json!({
        "scenario": "monotonicity",
        "seed": seed,
        "config": serde_json::to_value(cfg).unwrap(),
        "records": rows.len(),
        "max_relative_residual": rel_residual,
        "threshold": threshold,
        "max_abs_term_b": max_term_b,
        "max_dtheta_dt": max_dtheta,
        "extras": serde_json::Value::Object(extra),
        "pass": rel_residual <= threshold,
    });
    write_summary(&paths.summary, &summary)?;
    Ok(summary)
}

// ------------------------------------------------------------------- harnack

fn normalize_in(metric: &MetricField, p: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    let g = metric.metric_at(p);
    let n2 = g[0][0] * v[0] * v[0] + 2.0 * g[0][1] * v[0] * v[1] + g[1][1] * v[1] * v[1];
    let n = n2.sqrt();
    [v[0] / n, v[1] / n]
}

pub fn run_harnack(cfg: &HarnackCfg, out: &Path, seed: u64) -> Result<serde_json::Value, CliError> {
    let paths = out_paths(out, "harnack")?;
    let metric = match cfg.background {
        BackgroundCfg::FlatPlane => MetricField::FlatPlane,
        BackgroundCfg::FlatTorus => MetricField::FlatTorus {
            lx: std::f64::consts::TAU,
            ly: std::f64::consts::TAU,
        },
        BackgroundCfg::Cigar => MetricField::Cigar,
        BackgroundCfg::RoundSphere => {
            let bg = AnalyticBackground::round_sphere(cfg.rho0, cfg.direction.into());
            bg.slice(cfg.time)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        BackgroundCfg::ConformalTorus => {
            return Err(CliError::Validation(
                "harnack runs on analytic backgrounds".into(),
            ))
        }
    };
    let tau = cfg.reference_time - cfg.time;
    let mut samples: Vec<HarnackSample> = Vec::new();
    for p in &cfg.points {
        let v_unit = normalize_in(&metric, *p, cfg.v_dir);
        let (kind, u_dir, value) = match cfg.kind {
            HarnackKindCfg::Trace => {
                let pot = match cfg.potential.unwrap_or(PotentialCfg::Zero) {
                    PotentialCfg::Zero => PotentialRef::Zero,
                    PotentialCfg::Cigar => PotentialRef::Cigar,
                    PotentialCfg::Expander => PotentialRef::Expander {
                        t_min: cfg.t_min,
                        t: cfg.time,
                    },
                };
                let v = harnack_trace(&metric, &pot, *p, v_unit, tau, cfg.direction.into())
                    .map_err(monitor_err)?;
                (HarnackKind::LyhTrace, [0.0, 0.0], v)
            }
            HarnackKindCfg::Matrix => {
                let u_unit = if cfg.u_scale == 0.0 {
                    [0.0, 0.0]
                } else {
                    let u = normalize_in(&metric, *p, cfg.u_dir);
                    [u[0] * cfg.u_scale, u[1] * cfg.u_scale]
                };
                (
                    HarnackKind::Matrix,
                    u_unit,
                    harnack_matrix(&metric, *p, v_unit, u_unit, tau),
                )
            }
            HarnackKindCfg::Dim2 => {
                let v = dim2_harnack(&metric, *p, v_unit, tau).map_err(monitor_err)?;
                (HarnackKind::Dim2, [0.0, 0.0], v)
            }
        };
        samples.push(HarnackSample {
            location: *p,
            t: cfg.time,
            tau,
            kind,
            v_dir: v_unit,
            u_dir,
            value,
        });
    }
    let rows: Vec<HarnackRow> = samples
        .iter()
        .map(|s| HarnackRow {
            t: s.t,
            point_x: s.location[0],
            point_y: s.location[1],
            kind: s.kind.name(),
            value: s.value,
        })
        .collect();
    write_csv(&paths.csv, &rows)?;
    let min = rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({
        "scenario": "harnack",
        "seed": seed,
        "config": serde_json::to_value(cfg).unwrap(),
        "samples": rows.len(),
        "min_value": min,
        "max_value": max,
        "pass": true,
    });
    write_summary(&paths.summary, &summary)?;
    Ok(summary)
}

// ------------------------------------------------------------------ solitons

pub fn run_solitons(cfg: &SolitonsCfg, out: &Path, seed: u64) -> Result<serde_json::Value, CliError> {
    let paths = out_paths(out, "solitons")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut violations = 0usize;
    for i in 0..cfg.samples {
        let kind = match i % 3 {
            0 => SolitonKind::Expanding,
            1 => SolitonKind::Steady,
            _ => SolitonKind::Shrinking,
        };
        let m = rng.gen_range(2..=6usize);
        let n = rng.gen_range(1..m);
        let (t, t_ref, t_ext) = match kind {
            SolitonKind::Expanding => {
                let t_min = rng.gen_range(-2.0..1.0);
                let t = t_min + rng.gen_range(0.01..3.0);
                (t, t + rng.gen_range(0.01..3.0), t_min)
            }
            SolitonKind::Steady => {
                let t = rng.gen_range(-3.0..3.0);
                (t, t + rng.gen_range(0.01..4.0), 0.0)
            }
            SolitonKind::Shrinking => {
                let t_max = rng.gen_range(-1.0..2.0);
                let t = t_max - rng.gen_range(0.01..4.0);
                let t_ref = t_max - rng.gen_range(0.0..(t_max - t));
                (t, t_ref, t_max)
            }
        };
        if t >= t_ref {
            continue;
        }
        let value = soliton_trace_term(kind, m, n, t, t_ref, t_ext).map_err(monitor_err)?;
        let sign_ok = match kind {
            SolitonKind::Expanding | SolitonKind::Steady => value < 0.0,
            SolitonKind::Shrinking => value <= 1e-14,
        };
        if !sign_ok {
            violations += 1;
        }
        rows.push(SolitonRow {
            kind: kind.name(),
            m,
            n,
            t,
            reference_time: t_ref,
            t_ext,
            value,
            sign_ok,
        });
    }
    write_csv(&paths.csv, &rows)?;
    let summary = json!({
        "scenario": "solitons",
        "seed": seed,
        "config": serde_json::to_value(cfg).unwrap(),
        "samples": rows.len(),
        "violations": violations,
        "pass": violations == 0,
    });
    write_summary(&paths.summary, &summary)?;
    Ok(summary)
}
