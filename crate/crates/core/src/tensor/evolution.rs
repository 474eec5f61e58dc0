//! Evolution-equation audits along flow trajectories.
//!
//! Time derivatives come from central differences across stored snapshots
//! (closed forms on exact families); the spatial sides are rebuilt on each
//! snapshot with 4th-order stencils, so the reported residual measures how
//! well the discrete trajectory satisfies the continuous evolution laws.

use crate::error::FlowError;
use crate::flows::{FlowTrajectory, Provenance, QMode, UField};
use crate::geometry::background::{BackgroundKind, FlowDirection};
use crate::geometry::conformal::{christoffel_conformal, ConformalTorus};
use crate::geometry::grid::{Grid2, StencilOrder};
use crate::geometry::metricfield::MetricField;
use crate::tensor::checks::{h_evolution_rhs, HEvolutionInputs};
use crate::FlowMode;

/// Relative residuals of the three evolution laws at a point.
#[derive(Clone, Copy, Debug)]
pub struct FlowEvolutionResiduals {
    pub ricci: f64,
    pub scalar: f64,
    pub christoffel: f64,
}

impl FlowEvolutionResiduals {
    pub fn max(&self) -> f64 {
        self.ricci.max(self.scalar).max(self.christoffel)
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale < 1e-13 {
        diff
    } else {
        diff / scale
    }
}

/// Covariant machinery on one conformal snapshot (4th-order stencils).
pub(crate) struct GridCtx {
    pub phi: Grid2,
    pub phix: Grid2,
    pub phiy: Grid2,
    pub e2p: Grid2,
    pub r: Grid2,
}

impl GridCtx {
    pub fn new(m: &ConformalTorus) -> Self {
        let phix = m.phi.dx(StencilOrder::Four);
        let phiy = m.phi.dy(StencilOrder::Four);
        let e2p = m.phi.map(|p| (2.0 * p).exp());
        let r = m.scalar_curvature_grid(StencilOrder::Four);
        GridCtx {
            phi: m.phi.clone(),
            phix,
            phiy,
            e2p,
            r,
        }
    }

    pub fn nearest_node(&self, p: [f64; 2]) -> (usize, usize) {
        let q = self.phi.wrap(p);
        let i = (q[0] / self.phi.hx()).round() as usize % self.phi.nx;
        let j = (q[1] / self.phi.hy()).round() as usize % self.phi.ny;
        (i, j)
    }

    pub fn gamma_at(&self, i: isize, j: isize) -> [[[f64; 2]; 2]; 2] {
        let nx = self.phi.nx as isize;
        let ny = self.phi.ny as isize;
        let iu = i.rem_euclid(nx) as usize;
        let ju = j.rem_euclid(ny) as usize;
        christoffel_conformal(self.phix.node(iu, ju), self.phiy.node(iu, ju))
    }

    /// Ricci component grids `(R/2) e^{2 phi} delta_ij`: `[ric_xx, ric_xy, ric_yy]`.
    pub fn ricci_grids(&self) -> [Grid2; 3] {
        let diag = self.r.zip(&self.e2p, |r, e| 0.5 * r * e);
        let zero = self.r.map(|_| 0.0);
        [diag.clone(), zero, diag]
    }

    /// Covariant derivative of a rank-`rank` tensor given by component grids
    /// (row-major index order). Output has the new derivative index first.
    pub fn cov_deriv(&self, comps: &[Grid2], rank: usize) -> Vec<Grid2> {
        let n = comps.len();
        debug_assert_eq!(n, 1 << rank);
        let mut out = Vec::with_capacity(2 * n);
        for k in 0..2usize {
            for c in 0..n {
                let mut g = comps[c].clone();
                for jj in 0..self.phi.ny {
                    for ii in 0..self.phi.nx {
                        let (i, j) = (ii as isize, jj as isize);
                        let mut v = if k == 0 {
                            comps[c].dx_at(i, j, StencilOrder::Four)
                        } else {
                            comps[c].dy_at(i, j, StencilOrder::Four)
                        };
                        let gam = self.gamma_at(i, j);
                        // subtract Gamma^s_{k, i_slot} T_{..s..}
                        for slot in 0..rank {
                            let shift = rank - 1 - slot;
                            let islot = (c >> shift) & 1;
                            for s in 0..2usize {
                                let cs = (c & !(1 << shift)) | (s << shift);
                                v -= gam[s][k][islot] * comps[cs].node(ii, jj);
                            }
                        }
                        *g.node_mut(ii, jj) = v;
                    }
                }
                out.push(g);
            }
        }
        out
    }

    /// Rough Laplacian of a rank-`rank` field at a node:
    /// `e^{-2 phi} (cov_xx + cov_yy)` of each component.
    pub fn rough_laplacian(&self, comps: &[Grid2], rank: usize) -> Vec<Grid2> {
        let c1 = self.cov_deriv(comps, rank);
        let c2 = self.cov_deriv(&c1, rank + 1);
        let n = comps.len();
        let mut out = Vec::with_capacity(n);
        for c in 0..n {
            // indices (k, l, I): k*2^(rank+1) + l*2^rank + c
            let xx = &c2[c];
            let yy = &c2[(1 << (rank + 1)) + (1 << rank) + c];
            out.push(
                xx.zip(yy, |a, b| a + b)
                    .zip(&self.e2p, |s, e| s / e),
            );
        }
        out
    }
}

fn grid_of(metric: &MetricField) -> Option<&ConformalTorus> {
    match metric {
        MetricField::Grid(m) => Some(m),
        _ => None,
    }
}

/// Residuals of the Ric / R / Christoffel evolution laws at `(p, t)`.
pub fn check_flow_evolutions(
    traj: &FlowTrajectory,
    p: [f64; 2],
    t: f64,
) -> Result<FlowEvolutionResiduals, FlowError> {
    // closed-form route for exact families
    if traj.provenance == Provenance::ExactFamily {
        return exact_family_evolutions(traj, t);
    }
    let mid = traj.bracket(t)?;
    let (sm, s0, sp) = (
        &traj.snapshots[mid - 1],
        &traj.snapshots[mid],
        &traj.snapshots[mid + 1],
    );
    let (gm_, g0, gp) = match (grid_of(&sm.metric), grid_of(&s0.metric), grid_of(&sp.metric)) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => {
            return Err(FlowError::InvalidConfig(
                "numeric evolution check needs grid snapshots".into(),
            ))
        }
    };
    let dt2 = sp.t - sm.t;
    let q_sign = traj.q_mode.q_sign();

    let ctx_m = GridCtx::new(gm_);
    let ctx_0 = GridCtx::new(g0);
    let ctx_p = GridCtx::new(gp);
    let (i, j) = ctx_0.nearest_node(p);
    let (iz, jz) = (i as isize, j as isize);

    // scalar curvature law: d_t R = q_sign (Delta R + 2 |Ric|^2), |Ric|^2 = R^2/2
    let dtr = (ctx_p.r.node(i, j) - ctx_m.r.node(i, j)) / dt2;
    let lap_r = ctx_0.rough_laplacian(std::slice::from_ref(&ctx_0.r), 0)[0].node(i, j);
    let r0 = ctx_0.r.node(i, j);
    let rhs_r = q_sign * (lap_r + r0 * r0);
    let res_r = rel((dtr - rhs_r).abs(), dtr.abs().max(rhs_r.abs()));

    // Ricci law componentwise; symmetric storage is [xx, xy, yy]
    let ric_m = ctx_m.ricci_grids();
    let ric_p = ctx_p.ricci_grids();
    let ric_0 = ctx_0.ricci_grids();
    let ric_comps = [
        ric_0[0].clone(),
        ric_0[1].clone(),
        ric_0[1].clone(),
        ric_0[2].clone(),
    ];
    let lap_ric = ctx_0.rough_laplacian(&ric_comps, 2);
    let e2p = ctx_0.e2p.node(i, j);
    let g0m = [[e2p, 0.0], [0.0, e2p]];
    let gi = [[1.0 / e2p, 0.0], [0.0, 1.0 / e2p]];
    let ric0 = [
        [ric_0[0].node(i, j), ric_0[1].node(i, j)],
        [ric_0[1].node(i, j), ric_0[2].node(i, j)],
    ];
    let riem = |i_: usize, p_: usize, j_: usize, q_: usize| {
        0.5 * r0 * (g0m[i_][j_] * g0m[p_][q_] - g0m[i_][q_] * g0m[p_][j_])
    };
    let pick = |g: &[Grid2; 3], a: usize, b: usize| match (a, b) {
        (0, 0) => g[0].node(i, j),
        (1, 1) => g[2].node(i, j),
        _ => g[1].node(i, j),
    };
    let mut res_ric: f64 = 0.0;
    let mut scale_ric: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let dtric = (pick(&ric_p, a, b) - pick(&ric_m, a, b)) / dt2;
            // 2 Ric^{pq} R_{apbq} - 2 g^{pq} Ric_ap Ric_qb (diagonal metric)
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            for pp in 0..2 {
                for qq in 0..2 {
                    let ruu = gi[pp][pp] * gi[qq][qq] * ric0[pp][qq];
                    t1 += 2.0 * ruu * riem(a, pp, b, qq);
                    t2 += 2.0 * gi[pp][qq] * ric0[a][pp] * ric0[qq][b];
                }
            }
            let rhs = q_sign * (lap_ric[a * 2 + b].node(i, j) + t1 - t2);
            res_ric = res_ric.max((dtric - rhs).abs());
            scale_ric = scale_ric.max(dtric.abs()).max(rhs.abs());
        }
    }
    let res_ric = rel(res_ric, scale_ric);

    // Christoffel law
    let mut res_gam: f64 = 0.0;
    let mut scale_gam: f64 = 0.0;
    let gam_m = ctx_m.gamma_at(iz, jz);
    let gam_p = ctx_p.gamma_at(iz, jz);
    let covric = ctx_0.cov_deriv(&ric_comps, 2); // [k][a][b]
    let cr = |k: usize, a: usize, b: usize| covric[k * 4 + a * 2 + b].node(i, j);
    for k in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let dtg = (gam_p[k][a][b] - gam_m[k][a][b]) / dt2;
                let mut rhs = 0.0;
                for l in 0..2 {
                    rhs += gi[k][l] * (cr(a, b, l) + cr(b, a, l) - cr(l, a, b));
                }
                rhs *= -q_sign;
                res_gam = res_gam.max((dtg - rhs).abs());
                scale_gam = scale_gam.max(dtg.abs()).max(rhs.abs());
            }
        }
    }
    let res_gam = rel(res_gam, scale_gam);

    Ok(FlowEvolutionResiduals {
        ricci: res_ric,
        scalar: res_r,
        christoffel: res_gam,
    })
}

fn exact_family_evolutions(
    traj: &FlowTrajectory,
    t: f64,
) -> Result<FlowEvolutionResiduals, FlowError> {
    let bg = traj
        .family
        .as_ref()
        .ok_or(FlowError::InsufficientSnapshots { t })?;
    match bg.kind {
        BackgroundKind::FlatTorus | BackgroundKind::FlatPlane => Ok(FlowEvolutionResiduals {
            ricci: 0.0,
            scalar: 0.0,
            christoffel: 0.0,
        }),
        BackgroundKind::RoundSphere => {
            let rho2 = bg.rho2(t)?;
            let r = 2.0 / rho2;
            // closed-form time derivative of R
            let drho2 = match bg.direction {
                FlowDirection::Ricci => -2.0,
                FlowDirection::BackwardRicci => 2.0,
                FlowDirection::Static => 0.0,
            };
            let dtr = -2.0 / (rho2 * rho2) * drho2;
            let q_sign = traj.q_mode.q_sign();
            let rhs_r = q_sign * (0.0 + r * r); // Delta R = 0
            let res_r = rel((dtr - rhs_r).abs(), dtr.abs().max(rhs_r.abs()));
            // Ric components are time-independent; RHS cancels exactly:
            // Delta Ric = 0, 2 Ric^{pq} R_{ipjq} = 2 g_ij / rho^4 = 2 Ric^2_ij
            let res_ric = 0.0;
            // Gamma is scale-invariant; grad Ric = 0
            let res_gam = 0.0;
            Ok(FlowEvolutionResiduals {
                ricci: res_ric,
                scalar: res_r,
                christoffel: res_gam,
            })
        }
        _ => Err(FlowError::InvalidConfig(
            "evolution check not defined on noncompact soliton backgrounds".into(),
        )),
    }
}

/// H as component grids for one numeric snapshot (`f = log u`).
fn h_grids(
    ctx: &GridCtx,
    u: &UField,
    tau: f64,
    ric_sign: f64,
) -> Result<(Vec<Grid2>, Grid2), FlowError> {
    let f = match u {
        UField::Grid(g) => {
            let min_u = g.min();
            if min_u <= 0.0 {
                return Err(FlowError::PositivityLoss { t: f64::NAN, min_u });
            }
            g.map(|v| v.ln())
        }
        UField::Const(c) => Grid2::constant(ctx.phi.nx, ctx.phi.ny, ctx.phi.lx, ctx.phi.ly, c.ln()),
        UField::CosineX { base, amp, k } => Grid2::from_fn(
            ctx.phi.nx,
            ctx.phi.ny,
            ctx.phi.lx,
            ctx.phi.ly,
            |x, _| (base + amp * (k * x).cos()).ln(),
        ),
    };
    // covariant Hessian of f
    let grad_f = ctx.cov_deriv(std::slice::from_ref(&f), 0);
    let hess_f = ctx.cov_deriv(&grad_f, 1); // [i][j]
    let ric = ctx.ricci_grids();
    let pick_ric = |c: usize| -> &Grid2 {
        match c {
            0 => &ric[0],
            1 | 2 => &ric[1],
            _ => &ric[2],
        }
    };
    let mut h = Vec::with_capacity(4);
    for c in 0..4 {
        let metric_part = if c == 0 || c == 3 {
            ctx.e2p.map(|e| 0.5 * e)
        } else {
            ctx.e2p.map(|_| 0.0)
        };
        let hc = hess_f[c]
            .zip(pick_ric(c), |hf, rc| tau * (hf + ric_sign * rc))
            .zip(&metric_part, |a, b| a + b);
        h.push(hc);
    }
    Ok((h, f))
}

/// Max relative residual of the `(d_t + Delta) H` identity at `(p, t)`.
pub fn check_h_evolution(
    traj: &FlowTrajectory,
    p: [f64; 2],
    t: f64,
    mode: FlowMode,
    reference_time: f64,
) -> Result<f64, FlowError> {
    // mode must match the trajectory's Q
    match (mode, traj.q_mode) {
        (FlowMode::Ricci, QMode::Ricci | QMode::Static)
        | (FlowMode::BackwardRicci, QMode::BackwardRicci | QMode::Static) => {}
        _ => {
            return Err(FlowError::InvalidConfig(
                "H-evolution mode does not match the trajectory direction".into(),
            ))
        }
    }
    if traj.provenance == Provenance::ExactFamily {
        if let Some(bg) = &traj.family {
            if bg.kind == BackgroundKind::RoundSphere {
                return sphere_h_evolution(traj, p, t, mode, reference_time);
            }
            if matches!(bg.kind, BackgroundKind::FlatTorus) {
                return flat_exact_h_evolution(traj, p, t, mode, reference_time);
            }
        }
        return Err(FlowError::InvalidConfig(
            "H-evolution check supports grid, flat-torus and sphere trajectories".into(),
        ));
    }
    numeric_h_evolution(traj, p, t, mode, reference_time)
}

fn ric_sign_of(mode: FlowMode) -> f64 {
    match mode {
        FlowMode::Ricci => -1.0,
        FlowMode::BackwardRicci => 1.0,
    }
}

fn numeric_h_evolution(
    traj: &FlowTrajectory,
    p: [f64; 2],
    t: f64,
    mode: FlowMode,
    reference_time: f64,
) -> Result<f64, FlowError> {
    let mid = traj.bracket(t)?;
    let snaps = [
        &traj.snapshots[mid - 1],
        &traj.snapshots[mid],
        &traj.snapshots[mid + 1],
    ];
    let ric_sign = ric_sign_of(mode);
    let mut hs = Vec::with_capacity(3);
    let mut ctxs = Vec::with_capacity(3);
    let mut fs = Vec::with_capacity(3);
    for s in snaps {
        let g = grid_of(&s.metric).ok_or_else(|| {
            FlowError::InvalidConfig("numeric H-evolution needs grid snapshots".into())
        })?;
        let u = s.u.as_ref().ok_or_else(|| {
            FlowError::InvalidConfig("H-evolution needs the u field on snapshots".into())
        })?;
        let tau = reference_time - s.t;
        if tau <= 0.0 {
            return Err(FlowError::InvalidConfig(format!(
                "tau = {tau} must stay positive (T = {reference_time})"
            )));
        }
        let ctx = GridCtx::new(g);
        let (h, f) = h_grids(&ctx, u, tau, ric_sign)?;
        hs.push(h);
        ctxs.push(ctx);
        fs.push(f);
    }
    let ctx = &ctxs[1];
    let (i, j) = ctx.nearest_node(p);
    let dt2 = snaps[2].t - snaps[0].t;
    let tau = reference_time - snaps[1].t;

    // LHS
    let lap_h = ctx.rough_laplacian(&hs[1], 2);
    let mut lhs = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let c = a * 2 + b;
            lhs[a][b] =
                (hs[2][c].node(i, j) - hs[0][c].node(i, j)) / dt2 + lap_h[c].node(i, j);
        }
    }

    // RHS inputs at the middle snapshot
    let f = &fs[1];
    let grad_f = ctx.cov_deriv(std::slice::from_ref(f), 0);
    let hess_f = ctx.cov_deriv(&grad_f, 1);
    let third_f = ctx.cov_deriv(&hess_f, 2); // [k][i][j]
    let ric_g = ctx.ricci_grids();
    let ric_comps = [
        ric_g[0].clone(),
        ric_g[1].clone(),
        ric_g[1].clone(),
        ric_g[2].clone(),
    ];
    let covric_g = ctx.cov_deriv(&ric_comps, 2);
    let lapric_g = ctx.rough_laplacian(&ric_comps, 2);
    let grad_r = ctx.cov_deriv(std::slice::from_ref(&ctx.r), 0);
    let hess_r_g = ctx.cov_deriv(&grad_r, 1);
    let cov_h_g = ctx.cov_deriv(&hs[1], 2);

    let e2p = ctx.e2p.node(i, j);
    let r0 = ctx.r.node(i, j);
    let gm = [[e2p, 0.0], [0.0, e2p]];
    let gi = [[1.0 / e2p, 0.0], [0.0, 1.0 / e2p]];
    let mut rl = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    rl[a][b][c][d] = 0.5 * r0 * (gm[a][c] * gm[b][d] - gm[a][d] * gm[b][c]);
                }
            }
        }
    }
    let at2 = |g: &Vec<Grid2>, a: usize, b: usize| g[a * 2 + b].node(i, j);
    let at3 = |g: &Vec<Grid2>, k: usize, a: usize, b: usize| g[k * 4 + a * 2 + b].node(i, j);

    let mut dfu = [0.0; 2];
    for k in 0..2 {
        dfu[k] = gi[k][k] * grad_f[k].node(i, j);
    }
    let mut covric_t = [[[0.0; 2]; 2]; 2];
    let mut c3_t = [[[0.0; 2]; 2]; 2];
    let mut cov_h_t = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                covric_t[k][a][b] = at3(&covric_g, k, a, b);
                c3_t[k][a][b] = at3(&third_f, k, a, b);
                cov_h_t[k][a][b] = at3(&cov_h_g, k, a, b);
            }
        }
    }
    let inputs = HEvolutionInputs::<2> {
        gm,
        gi,
        ric: [
            [ric_g[0].node(i, j), ric_g[1].node(i, j)],
            [ric_g[1].node(i, j), ric_g[2].node(i, j)],
        ],
        rl,
        h: [
            [at2(&hess_f, 0, 0), at2(&hess_f, 0, 1)],
            [at2(&hess_f, 1, 0), at2(&hess_f, 1, 1)],
        ],
        dfu,
        covric: covric_t,
        lap_ric: [
            [at2(&lapric_g, 0, 0), at2(&lapric_g, 0, 1)],
            [at2(&lapric_g, 1, 0), at2(&lapric_g, 1, 1)],
        ],
        hess_r: [
            [at2(&hess_r_g, 0, 0), at2(&hess_r_g, 0, 1)],
            [at2(&hess_r_g, 1, 0), at2(&hess_r_g, 1, 1)],
        ],
        c3: c3_t,
        hmat: [
            [hs[1][0].node(i, j), hs[1][1].node(i, j)],
            [hs[1][2].node(i, j), hs[1][3].node(i, j)],
        ],
        cov_h: cov_h_t,
    };
    let rhs = h_evolution_rhs(&inputs, tau, mode);

    let mut abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            abs = abs.max((lhs[a][b] - rhs[a][b]).abs());
            scale = scale.max(lhs[a][b].abs()).max(rhs[a][b].abs());
        }
    }
    Ok(rel(abs, scale))
}

/// Sphere family with spatially constant `u`: `f = log u` has zero Hessian,
/// so everything reduces to closed forms.
fn sphere_h_evolution(
    traj: &FlowTrajectory,
    p: [f64; 2],
    t: f64,
    mode: FlowMode,
    reference_time: f64,
) -> Result<f64, FlowError> {
    let bg = traj.family.as_ref().unwrap();
    let mid = traj.bracket(t)?;
    let ric_sign = ric_sign_of(mode);
    // H components in the chart at the three snapshots
    let h_at = |s: usize| -> Result<[[f64; 2]; 2], FlowError> {
        let snap = &traj.snapshots[s];
        match snap.u {
            Some(UField::Const(c)) if c > 0.0 => {}
            Some(UField::Const(c)) => {
                return Err(FlowError::PositivityLoss {
                    t: snap.t,
                    min_u: c,
                })
            }
            _ => {
                return Err(FlowError::InvalidConfig(
                    "sphere H-evolution expects spatially constant u".into(),
                ))
            }
        }
        let tau = reference_time - snap.t;
        let rho2 = bg.rho2(snap.t)?;
        let s2 = p[0].sin().powi(2);
        let g = [[rho2, 0.0], [0.0, rho2 * s2]];
        // Ric = g / rho^2 (components independent of rho), hess f = 0
        let ric = [[1.0, 0.0], [0.0, s2]];
        Ok([
            [tau * ric_sign * ric[0][0] + 0.5 * g[0][0], 0.0],
            [0.0, tau * ric_sign * ric[1][1] + 0.5 * g[1][1]],
        ])
    };
    let hm = h_at(mid - 1)?;
    let h0 = h_at(mid)?;
    let hp = h_at(mid + 1)?;
    let dt2 = traj.snapshots[mid + 1].t - traj.snapshots[mid - 1].t;
    let tau = reference_time - traj.snapshots[mid].t;
    let rho2 = bg.rho2(traj.snapshots[mid].t)?;
    let s2 = p[0].sin().powi(2);
    let gm = [[rho2, 0.0], [0.0, rho2 * s2]];
    let gi = [[1.0 / rho2, 0.0], [0.0, 1.0 / (rho2 * s2)]];
    let r0 = 2.0 / rho2;
    let ric = [[1.0, 0.0], [0.0, s2]];
    let mut rl = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    rl[a][b][c][d] = 0.5 * r0 * (gm[a][c] * gm[b][d] - gm[a][d] * gm[b][c]);
                }
            }
        }
    }
    // H = c(t) * unit-sphere metric is parallel: Delta H = 0
    let mut lhs = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            lhs[a][b] = (hp[a][b] - hm[a][b]) / dt2;
        }
    }
    let zero3 = [[[0.0; 2]; 2]; 2];
    let inputs = HEvolutionInputs::<2> {
        gm,
        gi,
        ric,
        rl,
        h: [[0.0; 2]; 2],
        dfu: [0.0; 2],
        covric: zero3,
        lap_ric: [[0.0; 2]; 2],
        hess_r: [[0.0; 2]; 2],
        c3: zero3,
        hmat: h0,
        cov_h: zero3,
    };
    let rhs = h_evolution_rhs(&inputs, tau, mode);
    let mut abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            abs = abs.max((lhs[a][b] - rhs[a][b]).abs());
            scale = scale.max(lhs[a][b].abs()).max(rhs[a][b].abs());
        }
    }
    Ok(rel(abs, scale))
}

/// Exact flat-torus bundle (static metric, cosine mode for `u`): sample onto
/// a grid and run the numeric pipeline so the check exercises the same code
/// path at a pinned resolution.
const EXACT_BUNDLE_GRID_N: usize = 256;

fn flat_exact_h_evolution(
    traj: &FlowTrajectory,
    p: [f64; 2],
    t: f64,
    mode: FlowMode,
    reference_time: f64,
) -> Result<f64, FlowError> {
    let (lx, ly) = match traj.snapshots[0].metric {
        MetricField::FlatTorus { lx, ly } => (lx, ly),
        _ => {
            return Err(FlowError::InvalidConfig(
                "flat exact H-evolution needs a flat torus".into(),
            ))
        }
    };
    let n = EXACT_BUNDLE_GRID_N;
    let mut grid_traj = traj.clone();
    grid_traj.provenance = Provenance::Numeric;
    grid_traj.family = None;
    for s in grid_traj.snapshots.iter_mut() {
        let phi = Grid2::constant(n, n, lx, ly, 0.0);
        s.metric = MetricField::Grid(ConformalTorus::new(phi, s.t)?);
        let u = s.u.as_ref().ok_or_else(|| {
            FlowError::InvalidConfig("H-evolution needs the u field on snapshots".into())
        })?;
        let sampled = match u {
            UField::CosineX { base, amp, k } => {
                let (b, a, kk) = (*base, *amp, *k);
                Grid2::from_fn(n, n, lx, ly, |x, _| b + a * (kk * x).cos())
            }
            UField::Const(c) => Grid2::constant(n, n, lx, ly, *c),
            UField::Grid(g) => g.clone(),
        };
        s.u = Some(UField::Grid(sampled));
    }
    numeric_h_evolution(&grid_traj, p, t, mode, reference_time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{
        conjugate_heat_solve, ricci_flow_run, sphere_family, static_family, AmbientFlowConfig,
        KMode, UTerminal,
    };
    use crate::geometry::background::AnalyticBackground;
    use std::f64::consts::TAU;

    #[test]
    fn flat_trajectory_evolutions_vanish() {
        let bg = AnalyticBackground::flat_torus(TAU, TAU);
        let traj = static_family(&bg, (0.0, 1.0), 4).unwrap();
        let r = check_flow_evolutions(&traj, [0.3, 0.4], 0.5).unwrap();
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn sphere_family_evolutions_exact() {
        for dir in [FlowDirection::Ricci, FlowDirection::BackwardRicci] {
            let traj = sphere_family(2.0, dir, (0.0, 0.5), 10).unwrap();
            let r = check_flow_evolutions(&traj, [0.8, 0.2], 0.25).unwrap();
            assert!(r.max() < 1e-12, "{:?}: {:?}", dir, r);
        }
    }

    #[test]
    fn numeric_torus_evolution_residual_small() {
        let n = 128;
        let phi = Grid2::from_fn(n, n, TAU, TAU, |x, y| {
            0.05 * (2.0 * x).sin() + 0.05 * (y + 0.4).cos()
        });
        let init = ConformalTorus::new(phi, 0.0).unwrap();
        let dt = 2e-4;
        let cfg = AmbientFlowConfig {
            q_mode: QMode::Ricci,
            k_mode: KMode::TraceQ,
            reference_time: 1.0,
            t0: 0.0,
            t1: 0.02,
            dt,
            snapshot_stride: 10,
        };
        let traj = ricci_flow_run(&init, &cfg).unwrap();
        let r = check_flow_evolutions(&traj, [1.1, 2.3], 0.01).unwrap();
        assert!(r.max() < 1e-2, "{r:?}");
    }

    #[test]
    fn sphere_soliton_h_identity_vanishes() {
        // shrinking soliton: u = C/tau with T = T_max makes H = 0 and both sides 0
        let rho0 = 2.0_f64.sqrt(); // T_max = 1
        let traj = sphere_family(rho0, FlowDirection::Ricci, (0.0, 0.8), 8).unwrap();
        let u = conjugate_heat_solve(&traj, &UTerminal::Const(3.0 / 0.2), KMode::ScalarCurvature)
            .unwrap();
        let traj = traj.with_u(u);
        let res = check_h_evolution(&traj, [0.9, 0.1], 0.4, FlowMode::Ricci, 1.0).unwrap();
        assert!(res < 1e-8, "residual {res}");
        // H itself is zero: check one component
        let tau: f64 = 1.0 - 0.4;
        let rho2: f64 = 2.0 * tau;
        assert!((-tau + 0.5 * rho2).abs() < 1e-12);
    }

    #[test]
    fn flat_exact_bundle_h_identity() {
        let bg = AnalyticBackground::flat_torus(TAU, TAU);
        let traj = static_family(&bg, (0.0, 0.5), 50).unwrap();
        let u = conjugate_heat_solve(
            &traj,
            &UTerminal::CosineX {
                base: 1.0,
                amp: 0.5,
                k: 1.0,
            },
            KMode::Zero,
        )
        .unwrap();
        let traj = traj.with_u(u);
        for mode in [FlowMode::Ricci, FlowMode::BackwardRicci] {
            let res = check_h_evolution(&traj, [1.3, 0.2], 0.25, mode, 1.5).unwrap();
            assert!(res < 1e-3, "{mode:?}: residual {res}");
        }
    }
}
