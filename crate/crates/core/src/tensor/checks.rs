//! Residual checks for the covariant-calculus identities and the two
//! H-evolution identities, on closed-form metrics.
//!
//! Every check builds both sides from this crate's own Christoffel/Riemann/
//! covariant-derivative machinery (no transcribed component tables), so a
//! residual at rounding level certifies the identity in the fixed sign
//! convention. Checks run in dimension 3 as well as 2: several index
//! mistakes are invisible in 2-D where `Ric = (R/2) g`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::calculus::{
    grad, hessian, invert, ricci, riemann_lower, riemann_mixed, scalar_curvature,
    Mat, Ten3, Vec1,
};
use crate::tensor::fields::{
    CovDeriv, HessOf, LaplacianOf, LogUHeatRate, PolyOneForm, PolyTwoTensor, RicciOf,
    RiemannLowerOf, ScalarCurvOf, TensorMap,
};
use crate::tensor::metric::{random_metric, random_point, random_scalar, MetricMap, ScalarMap};
use crate::FlowMode;

/// `(nabla_p nabla_q - nabla_q nabla_p) w_i - R_pqi^s w_s`, max component.
pub fn commutation_one_form<const D: usize, M: MetricMap<D>>(
    g: &M,
    w: &PolyOneForm<D>,
    x: [f64; D],
) -> f64 {
    let c1 = CovDeriv::new(g, w);
    let c2 = CovDeriv::new(g, &c1).eval(x);
    let rm = riemann_mixed(g, x);
    let w0 = w.eval(x);
    let mut res: f64 = 0.0;
    for p in 0..D {
        for q in 0..D {
            for i in 0..D {
                let mut v = c2[(p * D + q) * D + i] - c2[(q * D + p) * D + i];
                for s in 0..D {
                    v -= rm[p][q][i][s] * w0[s];
                }
                res = res.max(v.abs());
            }
        }
    }
    res
}

/// Rank-2 version: `[nabla_p, nabla_q] w_ij - R_pqi^s w_sj - R_pqj^s w_is`.
pub fn commutation_two_tensor<const D: usize, M: MetricMap<D>>(
    g: &M,
    w: &PolyTwoTensor<D>,
    x: [f64; D],
) -> f64 {
    let c1 = CovDeriv::new(g, w);
    let c2 = CovDeriv::new(g, &c1).eval(x);
    let rm = riemann_mixed(g, x);
    let w0 = w.eval(x);
    let mut res: f64 = 0.0;
    for p in 0..D {
        for q in 0..D {
            for i in 0..D {
                for j in 0..D {
                    let mut v = c2[((p * D + q) * D + i) * D + j] - c2[((q * D + p) * D + i) * D + j];
                    for s in 0..D {
                        v -= rm[p][q][i][s] * w0[s * D + j] + rm[p][q][j][s] * w0[i * D + s];
                    }
                    res = res.max(v.abs());
                }
            }
        }
    }
    res
}

/// Residuals of the second Bianchi identity and its two contractions.
#[derive(Clone, Copy, Debug)]
pub struct BianchiResiduals {
    /// `nabla_s R_ijkl + nabla_l R_ijsk + nabla_k R_ijls`
    pub second_bianchi: f64,
    /// `g^{js} nabla_s R_ijkl - nabla_l Ric_ik + nabla_k Ric_il`
    pub div_riem: f64,
    /// `div Ric - grad R / 2`
    pub div_ric: f64,
}

pub fn bianchi_residuals<const D: usize, M: MetricMap<D>>(g: &M, x: [f64; D]) -> BianchiResiduals {
    let riem = RiemannLowerOf(g);
    let covriem = CovDeriv::new(g, &riem).eval(x); // [s][i][j][k][l]
    let at = |s: usize, i: usize, j: usize, k: usize, l: usize| {
        covriem[(((s * D + i) * D + j) * D + k) * D + l]
    };
    let mut bianchi: f64 = 0.0;
    for i in 0..D {
        for j in 0..D {
            for k in 0..D {
                for l in 0..D {
                    for s in 0..D {
                        let v = at(s, i, j, k, l) + at(l, i, j, s, k) + at(k, i, j, l, s);
                        bianchi = bianchi.max(v.abs());
                    }
                }
            }
        }
    }

    let gi = invert(&g.eval(x));
    let ricf = RicciOf(g);
    let covric = CovDeriv::new(g, &ricf).eval(x); // [k][i][j]
    let ric_at = |k: usize, i: usize, j: usize| covric[(k * D + i) * D + j];

    let mut div_riem: f64 = 0.0;
    for i in 0..D {
        for k in 0..D {
            for l in 0..D {
                let mut v = 0.0;
                for j in 0..D {
                    for s in 0..D {
                        v += gi[j][s] * at(s, i, j, k, l);
                    }
                }
                v += -ric_at(l, i, k) + ric_at(k, i, l);
                div_riem = div_riem.max(v.abs());
            }
        }
    }

    let rfield = ScalarCurvOf(g);
    let dr = grad(&rfield, x);
    let mut div_ric: f64 = 0.0;
    for k in 0..D {
        let mut v = 0.0;
        for p in 0..D {
            for q in 0..D {
                v += gi[p][q] * ric_at(p, q, k);
            }
        }
        v -= 0.5 * dr[k];
        div_ric = div_ric.max(v.abs());
    }

    BianchiResiduals {
        second_bianchi: bianchi,
        div_riem,
        div_ric,
    }
}

/// Interchange of the Laplacian and the Hessian on a scalar:
/// `nabla^2_ij (Delta f) - Delta (nabla^2 f)_ij` against its curvature
/// expansion, max component.
pub fn hessian_laplacian_interchange<const D: usize, M, S>(g: &M, f: &S, x: [f64; D]) -> f64
where
    M: MetricMap<D>,
    S: ScalarMap<D>,
{
    let lap = LaplacianOf {
        metric: g,
        scalar: f,
    };
    let lhs_hess = hessian(g, &lap, x); // nabla^2 (Delta f)

    let hf = HessOf {
        metric: g,
        scalar: f,
    };
    let c1 = CovDeriv::new(g, &hf);
    let c2 = CovDeriv::new(g, &c1).eval(x); // [k][l][i][j]
    let gi = invert(&g.eval(x));

    let ricf = RicciOf(g);
    let covric = CovDeriv::new(g, &ricf).eval(x);
    let ric_at = |k: usize, i: usize, j: usize| covric[(k * D + i) * D + j];
    let ric = ricci(g, x);
    let rl = riemann_lower(g, x);
    let h = hessian(g, f, x);
    let df = grad(f, x);

    let mut dfu = [0.0; D];
    for k in 0..D {
        for p in 0..D {
            dfu[k] += gi[k][p] * df[p];
        }
    }
    let mut hu = [[0.0; D]; D]; // f^{kp}
    for i in 0..D {
        for j in 0..D {
            for p in 0..D {
                for q in 0..D {
                    hu[i][j] += gi[i][p] * gi[j][q] * h[p][q];
                }
            }
        }
    }

    let mut res: f64 = 0.0;
    for i in 0..D {
        for j in 0..D {
            let mut lap_hess = 0.0;
            for k in 0..D {
                for l in 0..D {
                    lap_hess += gi[k][l] * c2[((k * D + l) * D + i) * D + j];
                }
            }
            let lhs = lhs_hess[i][j] - lap_hess;
            let mut rhs = 0.0;
            for k in 0..D {
                rhs -= (ric_at(i, j, k) + ric_at(j, i, k) - ric_at(k, i, j)) * dfu[k];
            }
            for p in 0..D {
                for q in 0..D {
                    rhs -= gi[p][q] * (ric[j][p] * h[i][q] + ric[i][p] * h[q][j]);
                }
            }
            for k in 0..D {
                for p in 0..D {
                    rhs -= 2.0 * rl[i][k][p][j] * hu[k][p];
                }
            }
            res = res.max((lhs - rhs).abs());
        }
    }
    res
}

/// 2-D degeneracy: `R_ipjq = (R/2)(g_ij g_pq - g_iq g_pj)`.
pub fn dim2_riemann_identity<M: MetricMap<2>>(g: &M, x: [f64; 2]) -> f64 {
    let rl = riemann_lower(g, x);
    let gm = g.eval(x);
    let r = scalar_curvature(g, x);
    let mut res: f64 = 0.0;
    for i in 0..2 {
        for p in 0..2 {
            for j in 0..2 {
                for q in 0..2 {
                    let v = rl[i][p][j][q] - 0.5 * r * (gm[i][j] * gm[p][q] - gm[i][q] * gm[p][j]);
                    res = res.max(v.abs());
                }
            }
        }
    }
    res
}

/// First three covariant derivatives of a scalar.
pub fn scalar_derivatives<const D: usize, M, S>(
    g: &M,
    f: &S,
    x: [f64; D],
) -> (Vec1<f64, D>, Mat<f64, D>, Ten3<f64, D>)
where
    M: MetricMap<D>,
    S: ScalarMap<D>,
{
    let df = grad(f, x);
    let h = hessian(g, f, x);
    let hf = HessOf {
        metric: g,
        scalar: f,
    };
    let c3v = CovDeriv::new(g, &hf).eval(x);
    let mut c3 = [[[0.0; D]; D]; D];
    for k in 0..D {
        for i in 0..D {
            for j in 0..D {
                c3[k][i][j] = c3v[(k * D + i) * D + j];
            }
        }
    }
    (df, h, c3)
}

/// Absolute residual plus the scale of both sides, for relative reporting.
#[derive(Clone, Copy, Debug)]
pub struct PointResidual {
    pub abs: f64,
    pub scale: f64,
}

impl PointResidual {
    pub fn relative(&self) -> f64 {
        if self.scale < 1e-12 {
            self.abs
        } else {
            self.abs / self.scale
        }
    }
}

/// Pointwise ingredients of the H-evolution right-hand side. Fillable from
/// closed forms (dual numbers) or from grid stencils.
#[derive(Clone, Copy, Debug)]
pub struct HEvolutionInputs<const D: usize> {
    pub gm: Mat<f64, D>,
    pub gi: Mat<f64, D>,
    pub ric: Mat<f64, D>,
    /// Fully lowered Riemann `rl[i][p][j][q]`.
    pub rl: [[[[f64; D]; D]; D]; D],
    /// Covariant Hessian of `f = log u`.
    pub h: Mat<f64, D>,
    /// Raised gradient `nabla^k f`.
    pub dfu: Vec1<f64, D>,
    /// `nabla_k Ric_ij`.
    pub covric: Ten3<f64, D>,
    /// Rough Laplacian of Ric.
    pub lap_ric: Mat<f64, D>,
    /// Covariant Hessian of `R`.
    pub hess_r: Mat<f64, D>,
    /// `nabla^3_{kij} f`.
    pub c3: Ten3<f64, D>,
    /// `H_ij = tau (f_ij +- Ric_ij) + g_ij / 2`.
    pub hmat: Mat<f64, D>,
    /// `nabla_k H_ij`.
    pub cov_h: Ten3<f64, D>,
}

/// The final-display right-hand side of `(d_t + Delta) H_ij` for either mode.
pub fn h_evolution_rhs<const D: usize>(
    inp: &HEvolutionInputs<D>,
    tau: f64,
    mode: FlowMode,
) -> Mat<f64, D> {
    let HEvolutionInputs {
        gm: _,
        gi,
        ric,
        rl,
        h,
        dfu,
        covric,
        lap_ric,
        hess_r,
        c3,
        hmat,
        cov_h,
    } = inp;

    let mut h_sq = [[0.0; D]; D];
    let mut h_uu = [[0.0; D]; D];
    let mut hu = [[0.0; D]; D];
    let mut ric_sq = [[0.0; D]; D];
    let mut ric_riem = [[0.0; D]; D];
    let mut ric_uu = [[0.0; D]; D];
    for p in 0..D {
        for q in 0..D {
            for a in 0..D {
                for b in 0..D {
                    ric_uu[p][q] += gi[p][a] * gi[q][b] * ric[a][b];
                }
            }
        }
    }
    for i in 0..D {
        for j in 0..D {
            for p in 0..D {
                for q in 0..D {
                    h_sq[i][j] += gi[p][q] * hmat[i][p] * hmat[q][j];
                    h_uu[i][j] += gi[i][p] * gi[j][q] * hmat[p][q];
                    hu[i][j] += gi[i][p] * gi[j][q] * h[p][q];
                    ric_sq[i][j] += gi[p][q] * ric[i][p] * ric[q][j];
                    ric_riem[i][j] += ric_uu[p][q] * rl[i][p][j][q];
                }
            }
        }
    }

    let mut rhs = [[0.0; D]; D];
    match mode {
        FlowMode::Ricci => {
            for i in 0..D {
                for j in 0..D {
                    let mut v = (hmat[i][j] - 2.0 * h_sq[i][j]) / tau;
                    for k in 0..D {
                        v -= 2.0 * cov_h[k][i][j] * dfu[k];
                    }
                    for k in 0..D {
                        for p in 0..D {
                            v -= gi[k][p] * (ric[i][p] * hmat[k][j] + ric[j][p] * hmat[k][i]);
                        }
                    }
                    for p in 0..D {
                        for q in 0..D {
                            v -= 2.0 * rl[i][p][j][q] * h_uu[p][q];
                        }
                    }
                    v -= tau
                        * (2.0 * lap_ric[i][j] - 2.0 * ric_sq[i][j] + 4.0 * ric_riem[i][j]
                            - hess_r[i][j]
                            - ric[i][j] / tau);
                    for k in 0..D {
                        v += 2.0
                            * tau
                            * (covric[i][j][k] + covric[j][i][k] - 2.0 * covric[k][i][j])
                            * dfu[k];
                    }
                    for p in 0..D {
                        for q in 0..D {
                            v -= 2.0 * tau * rl[i][p][j][q] * dfu[p] * dfu[q];
                        }
                    }
                    rhs[i][j] = v;
                }
            }
        }
        FlowMode::BackwardRicci => {
            for i in 0..D {
                for j in 0..D {
                    let mut v = -h[i][j];
                    for p in 0..D {
                        for q in 0..D {
                            v += tau * gi[p][q] * (ric[j][p] * h[i][q] + ric[i][p] * h[q][j]);
                            v -= 2.0 * tau * rl[i][p][j][q] * hu[p][q];
                        }
                    }
                    v -= tau * (2.0 * ric_riem[i][j] - 2.0 * ric_sq[i][j] + hess_r[i][j]);
                    for p in 0..D {
                        for q in 0..D {
                            v -= 2.0 * tau * gi[p][q] * h[i][p] * h[q][j];
                        }
                    }
                    for k in 0..D {
                        v -= 2.0 * tau * c3[k][i][j] * dfu[k];
                    }
                    for p in 0..D {
                        for q in 0..D {
                            v -= 2.0 * tau * rl[i][p][j][q] * dfu[p] * dfu[q];
                        }
                    }
                    rhs[i][j] = v;
                }
            }
        }
    }
    rhs
}

/// Pointwise audit of the `(d_t + Delta) H_ij` evolution identity, with all
/// time derivatives replaced through the flow laws, so it can be checked on
/// any closed-form metric without integrating a flow. `log_u` plays `log u`.
///
/// Mode `Ricci`: `H = tau (f_ij - Ric_ij) + g_ij / 2`, `f_t = -Df - |grad f|^2 + R`.
/// Mode `BackwardRicci`: `H = tau (f_ij + Ric_ij) + g_ij / 2`, `f_t = -Df - |grad f|^2 - R`.
pub fn h_evolution_point<const D: usize, M, S>(
    g: &M,
    log_u: &S,
    x: [f64; D],
    tau: f64,
    mode: FlowMode,
) -> PointResidual
where
    M: MetricMap<D>,
    S: ScalarMap<D>,
{
    let (ric_sign, r_sign) = match mode {
        FlowMode::Ricci => (-1.0, 1.0),
        FlowMode::BackwardRicci => (1.0, -1.0),
    };

    let gm = g.eval(x);
    let gi = invert(&gm);
    let ric = ricci(g, x);
    let rl = riemann_lower(g, x);
    let h = hessian(g, log_u, x);
    let df = grad(log_u, x);

    let ricf = RicciOf(g);
    let covric_f = CovDeriv::new(g, &ricf);
    let covric = covric_f.eval(x);
    let covric2 = CovDeriv::new(g, &covric_f).eval(x);
    let hf = HessOf {
        metric: g,
        scalar: log_u,
    };
    let c3f = CovDeriv::new(g, &hf);
    let c3 = c3f.eval(x);
    let c4 = CovDeriv::new(g, &c3f).eval(x);
    let rfield = ScalarCurvOf(g);
    let hess_r = hessian(g, &rfield, x);

    let rate = LogUHeatRate {
        metric: g,
        log_u,
        sign_r: r_sign,
    };
    let hess_ft = hessian(g, &rate, x);

    let ric3 = |k: usize, i: usize, j: usize| covric[(k * D + i) * D + j];
    let c3at = |k: usize, i: usize, j: usize| c3[(k * D + i) * D + j];

    // contracted second derivatives
    let mut lap_ric = [[0.0; D]; D];
    let mut lap_hess = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            for k in 0..D {
                for l in 0..D {
                    lap_ric[i][j] += gi[k][l] * covric2[((k * D + l) * D + i) * D + j];
                    lap_hess[i][j] += gi[k][l] * c4[((k * D + l) * D + i) * D + j];
                }
            }
        }
    }

    // raised objects
    let mut dfu = [0.0; D];
    for k in 0..D {
        for p in 0..D {
            dfu[k] += gi[k][p] * df[p];
        }
    }
    let mut ric_uu = [[0.0; D]; D];
    for p in 0..D {
        for q in 0..D {
            for a in 0..D {
                for b in 0..D {
                    ric_uu[p][q] += gi[p][a] * gi[q][b] * ric[a][b];
                }
            }
        }
    }
    let mut ric_sq = [[0.0; D]; D]; // g^{pq} Ric_ip Ric_qj
    let mut ric_riem = [[0.0; D]; D]; // Ric^{pq} R_ipjq
    for i in 0..D {
        for j in 0..D {
            for p in 0..D {
                for q in 0..D {
                    ric_sq[i][j] += gi[p][q] * ric[i][p] * ric[q][j];
                    ric_riem[i][j] += ric_uu[p][q] * rl[i][p][j][q];
                }
            }
        }
    }

    // evolution laws
    let mut dtgam = [[[0.0; D]; D]; D];
    for k in 0..D {
        for i in 0..D {
            for j in 0..D {
                let mut acc = 0.0;
                for l in 0..D {
                    acc += gi[k][l] * (ric3(i, j, l) + ric3(j, i, l) - ric3(l, i, j));
                }
                dtgam[k][i][j] = -(r_sign * acc);
            }
        }
    }
    let mut dtric = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            dtric[i][j] = r_sign * (lap_ric[i][j] + 2.0 * ric_riem[i][j] - 2.0 * ric_sq[i][j]);
        }
    }

    // H and its pieces
    let mut hmat = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            hmat[i][j] = tau * (h[i][j] + ric_sign * ric[i][j]) + 0.5 * gm[i][j];
        }
    }
    let cov_h = |k: usize, i: usize, j: usize| tau * (c3at(k, i, j) + ric_sign * ric3(k, i, j));

    // LHS: d_t H + Delta H, with d_t f_ij = hess(f_t) - dtGamma . grad f
    let mut lhs = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            let l_ij = h[i][j] + ric_sign * ric[i][j];
            let mut dth = hess_ft[i][j];
            for k in 0..D {
                dth -= dtgam[k][i][j] * df[k];
            }
            let dtg_half = -r_sign * ric[i][j];
            let dt_h = -l_ij + tau * (dth + ric_sign * dtric[i][j]) + dtg_half;
            let lap_h = tau * (lap_hess[i][j] + ric_sign * lap_ric[i][j]);
            lhs[i][j] = dt_h + lap_h;
        }
    }

    // RHS: the final displays, via the shared helper
    let mut covric_t = [[[0.0; D]; D]; D];
    let mut c3_t = [[[0.0; D]; D]; D];
    let mut cov_h_t = [[[0.0; D]; D]; D];
    for k in 0..D {
        for i in 0..D {
            for j in 0..D {
                covric_t[k][i][j] = ric3(k, i, j);
                c3_t[k][i][j] = c3at(k, i, j);
                cov_h_t[k][i][j] = cov_h(k, i, j);
            }
        }
    }
    let inputs = HEvolutionInputs {
        gm,
        gi,
        ric,
        rl,
        h,
        dfu,
        covric: covric_t,
        lap_ric,
        hess_r,
        c3: c3_t,
        hmat,
        cov_h: cov_h_t,
    };
    let rhs = h_evolution_rhs(&inputs, tau, mode);

    let mut abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..D {
        for j in 0..D {
            abs = abs.max((lhs[i][j] - rhs[i][j]).abs());
            scale = scale.max(lhs[i][j].abs()).max(rhs[i][j].abs());
        }
    }
    PointResidual { abs, scale }
}

/// One residual sample from the randomized identity suite.
#[derive(Clone, Debug)]
pub struct CheckSample {
    pub name: &'static str,
    pub dim: usize,
    pub point_index: usize,
    pub residual: f64,
}

pub const LEDGER_CHECK_NAMES: [&str; 7] = [
    "commutation_one_form",
    "commutation_two_tensor",
    "second_bianchi",
    "div_ric",
    "hessian_laplacian",
    "h_evolution_ricci",
    "h_evolution_backward",
];

fn suite_for_dim<const D: usize>(
    n_metrics: usize,
    pts_per_metric: usize,
    seed: u64,
    out: &mut Vec<CheckSample>,
) {
    let mut point_index = 0usize;
    for im in 0..n_metrics {
        let mseed = seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add((D as u64) << 32 | im as u64);
        let g = random_metric::<D>(mseed, 0.1);
        let f = random_scalar::<D>(mseed ^ 0xabcdef, 0.5);
        let w1 = PolyOneForm::<D> {
            comps: (0..D)
                .map(|c| random_scalar::<D>(mseed ^ (0x100 + c as u64), 1.0))
                .collect(),
        };
        let w2 = PolyTwoTensor::<D> {
            comps: (0..D * D)
                .map(|c| random_scalar::<D>(mseed ^ (0x200 + c as u64), 1.0))
                .collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(mseed ^ 0x55aa);
        for _ in 0..pts_per_metric {
            let x = random_point::<D>(&mut rng);
            let tau = 0.25 + 1.5 * (point_index % 7) as f64 / 7.0;

            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[0],
                dim: D,
                point_index,
                residual: commutation_one_form(&g, &w1, x),
            });
            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[1],
                dim: D,
                point_index,
                residual: commutation_two_tensor(&g, &w2, x),
            });
            let b = bianchi_residuals(&g, x);
            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[2],
                dim: D,
                point_index,
                residual: b.second_bianchi.max(b.div_riem),
            });
            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[3],
                dim: D,
                point_index,
                residual: b.div_ric,
            });
            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[4],
                dim: D,
                point_index,
                residual: hessian_laplacian_interchange(&g, &f, x),
            });
            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[5],
                dim: D,
                point_index,
                residual: h_evolution_point(&g, &f, x, tau, FlowMode::Ricci).abs,
            });
            out.push(CheckSample {
                name: LEDGER_CHECK_NAMES[6],
                dim: D,
                point_index,
                residual: h_evolution_point(&g, &f, x, tau, FlowMode::BackwardRicci).abs,
            });
            point_index += 1;
        }
    }
}

/// Run the full randomized identity suite for one dimension (2 or 3).
pub fn ledger_suite(
    dim: usize,
    n_metrics: usize,
    pts_per_metric: usize,
    seed: u64,
) -> Vec<CheckSample> {
    let mut out = Vec::new();
    match dim {
        2 => suite_for_dim::<2>(n_metrics, pts_per_metric, seed, &mut out),
        3 => suite_for_dim::<3>(n_metrics, pts_per_metric, seed, &mut out),
        _ => panic!("identity suite supports dim 2 or 3"),
    }
    out
}
