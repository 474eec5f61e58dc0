//! Pointwise Riemannian calculus on closed-form metrics.
//!
//! Convention (fixed so the covariant-derivative commutation formula for
//! 1-forms holds with a plus sign, and the round sphere has positive scalar
//! curvature; both are asserted by tests, not assumed):
//!
//! ```text
//! Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
//! R_pqi^s    = d_q Gamma^s_pi - d_p Gamma^s_qi
//!              + Gamma^b_pi Gamma^s_qb - Gamma^b_qi Gamma^s_pb
//! R_pqis     = R_pqi^a g_as
//! Ric_ij     = g^{pq} R_piqj
//! R          = g^{ij} Ric_ij
//! ```

use crate::dual::{lift_point, Real};
use crate::error::GeometryError;
use crate::tensor::metric::{check_positive_definite, MetricMap, ScalarMap};

pub type Vec1<T, const D: usize> = [T; D];
pub type Mat<T, const D: usize> = [[T; D]; D];
pub type Ten3<T, const D: usize> = [[[T; D]; D]; D];
pub type Ten4<T, const D: usize> = [[[[T; D]; D]; D]; D];

/// Inverse of a small symmetric matrix (D = 2 or 3) by adjugate.
pub fn invert<T: Real, const D: usize>(m: &Mat<T, D>) -> Mat<T, D> {
    let mut out = [[T::cst(0.0); D]; D];
    match D {
        2 => {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            out[0][0] = m[1][1] / det;
            out[1][1] = m[0][0] / det;
            out[0][1] = -(m[0][1] / det);
            out[1][0] = -(m[1][0] / det);
        }
        3 => {
            let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
            let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
            let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
            let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
            let c10 = m[0][2] * m[2][1] - m[0][1] * m[2][2];
            let c11 = m[0][0] * m[2][2] - m[0][2] * m[2][0];
            let c12 = m[0][1] * m[2][0] - m[0][0] * m[2][1];
            let c20 = m[0][1] * m[1][2] - m[0][2] * m[1][1];
            let c21 = m[0][2] * m[1][0] - m[0][0] * m[1][2];
            let c22 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let c = [[c00, c10, c20], [c01, c11, c21], [c02, c12, c22]];
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] = c[i][j] / det;
                }
            }
        }
        _ => panic!("invert supports D = 2, 3"),
    }
    out
}

/// Coordinate partials of the metric: `dg[k][i][j] = d_k g_ij`.
pub fn metric_partials<T: Real, const D: usize, M: MetricMap<D>>(g: &M, x: [T; D]) -> Ten3<T, D> {
    let mut dg = [[[T::cst(0.0); D]; D]; D];
    for k in 0..D {
        let lifted = g.eval(lift_point(x, k));
        for i in 0..D {
            for j in 0..D {
                dg[k][i][j] = lifted[i][j].du;
            }
        }
    }
    dg
}

/// Christoffel symbols `gamma[k][i][j] = Gamma^k_ij`.
pub fn christoffel<T: Real, const D: usize, M: MetricMap<D>>(g: &M, x: [T; D]) -> Ten3<T, D> {
    let gi = invert(&g.eval(x));
    let dg = metric_partials(g, x);
    let mut gam = [[[T::cst(0.0); D]; D]; D];
    for k in 0..D {
        for i in 0..D {
            for j in 0..D {
                let mut acc = T::cst(0.0);
                for l in 0..D {
                    acc = acc + gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gam[k][i][j] = T::cst(0.5) * acc;
            }
        }
    }
    gam
}

/// Riemann tensor, mixed form: `riem[p][q][i][s] = R_pqi^s`.
pub fn riemann_mixed<T: Real, const D: usize, M: MetricMap<D>>(g: &M, x: [T; D]) -> Ten4<T, D> {
    let gam = christoffel(g, x);
    let mut dgam = [[[[T::cst(0.0); D]; D]; D]; D]; // dgam[a][k][i][j] = d_a Gamma^k_ij
    for a in 0..D {
        let lifted = christoffel(g, lift_point(x, a));
        for k in 0..D {
            for i in 0..D {
                for j in 0..D {
                    dgam[a][k][i][j] = lifted[k][i][j].du;
                }
            }
        }
    }
    let mut riem = [[[[T::cst(0.0); D]; D]; D]; D];
    for p in 0..D {
        for q in 0..D {
            for i in 0..D {
                for s in 0..D {
                    let mut acc = dgam[q][s][p][i] - dgam[p][s][q][i];
                    for b in 0..D {
                        acc = acc + gam[b][p][i] * gam[s][q][b] - gam[b][q][i] * gam[s][p][b];
                    }
                    riem[p][q][i][s] = acc;
                }
            }
        }
    }
    riem
}

/// Riemann tensor, all indices lowered: `riem[p][q][i][s] = R_pqis`.
pub fn riemann_lower<T: Real, const D: usize, M: MetricMap<D>>(g: &M, x: [T; D]) -> Ten4<T, D> {
    let rm = riemann_mixed(g, x);
    let gm = g.eval(x);
    let mut out = [[[[T::cst(0.0); D]; D]; D]; D];
    for p in 0..D {
        for q in 0..D {
            for i in 0..D {
                for s in 0..D {
                    let mut acc = T::cst(0.0);
                    for a in 0..D {
                        acc = acc + rm[p][q][i][a] * gm[a][s];
                    }
                    out[p][q][i][s] = acc;
                }
            }
        }
    }
    out
}

/// Ricci tensor `Ric_ij = g^{pq} R_piqj`.
pub fn ricci<T: Real, const D: usize, M: MetricMap<D>>(g: &M, x: [T; D]) -> Mat<T, D> {
    let rl = riemann_lower(g, x);
    let gi = invert(&g.eval(x));
    let mut ric = [[T::cst(0.0); D]; D];
    for i in 0..D {
        for j in 0..D {
            let mut acc = T::cst(0.0);
            for p in 0..D {
                for q in 0..D {
                    acc = acc + gi[p][q] * rl[p][i][q][j];
                }
            }
            ric[i][j] = acc;
        }
    }
    ric
}

/// Scalar curvature.
pub fn scalar_curvature<T: Real, const D: usize, M: MetricMap<D>>(g: &M, x: [T; D]) -> T {
    let ric = ricci(g, x);
    let gi = invert(&g.eval(x));
    let mut acc = T::cst(0.0);
    for i in 0..D {
        for j in 0..D {
            acc = acc + gi[i][j] * ric[i][j];
        }
    }
    acc
}

/// Coordinate gradient of a scalar (equals its covariant derivative).
pub fn grad<T: Real, const D: usize, S: ScalarMap<D>>(f: &S, x: [T; D]) -> Vec1<T, D> {
    let mut out = [T::cst(0.0); D];
    for k in 0..D {
        out[k] = f.eval(lift_point(x, k)).du;
    }
    out
}

/// Covariant Hessian `hess[i][j] = nabla^2_ij f`.
pub fn hessian<T: Real, const D: usize, M: MetricMap<D>, S: ScalarMap<D>>(
    g: &M,
    f: &S,
    x: [T; D],
) -> Mat<T, D> {
    let gam = christoffel(g, x);
    let df = grad(f, x);
    let mut out = [[T::cst(0.0); D]; D];
    for i in 0..D {
        // second partials via one extra lift of the gradient
        let lifted = lift_point(x, i);
        let mut row = [T::cst(0.0); D];
        for j in 0..D {
            row[j] = f.eval(lift_point(lifted, j)).du.du;
        }
        for j in 0..D {
            let mut acc = row[j];
            for k in 0..D {
                acc = acc - gam[k][i][j] * df[k];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Laplace-Beltrami of a scalar, `g^{ij} nabla^2_ij f`.
pub fn laplacian<T: Real, const D: usize, M: MetricMap<D>, S: ScalarMap<D>>(
    g: &M,
    f: &S,
    x: [T; D],
) -> T {
    let h = hessian(g, f, x);
    let gi = invert(&g.eval(x));
    let mut acc = T::cst(0.0);
    for i in 0..D {
        for j in 0..D {
            acc = acc + gi[i][j] * h[i][j];
        }
    }
    acc
}

/// `|grad f|^2 = g^{ij} d_i f d_j f`.
pub fn grad_norm_sq<T: Real, const D: usize, M: MetricMap<D>, S: ScalarMap<D>>(
    g: &M,
    f: &S,
    x: [T; D],
) -> T {
    let df = grad(f, x);
    let gi = invert(&g.eval(x));
    let mut acc = T::cst(0.0);
    for i in 0..D {
        for j in 0..D {
            acc = acc + gi[i][j] * df[i] * df[j];
        }
    }
    acc
}

/// Checked entry point: Christoffel symbols at a probe point.
pub fn christoffel_at<const D: usize, M: MetricMap<D>>(
    g: &M,
    x: [f64; D],
) -> Result<Ten3<f64, D>, GeometryError> {
    check_positive_definite(g, x)?;
    Ok(christoffel(g, x))
}

/// Checked entry point: Riemann (lowered), Ricci and scalar curvature.
pub fn curvature_at<const D: usize, M: MetricMap<D>>(
    g: &M,
    x: [f64; D],
) -> Result<(Ten4<f64, D>, Mat<f64, D>, f64), GeometryError> {
    check_positive_definite(g, x)?;
    Ok((riemann_lower(g, x), ricci(g, x), scalar_curvature(g, x)))
}

/// Max absolute entry helpers used by the residual checks.
pub fn max_abs_mat<const D: usize>(m: &Mat<f64, D>) -> f64 {
    let mut v: f64 = 0.0;
    for row in m {
        for e in row {
            v = v.max(e.abs());
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::metric::{
        CigarChart, CigarPotential, ConformalTrig, FlatChart, SphereChart, TrigPoly,
    };

    #[test]
    fn flat_christoffel_and_curvature_vanish() {
        let g = FlatChart;
        let x = [0.3, -0.7, 1.1];
        let gam = christoffel::<f64, 3, _>(&g, x);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(gam[k][i][j], 0.0);
                }
            }
        }
        assert_eq!(scalar_curvature::<f64, 3, _>(&g, x), 0.0);
    }

    #[test]
    fn sphere_chart_christoffel() {
        // Gamma^theta_phiphi = -sin(theta) cos(theta) on the unit sphere
        let g = SphereChart { rho2: 1.0 };
        let th = 0.9_f64;
        let gam = christoffel::<f64, 2, _>(&g, [th, 0.4]);
        assert!((gam[0][1][1] + th.sin() * th.cos()).abs() < 1e-12);
        assert!((gam[1][0][1] - th.cos() / th.sin()).abs() < 1e-12);
    }

    #[test]
    fn sphere_scalar_curvature_positive() {
        // R = 2 / rho^2, positive in this convention; asserted, not assumed.
        for rho2 in [0.5, 2.0, 7.0] {
            let g = SphereChart { rho2 };
            let r = scalar_curvature::<f64, 2, _>(&g, [1.1, 0.3]);
            assert!((r - 2.0 / rho2).abs() < 1e-10, "R = {r}, rho2 = {rho2}");
            assert!(r > 0.0);
        }
    }

    #[test]
    fn conformal_christoffel_is_phi_x() {
        // Gamma^x_xx = phi_x for g = e^{2 phi} delta
        let phi = TrigPoly::term(0.1, [1.0, 0.0], -std::f64::consts::FRAC_PI_2); // 0.1 sin x
        let g = ConformalTrig { phi: phi.clone() };
        let x = [0.37, 2.5];
        let gam = christoffel::<f64, 2, _>(&g, x);
        let dphi = grad(&phi, x);
        assert!((gam[0][0][0] - dphi[0]).abs() < 1e-13);
        assert!((gam[0][0][1] - dphi[1]).abs() < 1e-13);
        assert!((gam[0][1][1] + dphi[0]).abs() < 1e-13);
    }

    #[test]
    fn two_dim_ricci_is_half_r_g() {
        let phi = TrigPoly::term(0.2, [1.0, 2.0], 0.7);
        let g = ConformalTrig { phi };
        let x = [1.9, 0.8];
        let ric = ricci::<f64, 2, _>(&g, x);
        let r = scalar_curvature::<f64, 2, _>(&g, x);
        let gm = g.eval(x);
        for i in 0..2 {
            for j in 0..2 {
                assert!((ric[i][j] - 0.5 * r * gm[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cigar_is_a_steady_soliton() {
        // nabla^2 f + Ric = 0 pointwise
        let g = CigarChart;
        let f = CigarPotential;
        for &x in &[[0.0, 0.0], [0.6, -0.4], [1.5, 2.2], [-0.9, 0.1]] {
            let h = hessian::<f64, 2, _, _>(&g, &f, x);
            let ric = ricci::<f64, 2, _>(&g, x);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((h[i][j] + ric[i][j]).abs() < 1e-11, "at {x:?}");
                }
            }
        }
    }

    #[test]
    fn cigar_scalar_curvature() {
        let g = CigarChart;
        let r0 = scalar_curvature::<f64, 2, _>(&g, [0.0, 0.0]);
        assert!((r0 - 4.0).abs() < 1e-12);
        let r = scalar_curvature::<f64, 2, _>(&g, [1.0, 2.0]);
        assert!((r - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn singular_metric_is_rejected() {
        // degenerate "metric": zero determinant everywhere
        struct Degenerate;
        impl MetricMap<2> for Degenerate {
            fn eval<T: Real>(&self, _x: [T; 2]) -> [[T; 2]; 2] {
                [[T::cst(1.0), T::cst(1.0)], [T::cst(1.0), T::cst(1.0)]]
            }
        }
        assert!(matches!(
            christoffel_at(&Degenerate, [0.0, 0.0]),
            Err(GeometryError::SingularMetric { .. })
        ));
    }
}
