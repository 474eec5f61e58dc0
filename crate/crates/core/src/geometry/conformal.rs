//! Conformal metrics `g = e^{2 phi} (dx^2 + dy^2)` on a flat torus grid.
//!
//! The conformal chart keeps the 2-D operators exact one-liners:
//! `R = -2 e^{-2 phi} Delta0 phi`, `Delta_g = e^{-2 phi} Delta0`,
//! `Ric = (R/2) g`, and the Christoffel symbols are first derivatives of
//! `phi`. Point queries interpolate node stencils bilinearly so snapshots
//! never store derived grids.

use crate::error::GeometryError;
use crate::geometry::grid::{Grid2, StencilOrder};

/// An ambient conformal metric on the periodic grid, frozen at time `t`.
#[derive(Clone, Debug)]
pub struct ConformalTorus {
    pub phi: Grid2,
    pub t: f64,
}

impl ConformalTorus {
    pub fn new(phi: Grid2, t: f64) -> Result<Self, GeometryError> {
        if phi.nx < 16 || phi.ny < 16 || !phi.nx.is_multiple_of(2) || !phi.ny.is_multiple_of(2) {
            return Err(GeometryError::InvalidGrid {
                nx: phi.nx,
                ny: phi.ny,
            });
        }
        phi.check_finite()?;
        Ok(ConformalTorus { phi, t })
    }

    /// Scalar curvature at a node, `R = -2 e^{-2 phi} Delta0 phi`.
    pub fn scalar_curvature_at_node(&self, i: usize, j: usize, order: StencilOrder) -> f64 {
        let lap = self.phi.laplacian_at(i as isize, j as isize, order);
        -2.0 * (-2.0 * self.phi.node(i, j)).exp() * lap
    }

    /// Scalar curvature on the whole grid.
    pub fn scalar_curvature_grid(&self, order: StencilOrder) -> Grid2 {
        let lap = self.phi.laplacian(order);
        lap.zip(&self.phi, |l, p| -2.0 * (-2.0 * p).exp() * l)
    }

    /// Laplace-Beltrami of a sampled field, `e^{-2 phi} Delta0 w` (second order).
    pub fn laplace_beltrami(&self, w: &Grid2) -> Grid2 {
        assert_eq!((w.nx, w.ny), (self.phi.nx, self.phi.ny), "grid mismatch");
        let lap = w.laplacian(StencilOrder::Two);
        lap.zip(&self.phi, |l, p| (-2.0 * p).exp() * l)
    }

    pub fn phi_at(&self, p: [f64; 2]) -> f64 {
        self.phi.bilinear(p)
    }

    /// Grid point queries use 4th-order node stencils under the bilinear map.
    pub fn grad_phi_at(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.phi
                .bilinear_of(p, |i, j| self.phi.dx_at(i, j, StencilOrder::Four)),
            self.phi
                .bilinear_of(p, |i, j| self.phi.dy_at(i, j, StencilOrder::Four)),
        ]
    }

    pub fn metric_at(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let w = (2.0 * self.phi_at(p)).exp();
        [[w, 0.0], [0.0, w]]
    }

    /// Conformal Christoffel symbols from `grad phi`.
    pub fn christoffel_at(&self, p: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
        let [px, py] = self.grad_phi_at(p);
        christoffel_conformal(px, py)
    }

    pub fn scalar_curvature_at(&self, p: [f64; 2]) -> f64 {
        self.phi.bilinear_of(p, |i, j| {
            let iu = i.rem_euclid(self.phi.nx as isize) as usize;
            let ju = j.rem_euclid(self.phi.ny as isize) as usize;
            self.scalar_curvature_at_node(iu, ju, StencilOrder::Four)
        })
    }

    /// Total area `int e^{2 phi} dx dy`.
    pub fn area(&self) -> f64 {
        let cell = self.phi.hx() * self.phi.hy();
        self.phi.data().iter().map(|&p| (2.0 * p).exp()).sum::<f64>() * cell
    }
}

/// Christoffel symbols of `e^{2 phi} delta` given `(phi_x, phi_y)`:
/// `gamma[k][i][j]`, symmetric in `(i, j)`.
pub fn christoffel_conformal(px: f64, py: f64) -> [[[f64; 2]; 2]; 2] {
    [
        [[px, py], [py, -px]], // Gamma^x_{xx}, Gamma^x_{xy}; Gamma^x_{yx}, Gamma^x_{yy}
        [[-py, px], [px, py]], // Gamma^y_{xx}, Gamma^y_{xy}; Gamma^y_{yx}, Gamma^y_{yy}
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn sin_x_torus(n: usize, amp: f64) -> ConformalTorus {
        let phi = Grid2::from_fn(n, n, TAU, TAU, |x, _| amp * x.sin());
        ConformalTorus::new(phi, 0.0).unwrap()
    }

    #[test]
    fn flat_phi_gives_zero_curvature() {
        let m = ConformalTorus::new(Grid2::constant(32, 32, TAU, TAU, 0.0), 0.0).unwrap();
        let r = m.scalar_curvature_grid(StencilOrder::Two);
        assert!(r.max_abs() < 1e-14);
    }

    #[test]
    fn sine_conformal_curvature_closed_form() {
        // phi = 0.1 sin x: Delta0 phi = -0.1 sin x, R = 0.2 sin x e^{-0.2 sin x};
        // at x = pi/2 this is 0.2 e^{-0.2}.
        let m = sin_x_torus(256, 0.1);
        let i = 256 / 4; // x = pi/2
        let r = m.scalar_curvature_at_node(i, 7, StencilOrder::Two);
        let expect = 0.2 * (-0.2_f64).exp();
        assert!((r - expect).abs() < 1e-4, "r = {r}, expect = {expect}");
        // and the 4th-order stencil is tighter
        let r4 = m.scalar_curvature_at_node(i, 7, StencilOrder::Four);
        assert!((r4 - expect).abs() < 1e-8);
    }

    #[test]
    fn second_order_convergence_of_r() {
        let exact = 0.2 * (-0.2_f64).exp();
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| {
                let m = sin_x_torus(n, 0.1);
                (m.scalar_curvature_at_node(n / 4, 3, StencilOrder::Two) - exact).abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.0, "ratios: {errs:?}");
    }

    #[test]
    fn laplace_beltrami_eigenfunction() {
        // phi = 0, w = cos x  ->  -cos x
        let m = ConformalTorus::new(Grid2::constant(64, 64, TAU, TAU, 0.0), 0.0).unwrap();
        let w = Grid2::from_fn(64, 64, TAU, TAU, |x, _| x.cos());
        let lw = m.laplace_beltrami(&w);
        let mut err: f64 = 0.0;
        for i in 0..64 {
            let x = i as f64 * w.hx();
            err = err.max((lw.node(i, 11) + x.cos()).abs());
        }
        assert!(err < 1e-3);
    }

    #[test]
    fn laplace_beltrami_with_conformal_factor() {
        // phi = 0.1 sin x, w = cos x -> -e^{-0.2 sin x} cos x
        let n = 256;
        let m = sin_x_torus(n, 0.1);
        let w = Grid2::from_fn(n, n, TAU, TAU, |x, _| x.cos());
        let lw = m.laplace_beltrami(&w);
        let mut err: f64 = 0.0;
        for i in 0..n {
            let x = i as f64 * w.hx();
            let expect = -(-0.2 * x.sin()).exp() * x.cos();
            err = err.max((lw.node(i, 5) - expect).abs());
        }
        assert!(err < 1e-4, "err = {err:.3e}");
    }

    #[test]
    fn constant_field_maps_to_zero() {
        let m = sin_x_torus(32, 0.3);
        let w = Grid2::constant(32, 32, TAU, TAU, 4.2);
        assert!(m.laplace_beltrami(&w).max_abs() < 1e-12);
    }

    #[test]
    fn cigar_chart_curvature_via_duals() {
        // The grid op only sees periodic data; the cigar check runs on the
        // closed form: R(0,0) = 4 from R = -2 e^{-2 phi} Delta0 phi.
        use crate::dual::{lift_point, Real};
        use crate::tensor::metric::ScalarMap;
        struct CigarPhi;
        impl ScalarMap<2> for CigarPhi {
            fn eval<T: Real>(&self, x: [T; 2]) -> T {
                -(T::cst(0.5)) * (T::cst(1.0) + x[0] * x[0] + x[1] * x[1]).ln()
            }
        }
        let p = [0.0_f64, 0.0];
        let mut lap0 = 0.0;
        for dir in 0..2 {
            let lifted = lift_point(p, dir);
            lap0 += CigarPhi.eval(lift_point(lifted, dir)).du.du;
        }
        let phi0 = CigarPhi.eval(p);
        let r = -2.0 * (-2.0 * phi0).exp() * lap0;
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn grid_size_validation() {
        assert!(matches!(
            ConformalTorus::new(Grid2::constant(8, 32, TAU, TAU, 0.0), 0.0),
            Err(GeometryError::InvalidGrid { .. })
        ));
        assert!(matches!(
            ConformalTorus::new(Grid2::constant(18, 17, TAU, TAU, 0.0), 0.0),
            Err(GeometryError::InvalidGrid { .. })
        ));
    }

    #[test]
    fn isometry_whole_cell_shift() {
        let m = sin_x_torus(64, 0.2);
        let shifted = ConformalTorus::new(m.phi.shifted(9, 4), 0.0).unwrap();
        let r = m.scalar_curvature_grid(StencilOrder::Two);
        let rs = shifted.scalar_curvature_grid(StencilOrder::Two);
        // curvature commutes with the shift exactly
        assert_eq!(rs, r.shifted(9, 4));
        let _ = FRAC_PI_2;
    }
}
