//! A metric snapshot: closed-form chart or conformal grid, behind one enum.

use crate::geometry::conformal::{christoffel_conformal, ConformalTorus};
use crate::tensor::calculus::christoffel;
use crate::tensor::metric::{CigarChart, MetricMap, SphereChart};

/// An ambient metric at one instant.
#[derive(Clone, Debug)]
pub enum MetricField {
    FlatPlane,
    FlatTorus { lx: f64, ly: f64 },
    /// Round sphere in the polar chart, radius^2 = `rho2`.
    Sphere { rho2: f64 },
    Cigar,
    Grid(ConformalTorus),
}

impl MetricField {
    pub fn metric_at(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        match self {
            MetricField::FlatPlane | MetricField::FlatTorus { .. } => [[1.0, 0.0], [0.0, 1.0]],
            MetricField::Sphere { rho2 } => SphereChart { rho2: *rho2 }.eval(p),
            MetricField::Cigar => CigarChart.eval(p),
            MetricField::Grid(m) => m.metric_at(p),
        }
    }

    pub fn christoffel_at(&self, p: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
        match self {
            MetricField::FlatPlane | MetricField::FlatTorus { .. } => [[[0.0; 2]; 2]; 2],
            MetricField::Sphere { rho2 } => christoffel(&SphereChart { rho2: *rho2 }, p),
            MetricField::Cigar => {
                // conformal with phi = -log(1 + r^2)/2
                let w = 1.0 + p[0] * p[0] + p[1] * p[1];
                christoffel_conformal(-p[0] / w, -p[1] / w)
            }
            MetricField::Grid(m) => m.christoffel_at(p),
        }
    }

    pub fn scalar_curvature_at(&self, p: [f64; 2]) -> f64 {
        match self {
            MetricField::FlatPlane | MetricField::FlatTorus { .. } => 0.0,
            MetricField::Sphere { rho2 } => 2.0 / rho2,
            MetricField::Cigar => 4.0 / (1.0 + p[0] * p[0] + p[1] * p[1]),
            MetricField::Grid(m) => m.scalar_curvature_at(p),
        }
    }

    /// 2-D identity `Ric = (R/2) g`.
    pub fn ricci_at(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let r = self.scalar_curvature_at(p);
        let g = self.metric_at(p);
        [
            [0.5 * r * g[0][0], 0.5 * r * g[0][1]],
            [0.5 * r * g[1][0], 0.5 * r * g[1][1]],
        ]
    }

    pub fn sqrt_det_at(&self, p: [f64; 2]) -> f64 {
        let g = self.metric_at(p);
        (g[0][0] * g[1][1] - g[0][1] * g[1][0]).sqrt()
    }

    /// Chart periods per axis, `None` for non-periodic directions.
    pub fn periods(&self) -> [Option<f64>; 2] {
        match self {
            MetricField::FlatPlane | MetricField::Cigar => [None, None],
            MetricField::FlatTorus { lx, ly } => [Some(*lx), Some(*ly)],
            // polar chart: theta is not periodic for curves, phi is
            MetricField::Sphere { .. } => [None, Some(std::f64::consts::TAU)],
            MetricField::Grid(m) => [Some(m.phi.lx), Some(m.phi.ly)],
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(
            self,
            MetricField::FlatTorus { .. } | MetricField::Sphere { .. } | MetricField::Grid(_)
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MetricField::FlatPlane => "flat_plane",
            MetricField::FlatTorus { .. } => "flat_torus",
            MetricField::Sphere { .. } => "round_sphere",
            MetricField::Cigar => "cigar",
            MetricField::Grid(_) => "conformal_grid",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::Grid2;
    use crate::tensor::calculus::{ricci, scalar_curvature};
    use std::f64::consts::TAU;

    #[test]
    fn sphere_ricci_from_identity() {
        let m = MetricField::Sphere { rho2: 4.0 };
        let p = [1.0, 0.3];
        let ric = m.ricci_at(p);
        let expect = ricci(&SphereChart { rho2: 4.0 }, p);
        for i in 0..2 {
            for j in 0..2 {
                assert!((ric[i][j] - expect[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn grid_matches_analytic_conformal() {
        // cross-check the grid point queries against the exact trig metric
        let n = 256;
        let phi = Grid2::from_fn(n, n, TAU, TAU, |x, y| 0.1 * x.sin() + 0.05 * (y * 2.0).cos());
        let m = MetricField::Grid(ConformalTorus::new(phi, 0.0).unwrap());
        let mut t = crate::tensor::metric::TrigPoly::<2>::zero();
        t.push(0.1, [1.0, 0.0], -std::f64::consts::FRAC_PI_2);
        t.push(0.05, [0.0, 2.0], 0.0);
        let exact = crate::tensor::metric::ConformalTrig { phi: t };
        for &p in &[[0.37, 1.9], [4.4, 2.2], [6.0, 0.1]] {
            let r_grid = m.scalar_curvature_at(p);
            let r_exact = scalar_curvature(&exact, p);
            assert!(
                (r_grid - r_exact).abs() <= 1e-3 * r_exact.abs().max(1.0),
                "grid {r_grid} vs exact {r_exact}"
            );
            let gam_g = m.christoffel_at(p);
            let gam_e = christoffel(&exact, p);
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((gam_g[k][i][j] - gam_e[k][i][j]).abs() < 1e-3);
                    }
                }
            }
        }
    }
}
