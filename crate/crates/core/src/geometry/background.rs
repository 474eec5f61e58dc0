//! Closed-form ambient backgrounds: flat space, round spheres, the cigar and
//! the Gaussian expander, each with its soliton potential.

use crate::error::GeometryError;
use crate::geometry::metricfield::MetricField;
use crate::tensor::calculus::{hessian, ricci, scalar_curvature};
use crate::tensor::metric::{CigarChart, CigarPotential};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackgroundKind {
    FlatPlane,
    FlatTorus,
    RoundSphere,
    Cigar,
    GaussianExpander,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowDirection {
    Ricci,
    BackwardRicci,
    Static,
}

/// A closed-form metric family `g(t)` with its gradient-soliton potential.
#[derive(Clone, Debug)]
pub struct AnalyticBackground {
    pub kind: BackgroundKind,
    /// Initial sphere radius (round sphere only).
    pub rho0: f64,
    /// Extremal time of the soliton family: `T_min` for the expander,
    /// `T_max` for the shrinking sphere (derived from `rho0` there).
    pub t_ext: f64,
    pub direction: FlowDirection,
    /// Torus periods (flat torus only).
    pub periods: (f64, f64),
}

/// All pointwise data of a background at `(p, t)`.
#[derive(Clone, Copy, Debug)]
pub struct BackgroundData {
    pub g: [[f64; 2]; 2],
    pub r: f64,
    pub ric: [[f64; 2]; 2],
    pub f: f64,
    pub grad_f: [f64; 2],
    pub hess_f: [[f64; 2]; 2],
}

impl AnalyticBackground {
    pub fn flat_plane() -> Self {
        AnalyticBackground {
            kind: BackgroundKind::FlatPlane,
            rho0: 0.0,
            t_ext: 0.0,
            direction: FlowDirection::Static,
            periods: (0.0, 0.0),
        }
    }

    pub fn flat_torus(lx: f64, ly: f64) -> Self {
        AnalyticBackground {
            kind: BackgroundKind::FlatTorus,
            rho0: 0.0,
            t_ext: 0.0,
            direction: FlowDirection::Static,
            periods: (lx, ly),
        }
    }

    /// Round sphere of initial radius `rho0`. Under Ricci flow
    /// `rho(t)^2 = rho0^2 - 2t` (shrinking soliton with `T_max = rho0^2/2`);
    /// under backward flow `rho(t)^2 = rho0^2 + 2t`.
    pub fn round_sphere(rho0: f64, direction: FlowDirection) -> Self {
        let t_ext = match direction {
            FlowDirection::Ricci => rho0 * rho0 / 2.0,
            _ => f64::INFINITY,
        };
        AnalyticBackground {
            kind: BackgroundKind::RoundSphere,
            rho0,
            t_ext,
            direction,
            periods: (0.0, 0.0),
        }
    }

    pub fn cigar() -> Self {
        AnalyticBackground {
            kind: BackgroundKind::Cigar,
            rho0: 0.0,
            t_ext: 0.0,
            direction: FlowDirection::Static,
            periods: (0.0, 0.0),
        }
    }

    /// Gaussian expander on the flat plane: `f = -|x|^2 / (4 (t - T_min))`,
    /// defined for `t > T_min`.
    pub fn gaussian_expander(t_min: f64) -> Self {
        AnalyticBackground {
            kind: BackgroundKind::GaussianExpander,
            rho0: 0.0,
            t_ext: t_min,
            direction: FlowDirection::Ricci,
            periods: (0.0, 0.0),
        }
    }

    /// Sphere radius squared at time `t`.
    pub fn rho2(&self, t: f64) -> Result<f64, GeometryError> {
        debug_assert_eq!(self.kind, BackgroundKind::RoundSphere);
        let r2 = match self.direction {
            FlowDirection::Ricci => self.rho0 * self.rho0 - 2.0 * t,
            FlowDirection::BackwardRicci => self.rho0 * self.rho0 + 2.0 * t,
            FlowDirection::Static => self.rho0 * self.rho0,
        };
        if r2 <= 0.0 {
            return Err(GeometryError::TimeOutOfRange {
                t,
                detail: format!("sphere radius^2 = {r2:.3e} <= 0"),
            });
        }
        Ok(r2)
    }

    fn check_time(&self, t: f64) -> Result<(), GeometryError> {
        match self.kind {
            BackgroundKind::RoundSphere => self.rho2(t).map(|_| ()),
            BackgroundKind::GaussianExpander => {
                if t <= self.t_ext {
                    Err(GeometryError::TimeOutOfRange {
                        t,
                        detail: format!("expander needs t > T_min = {}", self.t_ext),
                    })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The metric snapshot at time `t`.
    pub fn slice(&self, t: f64) -> Result<MetricField, GeometryError> {
        self.check_time(t)?;
        Ok(match self.kind {
            BackgroundKind::FlatPlane | BackgroundKind::GaussianExpander => MetricField::FlatPlane,
            BackgroundKind::FlatTorus => MetricField::FlatTorus {
                lx: self.periods.0,
                ly: self.periods.1,
            },
            BackgroundKind::RoundSphere => MetricField::Sphere {
                rho2: self.rho2(t)?,
            },
            BackgroundKind::Cigar => MetricField::Cigar,
        })
    }

    /// Evaluate `g, R, Ric, f, grad f, hess f` at `(p, t)`; the outputs are
    /// mutually consistent by construction (soliton equations hold pointwise).
    pub fn eval(&self, p: [f64; 2], t: f64) -> Result<BackgroundData, GeometryError> {
        self.check_time(t)?;
        let flat = [[1.0, 0.0], [0.0, 1.0]];
        let zero = [[0.0, 0.0], [0.0, 0.0]];
        Ok(match self.kind {
            BackgroundKind::FlatPlane | BackgroundKind::FlatTorus => BackgroundData {
                g: flat,
                r: 0.0,
                ric: zero,
                f: 0.0,
                grad_f: [0.0, 0.0],
                hess_f: zero,
            },
            BackgroundKind::GaussianExpander => {
                let s = t - self.t_ext; // > 0
                let f = -(p[0] * p[0] + p[1] * p[1]) / (4.0 * s);
                let grad_f = [-p[0] / (2.0 * s), -p[1] / (2.0 * s)];
                let h = -1.0 / (2.0 * s);
                BackgroundData {
                    g: flat,
                    r: 0.0,
                    ric: zero,
                    f,
                    grad_f,
                    hess_f: [[h, 0.0], [0.0, h]],
                }
            }
            BackgroundKind::RoundSphere => {
                let rho2 = self.rho2(t)?;
                let s = p[0].sin();
                let g = [[rho2, 0.0], [0.0, rho2 * s * s]];
                let r = 2.0 / rho2;
                let ric = [[g[0][0] / rho2, 0.0], [0.0, g[1][1] / rho2]];
                BackgroundData {
                    g,
                    r,
                    ric,
                    f: 0.0,
                    grad_f: [0.0, 0.0],
                    hess_f: zero,
                }
            }
            BackgroundKind::Cigar => {
                let g = CigarChart.eval_f64(p);
                let ric = ricci(&CigarChart, p);
                let r = scalar_curvature(&CigarChart, p);
                let w = 1.0 + p[0] * p[0] + p[1] * p[1];
                let f = -w.ln();
                let grad_f = [-2.0 * p[0] / w, -2.0 * p[1] / w];
                let hess_f = hessian(&CigarChart, &CigarPotential, p);
                BackgroundData {
                    g,
                    r,
                    ric,
                    f,
                    grad_f,
                    hess_f,
                }
            }
        })
    }
}

impl CigarChart {
    fn eval_f64(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        use crate::tensor::metric::MetricMap;
        self.eval(p)
    }
}
