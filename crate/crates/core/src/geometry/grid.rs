//! Periodic scalar grids with centered finite-difference stencils.

use crate::error::GeometryError;

/// Stencil accuracy order for grid derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilOrder {
    Two,
    Four,
}

/// A scalar field sampled on a periodic `nx x ny` grid over `[0,Lx) x [0,Ly)`.
/// Node `(i, j)` sits at `(i hx, j hy)`; storage is row-major in `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    data: Vec<f64>,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nx * ny);
        Grid2 {
            nx,
            ny,
            lx,
            ly,
            data,
        }
    }

    pub fn constant(nx: usize, ny: usize, lx: f64, ly: f64, c: f64) -> Self {
        Self::new(nx, ny, lx, ly, vec![c; nx * ny])
    }

    pub fn from_fn(nx: usize, ny: usize, lx: f64, ly: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let (hx, hy) = (lx / nx as f64, ly / ny as f64);
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i as f64 * hx, j as f64 * hy));
            }
        }
        Self::new(nx, ny, lx, ly, data)
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn node_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[j * self.nx + i]
    }

    /// Periodic access with signed offsets.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        let nx = self.nx as isize;
        let ny = self.ny as isize;
        let iw = i.rem_euclid(nx) as usize;
        let jw = j.rem_euclid(ny) as usize;
        self.data[jw * self.nx + iw]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn check_finite(&self) -> Result<(), GeometryError> {
        for j in 0..self.ny {
            for i in 0..self.nx {
                if !self.node(i, j).is_finite() {
                    return Err(GeometryError::NonFiniteField { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid2 {
        Grid2 {
            nx: self.nx,
            ny: self.ny,
            lx: self.lx,
            ly: self.ly,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &Grid2, f: impl Fn(f64, f64) -> f64) -> Grid2 {
        assert_eq!(self.data.len(), other.data.len());
        Grid2 {
            nx: self.nx,
            ny: self.ny,
            lx: self.lx,
            ly: self.ly,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Grid translated by whole cells (an exact isometry of the torus).
    pub fn shifted(&self, di: isize, dj: isize) -> Grid2 {
        let mut out = self.clone();
        for j in 0..self.ny {
            for i in 0..self.nx {
                *out.node_mut(i, j) = self.at(i as isize - di, j as isize - dj);
            }
        }
        out
    }

    // -- point stencils ----------------------------------------------------

    #[inline]
    pub fn dx_at(&self, i: isize, j: isize, order: StencilOrder) -> f64 {
        let h = self.hx();
        match order {
            StencilOrder::Two => (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * h),
            StencilOrder::Four => {
                (-self.at(i + 2, j) + 8.0 * self.at(i + 1, j) - 8.0 * self.at(i - 1, j)
                    + self.at(i - 2, j))
                    / (12.0 * h)
            }
        }
    }

    #[inline]
    pub fn dy_at(&self, i: isize, j: isize, order: StencilOrder) -> f64 {
        let h = self.hy();
        match order {
            StencilOrder::Two => (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * h),
            StencilOrder::Four => {
                (-self.at(i, j + 2) + 8.0 * self.at(i, j + 1) - 8.0 * self.at(i, j - 1)
                    + self.at(i, j - 2))
                    / (12.0 * h)
            }
        }
    }

    #[inline]
    pub fn dxx_at(&self, i: isize, j: isize, order: StencilOrder) -> f64 {
        let h2 = self.hx() * self.hx();
        match order {
            StencilOrder::Two => (self.at(i + 1, j) - 2.0 * self.at(i, j) + self.at(i - 1, j)) / h2,
            StencilOrder::Four => {
                (-self.at(i + 2, j) + 16.0 * self.at(i + 1, j) - 30.0 * self.at(i, j)
                    + 16.0 * self.at(i - 1, j)
                    - self.at(i - 2, j))
                    / (12.0 * h2)
            }
        }
    }

    #[inline]
    pub fn dyy_at(&self, i: isize, j: isize, order: StencilOrder) -> f64 {
        let h2 = self.hy() * self.hy();
        match order {
            StencilOrder::Two => (self.at(i, j + 1) - 2.0 * self.at(i, j) + self.at(i, j - 1)) / h2,
            StencilOrder::Four => {
                (-self.at(i, j + 2) + 16.0 * self.at(i, j + 1) - 30.0 * self.at(i, j)
                    + 16.0 * self.at(i, j - 1)
                    - self.at(i, j - 2))
                    / (12.0 * h2)
            }
        }
    }

    #[inline]
    pub fn dxy_at(&self, i: isize, j: isize, order: StencilOrder) -> f64 {
        // cross derivative: x-stencil of the y-derivative
        let h = self.hx();
        match order {
            StencilOrder::Two => {
                (self.dy_at(i + 1, j, order) - self.dy_at(i - 1, j, order)) / (2.0 * h)
            }
            StencilOrder::Four => {
                (-self.dy_at(i + 2, j, order) + 8.0 * self.dy_at(i + 1, j, order)
                    - 8.0 * self.dy_at(i - 1, j, order)
                    + self.dy_at(i - 2, j, order))
                    / (12.0 * h)
            }
        }
    }

    #[inline]
    pub fn laplacian_at(&self, i: isize, j: isize, order: StencilOrder) -> f64 {
        self.dxx_at(i, j, order) + self.dyy_at(i, j, order)
    }

    // -- whole-grid operators ----------------------------------------------

    pub fn laplacian(&self, order: StencilOrder) -> Grid2 {
        let mut out = self.clone();
        for j in 0..self.ny {
            for i in 0..self.nx {
                *out.node_mut(i, j) = self.laplacian_at(i as isize, j as isize, order);
            }
        }
        out
    }

    pub fn dx(&self, order: StencilOrder) -> Grid2 {
        let mut out = self.clone();
        for j in 0..self.ny {
            for i in 0..self.nx {
                *out.node_mut(i, j) = self.dx_at(i as isize, j as isize, order);
            }
        }
        out
    }

    pub fn dy(&self, order: StencilOrder) -> Grid2 {
        let mut out = self.clone();
        for j in 0..self.ny {
            for i in 0..self.nx {
                *out.node_mut(i, j) = self.dy_at(i as isize, j as isize, order);
            }
        }
        out
    }

    // -- interpolation -----------------------------------------------------

    /// Wrap a chart point into the fundamental domain.
    #[inline]
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0].rem_euclid(self.lx), p[1].rem_euclid(self.ly)]
    }

    /// Bilinear interpolation at an arbitrary chart point.
    pub fn bilinear(&self, p: [f64; 2]) -> f64 {
        let q = self.wrap(p);
        let (hx, hy) = (self.hx(), self.hy());
        let fi = q[0] / hx;
        let fj = q[1] / hy;
        let i0 = fi.floor() as isize;
        let j0 = fj.floor() as isize;
        let ax = fi - i0 as f64;
        let ay = fj - j0 as f64;
        let v00 = self.at(i0, j0);
        let v10 = self.at(i0 + 1, j0);
        let v01 = self.at(i0, j0 + 1);
        let v11 = self.at(i0 + 1, j0 + 1);
        v00 * (1.0 - ax) * (1.0 - ay) + v10 * ax * (1.0 - ay) + v01 * (1.0 - ax) * ay
            + v11 * ax * ay
    }

    /// Bilinear interpolation of a node-level functional (e.g. a stencil),
    /// evaluated only at the four surrounding nodes.
    pub fn bilinear_of(&self, p: [f64; 2], node_val: impl Fn(isize, isize) -> f64) -> f64 {
        let q = self.wrap(p);
        let (hx, hy) = (self.hx(), self.hy());
        let fi = q[0] / hx;
        let fj = q[1] / hy;
        let i0 = fi.floor() as isize;
        let j0 = fj.floor() as isize;
        let ax = fi - i0 as f64;
        let ay = fj - j0 as f64;
        node_val(i0, j0) * (1.0 - ax) * (1.0 - ay)
            + node_val(i0 + 1, j0) * ax * (1.0 - ay)
            + node_val(i0, j0 + 1) * (1.0 - ax) * ay
            + node_val(i0 + 1, j0 + 1) * ax * ay
    }
}
