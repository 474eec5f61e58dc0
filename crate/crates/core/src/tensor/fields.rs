//! Composable tensor fields with exact covariant differentiation.
//!
//! A [`TensorMap`] is a closed-form tensor field (all indices down) evaluable
//! at any [`Real`] scalar type; [`CovDeriv`] wraps one and is again a
//! `TensorMap` of rank + 1, with the new (derivative) index first. Chains of
//! `CovDeriv` realize `nabla^k T` exactly, the partial-derivative side being
//! produced by one more dual-number level per derivative.

use crate::dual::{lift_point, Real};
use crate::tensor::calculus::{christoffel, grad, hessian, ricci, riemann_lower, scalar_curvature};
use crate::tensor::metric::{MetricMap, ScalarMap};

/// Closed-form tensor field of dynamic rank; components row-major, indices down.
pub trait TensorMap<const D: usize>: Sync {
    fn rank(&self) -> usize;
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T>;
}

const MAX_RANK: usize = 6;

#[inline]
fn unflatten<const D: usize>(mut c: usize, rank: usize) -> [usize; MAX_RANK] {
    let mut idx = [0usize; MAX_RANK];
    for slot in (0..rank).rev() {
        idx[slot] = c % D;
        c /= D;
    }
    idx
}

#[inline]
fn flatten<const D: usize>(idx: &[usize; MAX_RANK], rank: usize) -> usize {
    let mut c = 0usize;
    for slot in 0..rank {
        c = c * D + idx[slot];
    }
    c
}

/// Covariant derivative of `field`; the derivative index leads:
/// `out[k, i1..ir] = nabla_k T_{i1..ir}`.
pub struct CovDeriv<'a, const D: usize, M: MetricMap<D>, F: TensorMap<D>> {
    pub metric: &'a M,
    pub field: &'a F,
}

impl<'a, const D: usize, M: MetricMap<D>, F: TensorMap<D>> CovDeriv<'a, D, M, F> {
    pub fn new(metric: &'a M, field: &'a F) -> Self {
        CovDeriv { metric, field }
    }
}

impl<'a, const D: usize, M: MetricMap<D>, F: TensorMap<D>> TensorMap<D> for CovDeriv<'a, D, M, F> {
    fn rank(&self) -> usize {
        self.field.rank() + 1
    }

    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        let r = self.field.rank();
        assert!(r < MAX_RANK, "tensor rank limit exceeded");
        let base = self.field.eval(x);
        let n = base.len();
        let gam = christoffel(self.metric, x);
        let mut out = vec![T::cst(0.0); n * D];
        for k in 0..D {
            let lifted = self.field.eval(lift_point(x, k));
            for c in 0..n {
                let idx = unflatten::<D>(c, r);
                let mut v = lifted[c].du;
                for slot in 0..r {
                    let orig = idx[slot];
                    let mut jdx = idx;
                    for s in 0..D {
                        jdx[slot] = s;
                        v = v - gam[s][k][orig] * base[flatten::<D>(&jdx, r)];
                    }
                }
                out[k * n + c] = v;
            }
        }
        out
    }
}

/// Rank-1 field: gradient of a scalar.
pub struct GradOf<'a, const D: usize, S: ScalarMap<D>>(pub &'a S);

impl<'a, const D: usize, S: ScalarMap<D>> TensorMap<D> for GradOf<'a, D, S> {
    fn rank(&self) -> usize {
        1
    }
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        grad(self.0, x).to_vec()
    }
}

/// Rank-2 field: covariant Hessian of a scalar.
pub struct HessOf<'a, const D: usize, M: MetricMap<D>, S: ScalarMap<D>> {
    pub metric: &'a M,
    pub scalar: &'a S,
}

impl<'a, const D: usize, M: MetricMap<D>, S: ScalarMap<D>> TensorMap<D> for HessOf<'a, D, M, S> {
    fn rank(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        let h = hessian(self.metric, self.scalar, x);
        let mut out = Vec::with_capacity(D * D);
        for row in h.iter() {
            out.extend_from_slice(row);
        }
        out
    }
}

/// Rank-2 field: Ricci tensor of the metric.
pub struct RicciOf<'a, const D: usize, M: MetricMap<D>>(pub &'a M);

impl<'a, const D: usize, M: MetricMap<D>> TensorMap<D> for RicciOf<'a, D, M> {
    fn rank(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        let r = ricci(self.0, x);
        let mut out = Vec::with_capacity(D * D);
        for row in r.iter() {
            out.extend_from_slice(row);
        }
        out
    }
}

/// Rank-4 field: fully lowered Riemann tensor.
pub struct RiemannLowerOf<'a, const D: usize, M: MetricMap<D>>(pub &'a M);

impl<'a, const D: usize, M: MetricMap<D>> TensorMap<D> for RiemannLowerOf<'a, D, M> {
    fn rank(&self) -> usize {
        4
    }
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        let r = riemann_lower(self.0, x);
        let mut out = Vec::with_capacity(D * D * D * D);
        for a in r.iter() {
            for b in a.iter() {
                for c in b.iter() {
                    out.extend_from_slice(c);
                }
            }
        }
        out
    }
}

/// Scalar curvature as a scalar field (so it can be Hessian'd).
pub struct ScalarCurvOf<'a, const D: usize, M: MetricMap<D>>(pub &'a M);

impl<'a, const D: usize, M: MetricMap<D>> ScalarMap<D> for ScalarCurvOf<'a, D, M> {
    fn eval<T: Real>(&self, x: [T; D]) -> T {
        scalar_curvature(self.0, x)
    }
}

/// Laplace-Beltrami of a scalar, as a scalar field.
pub struct LaplacianOf<'a, const D: usize, M: MetricMap<D>, S: ScalarMap<D>> {
    pub metric: &'a M,
    pub scalar: &'a S,
}

impl<'a, const D: usize, M: MetricMap<D>, S: ScalarMap<D>> ScalarMap<D>
    for LaplacianOf<'a, D, M, S>
{
    fn eval<T: Real>(&self, x: [T; D]) -> T {
        crate::tensor::calculus::laplacian(self.metric, self.scalar, x)
    }
}

/// Conjugate-heat rate for `f = log u`: `f_t = -Delta f - |grad f|^2 + sign_r * R`
/// (`sign_r = +1` under Ricci flow, `-1` under backward Ricci flow).
pub struct LogUHeatRate<'a, const D: usize, M: MetricMap<D>, S: ScalarMap<D>> {
    pub metric: &'a M,
    pub log_u: &'a S,
    pub sign_r: f64,
}

impl<'a, const D: usize, M: MetricMap<D>, S: ScalarMap<D>> ScalarMap<D>
    for LogUHeatRate<'a, D, M, S>
{
    fn eval<T: Real>(&self, x: [T; D]) -> T {
        let lap = crate::tensor::calculus::laplacian(self.metric, self.log_u, x);
        let gs = crate::tensor::calculus::grad_norm_sq(self.metric, self.log_u, x);
        let r = scalar_curvature(self.metric, x);
        -lap - gs + T::cst(self.sign_r) * r
    }
}

/// Rank-1 field with trig-polynomial components (identity-check probes).
pub struct PolyOneForm<const D: usize> {
    pub comps: Vec<crate::tensor::metric::TrigPoly<D>>,
}

impl<const D: usize> TensorMap<D> for PolyOneForm<D> {
    fn rank(&self) -> usize {
        1
    }
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }
}

/// Rank-2 field with trig-polynomial components.
pub struct PolyTwoTensor<const D: usize> {
    pub comps: Vec<crate::tensor::metric::TrigPoly<D>>, // D*D entries, row-major
}

impl<const D: usize> TensorMap<D> for PolyTwoTensor<D> {
    fn rank(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: [T; D]) -> Vec<T> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }
}
