//! flowlab-core: a numerical laboratory for mean curvature flow inside an
//! ambient surface evolving by Ricci or backward Ricci flow.
//!
//! The crate has four layers:
//! - [`tensor`]: exact pointwise Riemannian calculus on closed-form metrics
//!   (nested dual numbers), with residual checks for every identity the flow
//!   computations rely on;
//! - [`geometry`]: 2-D ambient metrics (analytic backgrounds, conformal torus
//!   grids) and immersed closed curves;
//! - [`flows`]: time integration of the ambient metric, the conjugate heat
//!   equation and curve shortening;
//! - [`monitor`]: the weighted-length monotonicity balance, mass integrals,
//!   soliton trace terms and the Harnack quadratics.
//!
//! All evaluators are pure; grids and trajectories are immutable snapshots.

// Index loops mirror the tensor index notation throughout; negated
// comparisons keep the validation paths NaN-rejecting.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dual;
pub mod error;
pub mod flows;
pub mod geometry;
pub mod monitor;
pub mod tensor;

/// Direction of the ambient metric evolution `g_t = -2 Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowMode {
    /// `Q = Ric`
    Ricci,
    /// `Q = -Ric`
    BackwardRicci,
}
