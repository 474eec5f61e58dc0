//! Forward-mode dual numbers, nestable to arbitrary derivative order.
//!
//! `Dual<f64>` carries a value and one directional derivative; nesting
//! (`Dual<Dual<f64>>`, ...) propagates higher mixed partials exactly, so
//! derivatives of closed-form data carry rounding error only, never
//! finite-difference truncation. All geometric evaluators in this crate are
//! written against the [`Real`] scalar trait so the same code path produces
//! values and derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by `f64` and nested duals.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Lift a constant.
    fn cst(c: f64) -> Self;
    /// The underlying primal value (all derivative parts stripped).
    fn val(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
}

impl Real for f64 {
    #[inline]
    fn cst(c: f64) -> Self {
        c
    }
    #[inline]
    fn val(self) -> f64 {
        self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Value plus one derivative direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: Real> Dual<T> {
    #[inline]
    pub fn new(re: T, du: T) -> Self {
        Dual { re, du }
    }

    /// Constant (zero derivative).
    #[inline]
    pub fn constant(re: T) -> Self {
        Dual {
            re,
            du: T::cst(0.0),
        }
    }

    /// Variable seeded with unit derivative.
    #[inline]
    pub fn seeded(re: T) -> Self {
        Dual {
            re,
            du: T::cst(1.0),
        }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.du + o.du)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.du - o.du)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.du + self.du * o.re)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        Dual::new(
            self.re / o.re,
            (self.du * o.re - self.re * o.du) / (o.re * o.re),
        )
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.du)
    }
}

impl<T: Real> Real for Dual<T> {
    #[inline]
    fn cst(c: f64) -> Self {
        Dual::constant(T::cst(c))
    }
    #[inline]
    fn val(self) -> f64 {
        self.re.val()
    }
    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.du * self.re.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.du * self.re.sin()))
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.du * e)
    }
    #[inline]
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.du / self.re)
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.du / (T::cst(2.0) * s))
    }
}

/// Lift a point, seeding the derivative of coordinate `dir`.
#[inline]
pub fn lift_point<T: Real, const D: usize>(x: [T; D], dir: usize) -> [Dual<T>; D] {
    let mut out = [Dual::constant(T::cst(0.0)); D];
    for a in 0..D {
        out[a] = if a == dir {
            Dual::seeded(x[a])
        } else {
            Dual::constant(x[a])
        };
    }
    out
}
