//! Minimal real-number abstraction shared by plain `f64` evaluation and
//! second-order Taylor arithmetic.
//!
//! Geometry evaluators (fields, gauges) and the expression evaluator are
//! written once against [`Real`] so that the value slot of a Taylor
//! evaluation is computed by exactly the same sequence of `f64` operations
//! as the plain evaluation.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// The plain value.
    fn value(&self) -> f64;

    /// A constant with the same shape as `self` (same derivative dimension).
    fn lift(&self, c: f64) -> Self;

    fn scale(&self, c: f64) -> Self;

    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powf(&self, e: f64) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn abs(&self) -> Self;

    /// True when every carried number is finite.
    fn all_finite(&self) -> bool;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Real for f64 {
    #[inline]
    fn value(&self) -> f64 {
        *self
    }

    #[inline]
    fn lift(&self, c: f64) -> Self {
        c
    }

    #[inline]
    fn scale(&self, c: f64) -> Self {
        self * c
    }

    #[inline]
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    #[inline]
    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    #[inline]
    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    #[inline]
    fn powf(&self, e: f64) -> Self {
        f64::powf(*self, e)
    }

    #[inline]
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }

    #[inline]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    #[inline]
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

/// Sum of squares of a slice, accumulated left to right.
pub fn sum_sq<R: Real>(xs: &[R], zero: &R) -> R {
    xs.iter()
        .fold(zero.lift(0.0), |acc, x| acc + x.clone() * x.clone())
}
