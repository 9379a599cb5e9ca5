//! Forward-mode second-order Taylor arithmetic.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// Value, Euclidean gradient and Euclidean Hessian of a scalar function at
/// a fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct Taylor2 {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Taylor2 {
    pub fn constant(c: f64, dim: usize) -> Self {
        Self {
            value: c,
            grad: DVector::zeros(dim),
            hess: DMatrix::zeros(dim, dim),
        }
    }

    /// The coordinate function `x_i` seeded at value `v`.
    pub fn variable(v: f64, i: usize, dim: usize) -> Self {
        let mut t = Self::constant(v, dim);
        t.grad[i] = 1.0;
        t
    }

    /// All coordinate functions seeded at `p`.
    pub fn seed(p: &[f64]) -> Vec<Self> {
        let d = p.len();
        p.iter()
            .enumerate()
            .map(|(i, &v)| Self::variable(v, i, d))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut hess = &self.hess * f1;
        if f2 != 0.0 {
            hess.ger(f2, &self.grad, &self.grad, 1.0);
        }
        Self {
            value: f0,
            grad: &self.grad * f1,
            hess,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
    }

    fn recip_parts(&self) -> Self {
        let v = self.value;
        let r = 1.0 / v;
        self.compose(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;

    fn add(self, rhs: Taylor2) -> Taylor2 {
        Taylor2 {
            value: self.value + rhs.value,
            grad: self.grad + rhs.grad,
            hess: self.hess + rhs.hess,
        }
    }
}

impl Sub for Taylor2 {
    type Output = Taylor2;

    fn sub(self, rhs: Taylor2) -> Taylor2 {
        Taylor2 {
            value: self.value - rhs.value,
            grad: self.grad - rhs.grad,
            hess: self.hess - rhs.hess,
        }
    }
}

impl Neg for Taylor2 {
    type Output = Taylor2;

    fn neg(self) -> Taylor2 {
        Taylor2 {
            value: -self.value,
            grad: -self.grad,
            hess: -self.hess,
        }
    }
}

fn product(a: &Taylor2, b: &Taylor2, value: f64) -> Taylor2 {
    let mut hess = &b.hess * a.value + &a.hess * b.value;
    hess.ger(1.0, &a.grad, &b.grad, 1.0);
    hess.ger(1.0, &b.grad, &a.grad, 1.0);
    Taylor2 {
        value,
        grad: &b.grad * a.value + &a.grad * b.value,
        hess,
    }
}

impl Mul for Taylor2 {
    type Output = Taylor2;

    fn mul(self, rhs: Taylor2) -> Taylor2 {
        let v = self.value * rhs.value;
        product(&self, &rhs, v)
    }
}

impl Div for Taylor2 {
    type Output = Taylor2;

    fn div(self, rhs: Taylor2) -> Taylor2 {
        let v = self.value / rhs.value;
        product(&self, &rhs.recip_parts(), v)
    }
}

impl Real for Taylor2 {
    fn value(&self) -> f64 {
        self.value
    }

    fn lift(&self, c: f64) -> Self {
        Taylor2::constant(c, self.dim())
    }

    fn scale(&self, c: f64) -> Self {
        Taylor2 {
            value: self.value * c,
            grad: &self.grad * c,
            hess: &self.hess * c,
        }
    }

    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    fn ln(&self) -> Self {
        let v = self.value;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    fn powf(&self, e: f64) -> Self {
        let v = self.value;
        let f1 = if e == 0.0 { 0.0 } else { e * v.powf(e - 1.0) };
        let f2 = if e == 0.0 || e == 1.0 {
            0.0
        } else {
            e * (e - 1.0) * v.powf(e - 2.0)
        };
        self.compose(v.powf(e), f1, f2)
    }

    fn powi(&self, n: i32) -> Self {
        let v = self.value;
        let nf = n as f64;
        let f1 = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
        let f2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * v.powi(n - 2)
        };
        self.compose(v.powi(n), f1, f2)
    }

    fn abs(&self) -> Self {
        if self.value < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(&[f64]) -> f64, t: &Taylor2, p: &[f64]) {
        let h = 1e-4;
        let d = p.len();
        for i in 0..d {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[i] += h;
            b[i] -= h;
            let g = (f(&a) - f(&b)) / (2.0 * h);
            assert!((g - t.grad[i]).abs() <= 1e-6 * (1.0 + g.abs()), "grad {i}");
            for j in 0..d {
                let mut pp = p.to_vec();
                let mut pm = p.to_vec();
                let mut mp = p.to_vec();
                let mut mm = p.to_vec();
                pp[i] += h;
                pp[j] += h;
                pm[i] += h;
                pm[j] -= h;
                mp[i] -= h;
                mp[j] += h;
                mm[i] -= h;
                mm[j] -= h;
                let hij = (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h * h);
                assert!(
                    (hij - t.hess[(i, j)]).abs() <= 1e-5 * (1.0 + hij.abs()),
                    "hess {i}{j}: {hij} vs {}",
                    t.hess[(i, j)]
                );
            }
        }
    }

    fn mixed<R: Real>(x: &[R]) -> R {
        let a = x[0].clone() * x[1].clone() / (x[2].square() + x[0].lift(1.0));
        let b = (x[0].square() + x[1].square()).sqrt().ln();
        let c = x[2].powf(1.5) + x[1].powi(3) - x[0].exp().scale(0.5);
        a + b + c
    }

    #[test]
    fn matches_finite_differences() {
        let p = [0.7, -1.3, 2.1];
        let t = mixed(&Taylor2::seed(&p));
        fd_check(mixed, &t, &p);
    }

    #[test]
    fn value_slot_is_bit_identical() {
        let p = [0.37, 1.91, 0.05];
        let t = mixed(&Taylor2::seed(&p));
        assert_eq!(t.value.to_bits(), mixed(&p).to_bits());
    }

    #[test]
    fn integer_powers_at_zero_stay_finite() {
        let x = Taylor2::variable(0.0, 0, 1);
        let y = x.powi(1);
        assert!(y.is_finite());
        let z = x.powi(2);
        assert_eq!(z.hess[(0, 0)], 2.0);
        let w = x.powf(2.0);
        assert!(w.is_finite());
        assert_eq!(w.hess[(0, 0)], 2.0);
    }

    #[test]
    fn bilinear_product() {
        let t = Taylor2::seed(&[2.0, 3.0, 5.0]);
        let prod = t[0].clone() * t[1].clone();
        assert_eq!(prod.grad.as_slice(), &[3.0, 2.0, 0.0]);
        assert_eq!(prod.hess[(0, 1)], 1.0);
        assert_eq!(prod.hess[(1, 0)], 1.0);
        assert_eq!(prod.hess[(0, 0)], 0.0);
    }
}
