//! Truncated Taylor series arithmetic.
//!
//! A [`Series`] holds the normalized coefficients `a_k = f^(k)(t0) / k!` of a
//! function around an expansion point, up to [`ORDER`]. Every analytic chart
//! derivative in the crate goes through this type: closed-form curves are
//! evaluated on a series argument, and ODE trajectories are expanded by the
//! Taylor recursion in [`crate::ode`].

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Highest derivative order carried by a [`Series`].
pub const ORDER: usize = 3;
const LEN: usize = ORDER + 1;

/// Scalar types the geometric formulas are generic over (`f64` and [`Series`]).
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::cst(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Series(pub [f64; LEN]);

impl Series {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Series(c)
    }

    /// The identity map `t0 + tau`.
    pub fn variable(t0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = t0;
        c[1] = 1.0;
        Series(c)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.0[k] * factorial(k)
    }

    /// Series of the derivative (the top coefficient is lost).
    pub fn differentiate(&self) -> Series {
        let mut c = [0.0; LEN];
        for k in 0..ORDER {
            c[k] = (k + 1) as f64 * self.0[k + 1];
        }
        Series(c)
    }

    fn sin_cos(self) -> (Series, Series) {
        let a = self.0;
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..LEN {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for i in 1..=k {
                ds += i as f64 * a[i] * c[k - i];
                dc -= i as f64 * a[i] * s[k - i];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Series(s), Series(c))
    }

    fn sinh_cosh(self) -> (Series, Series) {
        let a = self.0;
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        s[0] = a[0].sinh();
        c[0] = a[0].cosh();
        for k in 1..LEN {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for i in 1..=k {
                ds += i as f64 * a[i] * c[k - i];
                dc += i as f64 * a[i] * s[k - i];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Series(s), Series(c))
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Scalar for Series {
    fn cst(v: f64) -> Self {
        Series::constant(v)
    }
    fn value(&self) -> f64 {
        self.0[0]
    }
    fn sqrt(self) -> Self {
        let a = self.0;
        let mut s = [0.0; LEN];
        s[0] = a[0].sqrt();
        for k in 1..LEN {
            let mut acc = a[k];
            for i in 1..k {
                acc -= s[i] * s[k - i];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Series(s)
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn sinh(self) -> Self {
        self.sinh_cosh().0
    }
    fn cosh(self) -> Self {
        self.sinh_cosh().1
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        let mut c = self.0;
        for (ci, ri) in c.iter_mut().zip(rhs.0) {
            *ci += ri;
        }
        Series(c)
    }
}

impl AddAssign for Series {
    fn add_assign(&mut self, rhs: Series) {
        *self = *self + rhs;
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self + (-rhs)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series(self.0.map(|v| -v))
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            for i in 0..=k {
                c[k] += self.0[i] * rhs.0[k - i];
            }
        }
        Series(c)
    }
}

impl Div for Series {
    type Output = Series;
    fn div(self, rhs: Series) -> Series {
        let b = rhs.0;
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            let mut acc = self.0[k];
            for i in 1..=k {
                acc -= b[i] * c[k - i];
            }
            c[k] = acc / b[0];
        }
        Series(c)
    }
}

impl Add<f64> for Series {
    type Output = Series;
    fn add(mut self, rhs: f64) -> Series {
        self.0[0] += rhs;
        self
    }
}

impl Sub<f64> for Series {
    type Output = Series;
    fn sub(mut self, rhs: f64) -> Series {
        self.0[0] -= rhs;
        self
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(self, rhs: f64) -> Series {
        Series(self.0.map(|v| v * rhs))
    }
}

impl Div<f64> for Series {
    type Output = Series;
    fn div(self, rhs: f64) -> Series {
        Series(self.0.map(|v| v / rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn check(s: Series, derivs: [f64; 4]) {
        for k in 0..4 {
            assert_relative_eq!(s.derivative(k), derivs[k], epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn elementary_functions_match_closed_form_derivatives() {
        let t = 0.7;
        let x = Series::variable(t);
        check(x.sin(), [t.sin(), t.cos(), -t.sin(), -t.cos()]);
        check(x.cos(), [t.cos(), -t.sin(), -t.cos(), t.sin()]);
        check(x.sinh(), [t.sinh(), t.cosh(), t.sinh(), t.cosh()]);
        check(x.cosh(), [t.cosh(), t.sinh(), t.cosh(), t.sinh()]);
        let r = t.sqrt();
        check(x.sqrt(), [r, 0.5 / r, -0.25 / (t * r), 0.375 / (t * t * r)]);
        check(Series::constant(1.0) / x, [1.0 / t, -1.0 / (t * t), 2.0 / t.powi(3), -6.0 / t.powi(4)]);
    }

    #[test]
    fn chain_rule_through_composition() {
        // d/dt sin(t^2) = 2t cos(t^2), second derivative 2cos(t^2) - 4t^2 sin(t^2)
        let t: f64 = 0.3;
        let x = Series::variable(t);
        let s = (x * x).sin();
        let u = t * t;
        assert_relative_eq!(s.derivative(1), 2.0 * t * u.cos(), epsilon = 1e-14);
        assert_relative_eq!(s.derivative(2), 2.0 * u.cos() - 4.0 * u * u.sin(), epsilon = 1e-14);
    }
}
