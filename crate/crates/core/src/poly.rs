//! Dense univariate polynomials with complex coefficients.

use crate::scalar::{Scalar, C};
use num_traits::Zero;
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients in ascending order, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<C<T>>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<C<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        // Adding +0 turns -0 into +0 so printed coefficients are stable.
        for c in coeffs.iter_mut() {
            *c = C::new(c.re + T::zero(), c.im + T::zero());
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: C<T>) -> Self {
        Poly::new(vec![c])
    }

    /// `c * s^k`
    pub fn monomial(c: C<T>, k: usize) -> Self {
        let mut v = vec![C::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C<T> {
        self.coeffs.get(k).copied().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `s = 0`; `None` when identically zero.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, s: C<T>) -> C<T> {
        self.coeffs.iter().rev().fold(C::zero(), |acc, &c| acc * s + c)
    }

    /// Sum of `|c_k| |s|^k`, the natural scale for relative residuals.
    pub fn eval_abs(&self, s: C<T>) -> T {
        let r = s.norm();
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * T::lit(k as f64)).collect())
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Poly::new(self.coeffs.iter().map(|&x| x * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Poly::constant(C::new(T::one(), T::zero()));
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Substitute `s -> s + shift`.
    pub fn shifted(&self, shift: C<T>) -> Self {
        let lin = Poly::new(vec![shift, C::new(T::one(), T::zero())]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| &(&acc * &lin) + &Poly::constant(c))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(C<T>) -> C<U>) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    /// Coefficients as `[re, im]` pairs in f64.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.coeffs.iter().map(|c| [c.re.as_f64(), c.im.as_f64()]).collect()
    }
}

impl<T: Scalar> Serialize for Poly<T> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(ser)
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Poly<f64> {
        Poly::new(c.iter().map(|&x| num_complex::Complex::new(x, 0.0)).collect())
    }

    #[test]
    fn trailing_zeros_are_dropped() {
        assert_eq!(p(&[1.0, 2.0, 0.0, 0.0]).degree(), Some(1));
        assert!(p(&[0.0]).is_zero());
        assert_eq!(p(&[0.0]).degree(), None);
        assert_eq!(p(&[0.0, 0.0, 3.0]).order_at_zero(), Some(2));
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1.0, 1.0]);
        assert_eq!(a.pow(3), p(&[1.0, 3.0, 3.0, 1.0]));
        assert!((&(&a * &a) - &a.pow(2)).is_zero());
        assert_eq!(a.pow(3).derivative(), p(&[3.0, 6.0, 3.0]));
        // s -> s + 1 sends s^2 to (s+1)^2.
        assert_eq!(p(&[0.0, 0.0, 1.0]).shifted(num_complex::Complex::new(1.0, 0.0)), p(&[1.0, 2.0, 1.0]));
        assert_eq!((-&a).coeff(5), num_complex::Complex::new(0.0, 0.0));
    }

    #[test]
    fn negative_zero_prints_as_zero() {
        let z = Poly::new(vec![num_complex::Complex::new(-0.0f64, -0.0)]);
        assert!(z.is_zero());
        let q = -&p(&[0.0, 1.0]);
        assert_eq!(q.to_pairs()[0], [0.0, 0.0]);
        assert!(q.to_pairs()[0][0].is_sign_positive());
    }
}
