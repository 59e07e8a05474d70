//! Weierstrass models `y^2 = x^3 + f(s) x + g(s)` over a disc in the `s`-plane.

pub mod kodaira;
pub mod parse;
pub mod templates;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Scalar, C};
use kodaira::{classify_kodaira, FiberType};
use num_complex::Complex;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Clone, Debug)]
pub struct WeierstrassModel<T: Scalar> {
    f: Poly<T>,
    g: Poly<T>,
    disc: Poly<T>,
    params: BTreeMap<String, C<T>>,
}

impl<T: Scalar> WeierstrassModel<T> {
    pub fn new(f: Poly<T>, g: Poly<T>) -> Result<Self> {
        Self::with_params(f, g, BTreeMap::new())
    }

    pub fn with_params(f: Poly<T>, g: Poly<T>, params: BTreeMap<String, C<T>>) -> Result<Self> {
        let disc = discriminant(&f, &g);
        if disc.is_zero() {
            return Err(Error::DegenerateDiscriminant);
        }
        Ok(WeierstrassModel { f, g, disc, params })
    }

    pub fn parse(src: &str) -> Result<Self> {
        Self::parse_with(src, &BTreeMap::new())
    }

    pub fn parse_with(src: &str, overrides: &BTreeMap<String, Complex<f64>>) -> Result<Self> {
        let m = parse::parse_polys::<T>(src, overrides)?;
        Self::with_params(m.f, m.g, m.params)
    }

    pub fn f(&self) -> &Poly<T> {
        &self.f
    }

    pub fn g(&self) -> &Poly<T> {
        &self.g
    }

    pub fn discriminant(&self) -> &Poly<T> {
        &self.disc
    }

    pub fn params(&self) -> &BTreeMap<String, C<T>> {
        &self.params
    }

    /// Coefficients `(f(s), g(s))` of the fiber cubic.
    pub fn fiber(&self, s: C<T>) -> (C<T>, C<T>) {
        (self.f.eval(s), self.g.eval(s))
    }

    /// Fiber type at `s = 0` read off from vanishing orders.
    pub fn kodaira_at_zero(&self) -> Result<FiberType> {
        let ord = |p: &Poly<T>| p.order_at_zero().map(|k| k as u32);
        classify_kodaira(ord(&self.f), ord(&self.g), ord(&self.disc))
    }

    /// Text form accepted by [`WeierstrassModel::parse`]; numbers are printed
    /// in shortest round-trip form so parsing it back is exact.
    pub fn to_spec_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "f = {}", poly_text(&self.f));
        let _ = writeln!(out, "g = {}", poly_text(&self.g));
        out
    }
}

/// `4 f^3 + 27 g^2`
pub fn discriminant<T: Scalar>(f: &Poly<T>, g: &Poly<T>) -> Poly<T> {
    let four = C::new(T::lit(4.0), T::zero());
    let tw7 = C::new(T::lit(27.0), T::zero());
    &f.pow(3).scale(four) + &g.pow(2).scale(tw7)
}

fn poly_text<T: Scalar>(p: &Poly<T>) -> String {
    let terms: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.re != T::zero() || c.im != T::zero())
        .map(|(k, c)| {
            let lit = format!("({:?} + {:?}i)", c.re, c.im).replace("+ -", "- ");
            match k {
                0 => lit,
                1 => format!("{lit}*s"),
                _ => format!("{lit}*s^{k}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}
