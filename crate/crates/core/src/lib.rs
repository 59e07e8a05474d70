//! Gauge algebras of deformed elliptic fibrations from string junctions.
//!
//! A Weierstrass model `y^2 = x^3 + f(s) x + g(s)` whose discriminant splits a
//! singular fiber into simple points is turned into an ordered list of
//! vanishing cycles, the junction lattice over them, and the root system that
//! lattice carries. The numeric stages are generic over [`Scalar`] (`f32` or
//! `f64`); lattice stages are exact integer arithmetic.

// `!(a < b)` is used on purpose so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cycles;
pub mod error;
pub mod junctions;
pub mod model;
pub mod monodromy;
pub mod pipeline;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod tracking;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Complex64 = num_complex::Complex<f64>;
pub type Poly64 = poly::Poly<f64>;
pub type Model = model::WeierstrassModel<f64>;
pub type Model32 = model::WeierstrassModel<f32>;
