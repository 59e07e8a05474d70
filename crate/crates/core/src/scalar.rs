//! Floating point abstraction shared by the numeric stages.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar used for roots, periods and paths. Implemented for `f32` and `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub type C<T> = Complex<T>;

pub fn cplx<T: Scalar>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub fn to_c64<T: Scalar>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

pub fn from_c64<T: Scalar>(z: Complex<f64>) -> C<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

/// Skew product of 2d real vectors, `a.re*b.im - a.im*b.re`.
pub fn cross<T: Scalar>(a: C<T>, b: C<T>) -> T {
    a.re * b.im - a.im * b.re
}
