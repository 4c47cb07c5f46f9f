//! Scalar abstraction shared by every operator and functional in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar backing all operators (`f32` or `f64`).
///
/// Tolerances throughout the crate are written as `f64` literals and pass
/// through [`Real::tol`], which never lets a tolerance drop below a small
/// multiple of the type's machine epsilon. For `f64` every tolerance used by
/// the crate is above that floor and therefore unchanged.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Machine epsilon of the type, widened to `f64`.
    const EPSILON: f64;

    /// Converts a literal. Panics only for values the type cannot represent.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// A tolerance of at least `x`, floored at `1e3 * EPSILON`.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x.max(1e3 * Self::EPSILON))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }

    #[inline]
    fn neg_infinity() -> Self {
        Self::lit(f64::NEG_INFINITY)
    }
}

impl Real for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn cabs<T: Real>(z: &Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}
