//! Scalar abstraction shared by every engine.

use nalgebra as na;
use num_traits as nt;
use std::fmt::{Debug, Display};

/// Real floating point type the engines are generic over (`f32` or `f64`).
///
/// Transcendental functions come from [`na::RealField`]; literal conversion
/// goes through [`nt::FromPrimitive`]/[`nt::ToPrimitive`].
pub trait Real:
    na::RealField + Copy + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + Debug + Display
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Machine epsilon of the type.
    fn eps() -> Self;

    /// A requested absolute tolerance, floored at a small multiple of the
    /// type's epsilon so that `f64` contracts stay usable with `f32`.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::eps() * Self::lit(64.0);
        let req = Self::lit(requested);
        if req > floor {
            req
        } else {
            floor
        }
    }
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// Complex scalar over `T`.
pub type Complex<T> = na::Complex<T>;

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Unit-modulus phase `exp(i theta)`.
#[inline]
pub(crate) fn phase<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `|z|`.
#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// `|z|^2`.
#[inline]
pub fn modulus_sq<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Largest entry modulus of a complex matrix or vector, as `f64`.
pub fn max_abs<'a, T: Real + 'a>(entries: impl IntoIterator<Item = &'a Complex<T>>) -> f64 {
    entries.into_iter().fold(0.0f64, |m, &z| m.max(modulus(z).as_f64()))
}
