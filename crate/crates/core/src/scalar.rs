//! Real scalar abstraction. Every matrix in the crate stores `Complex<T>`
//! with `T: Real`, so the same code runs in single or double precision.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar usable as the real part of matrix entries.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Default Frobenius residual threshold (per √order) for this precision.
    fn default_residual_eps() -> Self;
    /// Default absolute singular-value threshold for rank decisions.
    fn default_rank_eps() -> Self;
}

impl Real for f64 {
    fn default_residual_eps() -> Self {
        1e-9
    }
    fn default_rank_eps() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn default_residual_eps() -> Self {
        1e-4
    }
    fn default_rank_eps() -> Self {
        1e-3
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `exp(2πi·num/den)`.
pub fn root_of_unity<T: Real>(num: i64, den: usize) -> Complex<T> {
    let den_i = den as i64;
    let r = num.rem_euclid(den_i);
    let angle = T::TAU() * count::<T>(r as usize) / count::<T>(den);
    Complex::from_polar(T::one(), angle)
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}
