//! Scalar abstraction shared by every field and kernel.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

pub use num_complex::Complex;

/// Real floating-point type a propagation can run in: `f32` or `f64`.
///
/// Coefficient tables, file formats and configuration values are kept at
/// double precision; `of` and `as_f64` convert at the boundary.
pub trait Real: FftNum + Float + FloatConst + Default + Display + Debug + Send + Sync {
    /// Machine epsilon as `f64`, used to scale round-off tolerances.
    const EPS: f64;

    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Real for f32 {
    const EPS: f64 = f32::EPSILON as f64;

    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON;

    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// `e^{iθ} - 1`, accurate to relative precision for small `θ`.
#[inline]
pub fn cis_m1<T: Real>(theta: T) -> Complex<T> {
    let h = (theta * T::of(0.5)).sin();
    Complex::new(-T::of(2.0) * h * h, theta.sin())
}

/// `z·e^{iθ}` evaluated as `z + z·(e^{iθ} - 1)`. A phase that repeats every
/// step then changes `|z|` by `O(ε|θ|)` rather than `O(ε)`, so round-off does
/// not build a systematic norm drift.
#[inline]
pub fn rotate<T: Real>(z: Complex<T>, w: Complex<T>) -> Complex<T> {
    z + z * w
}

/// `-i·z`.
#[inline]
pub fn mul_neg_i<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.im, -z.re)
}
