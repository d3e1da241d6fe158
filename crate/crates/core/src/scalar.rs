//! Scalar abstraction shared by every numerical module.
//!
//! All the math in this crate is written once against [`Real`] and
//! instantiated for `f32` and `f64`. Tolerances are per-type constants: the
//! `f64` values are the ones the library is specified and tested against,
//! the `f32` values are loosened to what single precision can deliver.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Relative tolerance for Hermiticity checks, ‖a − a†‖ ≤ tol·‖a‖.
    const HERMITIAN_TOL: Self;
    /// Allowed |tr − 1| for a state to count as unit trace.
    const UNIT_TRACE_TOL: Self;
    /// |tr| below which normalization is refused.
    const TRACE_FLOOR: Self;
    /// Two event times closer than this are the same grid point.
    const TIME_MERGE_TOL: Self;

    /// Converts an `f64` literal. Panics only if the literal is not
    /// representable at all, which never happens for the constants used here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: Self = 1e-12;
    const UNIT_TRACE_TOL: Self = 1e-10;
    const TRACE_FLOOR: Self = 1e-14;
    const TIME_MERGE_TOL: Self = 1e-12;
}

impl Real for f32 {
    const HERMITIAN_TOL: Self = 1e-5;
    const UNIT_TRACE_TOL: Self = 1e-5;
    const TRACE_FLOOR: Self = 1e-6;
    const TIME_MERGE_TOL: Self = 1e-6;
}

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
