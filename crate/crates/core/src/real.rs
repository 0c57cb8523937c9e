//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, NumAssign};

/// Floating-point scalar the library is generic over.
///
/// Implemented for `f32` and `f64`. Default tolerances are derived from
/// [`Real::EPSILON_SCALE`] so the looser type never asks the integrator for
/// more digits than it can hold.
pub trait Real:
    Float + FloatConst + NumAssign + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Smallest relative tolerance worth requesting from iterative routines.
    const EPSILON_SCALE: f64;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self;

    /// Widening conversion used for reporting.
    fn to_f64_lossy(self) -> f64;

    /// `max(requested, floor)` where the floor grows with the machine epsilon.
    fn tol(requested: f64) -> Self {
        Self::lit(requested.max(Self::EPSILON_SCALE))
    }
}

macro_rules! impl_real {
    ($t:ty, $scale:expr) => {
        impl Real for $t {
            const EPSILON_SCALE: f64 = $scale;

            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32, 1.0e3 * f32::EPSILON as f64);
impl_real!(f64, 0.0);

#[inline]
pub(crate) fn sq<T: Real>(x: T) -> T {
    x * x
}

/// `sin(x)/x`, exact at the origin.
pub(crate) fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}

/// `sech` with `sech(±inf) = 0`.
pub(crate) fn sech<T: Real>(x: T) -> T {
    if x.is_infinite() {
        T::zero()
    } else {
        T::one() / x.cosh()
    }
}
