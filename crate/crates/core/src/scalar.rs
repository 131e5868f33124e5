//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written once against [`Real`] and instantiated for `f64`
//! (the accuracy-bearing type) and `f32`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// IEEE floating-point scalar supported by the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Argument below which `ln F(z)` switches from `erfc` to the asymptotic
    /// Gaussian tail series. Chosen so that `erfc` is still normal-range there.
    const LOG_CDF_TAIL: f64;

    /// Complementary error function.
    fn erfc(self) -> Self;
}

impl Real for f64 {
    const LOG_CDF_TAIL: f64 = -37.0;

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    const LOG_CDF_TAIL: f64 = -12.0;

    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

/// Converts an `f64` constant into `T`.
#[inline]
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("constant representable in target float type")
}

/// Converts an alphabet size or count into `T`.
#[inline]
pub(crate) fn count<T: Real>(n: u64) -> T {
    T::from_u64(n).expect("count representable in target float type")
}

/// Lossy view of a scalar as `f64`, used for error payloads and caches.
#[inline]
pub(crate) fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
