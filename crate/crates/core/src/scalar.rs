//! Scalar abstraction: the solver is generic over the floating-point type.

use core::fmt::{Debug, Display, LowerExp};
use core::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable throughout the library (`f32` or `f64` in
/// practice; anything `Float + FromPrimitive` works).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; panics only if the target type cannot
    /// represent any finite approximation (never for f32/f64).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal must convert to Scalar")
    }

    /// Lossy view as `f64`, used for error payloads and formatting.
    fn to64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}
