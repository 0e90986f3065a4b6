//! Scalar abstraction shared by every numerical module.
//!
//! All of the math is written against [`Real`], which is implemented for
//! `f32` and `f64`. The CLI and the basin sweeps instantiate it at `f64`.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used by the library.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Magnitude above which an intermediate value is treated as an overflow.
    const OVERFLOW_LIMIT: Self;
    /// Magnitude below which a divisor or determinant counts as zero.
    const SINGULAR_FLOOR: Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite literals used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const OVERFLOW_LIMIT: f64 = 1e150;
    const SINGULAR_FLOOR: f64 = 1e-300;
}

impl Real for f32 {
    const OVERFLOW_LIMIT: f32 = 1e18;
    const SINGULAR_FLOOR: f32 = 1e-37;
}
