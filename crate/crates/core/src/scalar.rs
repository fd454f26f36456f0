//! Floating-point abstraction shared by the estimators.
//!
//! Cardinality estimates, ratio estimators and interval arithmetic are written
//! once against [`Scalar`] and instantiated for `f32` and `f64`. Everything
//! integral (registers, node ids, exact counts) stays concrete.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal or constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        // Every f64 maps to some f32 (possibly rounded or infinite).
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("u64 is representable in every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
