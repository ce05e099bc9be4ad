//! Floating point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type the algorithms are written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// docs assume `f64`; `f32` runs are supported but converge to looser limits.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for configuration constants.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// Conversion from a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
