//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

use crate::expr::Number;

/// Floating-point scalar the geometry is evaluated in.
///
/// Implemented for `f32` and `f64`. Expressions, sections and integrators are
/// generic over it; tolerances are always stated in `f64`.
pub trait Real:
    Float + FromPrimitive + Number<Scalar = Self> + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(c: f64) -> Self {
        Self::from_f64(c).expect("f64 literal representable in the scalar type")
    }

    /// Widens to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Largest absolute value of an iterator of scalars; 0 for an empty iterator.
pub(crate) fn max_abs<T: Real>(values: impl IntoIterator<Item = T>) -> f64 {
    values
        .into_iter()
        .map(|v| v.as_f64().abs())
        .fold(0.0, |acc, v| if v.is_nan() || v > acc { v } else { acc })
}
