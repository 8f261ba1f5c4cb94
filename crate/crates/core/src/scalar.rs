//! Scalar abstraction for the numeric kernels.
//!
//! Everything numeric in this crate is written against [`Real`], a small
//! extension of [`num_traits::Float`]. In practice the two implementors are
//! `f32` and `f64`; the blanket impl keeps the door open for other float
//! types that satisfy the bounds.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; panics only on values a float type
    /// cannot represent at all (never for finite inputs).
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any Real")
    }

    /// Conversion from a count.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to any Real")
    }

    /// Conversion to `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_halves<F: Real>(n: usize) -> F {
        (0..n).map(|_| F::of(0.5)).sum()
    }

    #[test]
    fn both_precisions_satisfy_the_trait() {
        assert_eq!(sum_of_halves::<f64>(4), 2.0);
        assert_eq!(sum_of_halves::<f32>(4), 2.0);
        assert_eq!(f64::of_usize(150), 150.0);
        assert_eq!(3.25f32.as_f64(), 3.25);
    }
}
