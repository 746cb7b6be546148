//! Scalar abstraction for the numeric core.
//!
//! Everything that does arithmetic is generic over [`Scalar`] so the same code
//! runs on `f32` or `f64` (tests and the CLI use `f64`). The trait is a thin
//! bundle over `num-traits`; the two helpers cross the boundary to concrete
//! `f64` at the I/O and solver edges.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert from `f64`. Panics on values the type cannot represent at all
    /// (never the case for finite inputs on `f32`/`f64`).
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 must convert to scalar")
    }

    /// Widen to `f64` for solver backends and formatting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips_through_f64() {
        assert_eq!(<f64 as Scalar>::of(1.5), 1.5);
        assert_eq!(<f32 as Scalar>::of(0.25), 0.25f32);
        assert_eq!(0.25f32.as_f64(), 0.25);
    }
}
