//! Scalar abstraction: the whole crate is generic over the float type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use ndarray::ScalarOperand;
use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable everywhere in the model: f32 or f64.
pub trait Scalar:
    Float
    + FromPrimitive
    + ScalarOperand
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossy conversion from f64 (the type all literals and RNG draws use).
#[inline]
pub fn cast<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("f64 converts to any Scalar")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cast_round_trips_for_f64() {
        let x: f64 = cast(0.1);
        assert_eq!(x, 0.1);
    }

    #[test]
    fn cast_narrows_to_f32() {
        let x: f32 = cast(1.5);
        assert_eq!(x, 1.5f32);
    }
}
