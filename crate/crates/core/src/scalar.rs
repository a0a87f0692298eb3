//! Scalar abstraction: all core math is generic over the floating type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating scalar usable by every numeric routine in this crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Lift an `f64` literal into the working scalar type.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal not representable in scalar type")
}

/// Lift a `usize` into the working scalar type.
#[inline]
pub fn num<T: Real>(v: usize) -> T {
    T::from_usize(v).expect("count not representable in scalar type")
}

/// Lift an `i64` into the working scalar type.
#[inline]
pub fn inum<T: Real>(v: i64) -> T {
    T::from_i64(v).expect("index not representable in scalar type")
}
