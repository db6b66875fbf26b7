//! Scalar traits the geometry and rendering code are generic over.
//!
//! Certificates are exact, so their side lengths live in an unsigned machine
//! integer wide enough to hold `(2n)^2`. Scene coordinates are only used for
//! drawing and live in a float type.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{Float, FromPrimitive, PrimInt, ToPrimitive, Unsigned};

/// Unsigned integer used for exact squared side lengths.
pub trait ExactInt:
    PrimInt + Unsigned + FromPrimitive + ToPrimitive + Hash + Display + Debug + Send + Sync + 'static
{
    /// Bit width, used to report which type overflowed.
    const BITS: u32;
}

impl ExactInt for u64 {
    const BITS: u32 = u64::BITS;
}

impl ExactInt for u128 {
    const BITS: u32 = u128::BITS;
}

/// Floating point type used for drawing coordinates.
pub trait Coord: Float + FromPrimitive + Display + Debug + Send + Sync + 'static {}

impl Coord for f32 {}
impl Coord for f64 {}
