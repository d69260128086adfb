//! Scalar abstraction: the real type underlying all level arithmetic.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::radial::Level;

/// Real scalar the library is generic over (`f32` or `f64` in practice).
///
/// Everything downstream works with `Complex<T>` values indexed by integer
/// levels, so the only requirements are IEEE-style float arithmetic plus
/// conversions from the integer parameters (`q`, levels, moment orders).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossless-for-small-integers conversion of a level index.
    fn from_level(n: Level) -> Self {
        Self::from_i32(n).expect("level converts to scalar")
    }

    /// Conversion of an `f64` constant (tolerances, thresholds).
    fn cst(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant converts to scalar")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Complex value over the generic scalar.
pub type C<T> = Complex<T>;

/// True when both parts of a complex value are finite.
pub fn is_finite_c<T: Scalar>(z: &C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
