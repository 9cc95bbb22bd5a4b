//! Scalar abstraction for the generic numeric kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point types the model kernels are generic over (`f32`, `f64`).
///
/// Automatically implemented for any float with primitive conversions and
/// formatting; the `Send + Sync + 'static` bounds let parameter sets cross
/// thread boundaries in parallel scans.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` constant into the scalar type.
    ///
    /// Panics only if the type cannot represent ordinary finite constants,
    /// which no float type in practice fails to do.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite constant must convert")
    }
}

impl<T> Scalar for T where
    T: Float + NumAssign + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn midpoint<S: Scalar>(a: S, b: S) -> S {
        (a + b) / S::of(2.0)
    }

    #[test]
    fn blanket_impl_covers_both_widths() {
        assert_eq!(midpoint(1.0_f64, 3.0_f64), 2.0);
        assert_eq!(midpoint(1.0_f32, 3.0_f32), 2.0);
    }

    #[test]
    fn of_converts_constants() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.5), 0.5_f32);
    }
}
