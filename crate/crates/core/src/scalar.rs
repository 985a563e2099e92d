use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical core is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every value used by the crate is
    /// representable (possibly rounded) in both supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Largest absolute component, `‖z‖∞`.
pub fn inf_norm<T: Scalar>(z: &[T]) -> T {
    z.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub(crate) fn all_finite<T: Scalar>(z: &[T]) -> bool {
    z.iter().all(|x| x.is_finite())
}
