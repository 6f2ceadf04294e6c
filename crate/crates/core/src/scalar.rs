//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the dynamics, quadrature and lattice code is written against.
///
/// Blanket-implemented for `f32` and `f64`. Tolerances in the crate are stated
/// for `f64`; `f32` instantiations work but cannot reach them.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Sum
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Reduce an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Real>(x: T) -> T {
    let tau = T::two_pi();
    let r = x - (x / tau).floor() * tau;
    // floor can land exactly on tau after rounding
    if r >= tau {
        r - tau
    } else {
        r
    }
}

/// Reduce an angle to `[-π, π)`.
#[inline]
pub fn wrap_centered<T: Real>(x: T) -> T {
    wrap_angle(x + T::PI()) - T::PI()
}

/// Euclidean distance between two points of the flat torus `(ℝ/2πℤ)^n`.
pub fn torus_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = wrap_centered(x - y);
            d * d
        })
        .sum::<T>()
        .sqrt()
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
