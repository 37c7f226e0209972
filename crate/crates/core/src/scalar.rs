//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::Serialize;

/// Real scalar usable by the discretization, quadrature and solvers.
///
/// Implemented for `f32` and `f64`. The only per-type knob is the largest
/// exponential argument considered safe; evaluations beyond it raise an
/// overflow error instead of producing an infinity.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Largest argument passed to `exp` before an overflow error is raised.
    const EXP_ARG_CAP: f64;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn exp_cap() -> Self {
        Self::lit(Self::EXP_ARG_CAP)
    }
}

impl Real for f64 {
    const EXP_ARG_CAP: f64 = 700.0;
}

impl Real for f32 {
    const EXP_ARG_CAP: f64 = 85.0;
}

/// Dot product over two equally long slices.
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
