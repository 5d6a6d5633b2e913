//! Scalar abstraction for the deterministic ORDANOVA formulas.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Field-like number type the variation and approximation formulas run on.
///
/// Every formula in the deterministic part of the crate needs only the four
/// field operations and ordering, so `f32`, `f64` and
/// [`Rational64`](num_rational::Rational64) all qualify.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync {
    /// Lossless (for rationals) or nearest (for floats) image of a count.
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `4 / (K - 1)`, the normalization that bounds ordinal variation by one.
    fn ordinal_norm(categories: usize) -> Self {
        Self::from_count(4) / Self::from_count(categories as u64 - 1)
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync {}

pub(crate) fn sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}

pub(crate) fn abs_diff<T: Scalar>(a: T, b: T) -> T {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// Route-agreement check used by internal cross-checks: relative `1e-12`
/// for double precision and exact types, `1e-5` for single precision.
pub(crate) fn nearly_equal<T: Scalar>(a: T, b: T) -> bool {
    let tol = if T::from_f64(1.0 + 1e-12).map_or(1.0, T::as_f64) == 1.0 { 1e-5 } else { 1e-12 };
    abs_diff(a, b).as_f64() <= tol * a.as_f64().abs().max(1.0)
}
