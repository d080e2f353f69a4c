//! Scalar abstraction shared by every numeric type in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type usable for costs, latencies and loads.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Relative tolerance used when comparing path lengths and LUT indices.
    fn tolerance() -> Self;

    /// Converts an `f64` literal. Panics only if the type cannot represent finite values.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn from_units(v: u64) -> Self {
        Self::from_u64(v).expect("unit count")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn tolerance() -> Self {
        1e-4
    }
}

/// `a == b` up to the scalar's relative tolerance.
pub fn approx_eq<T: Scalar>(a: T, b: T) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= T::tolerance() * scale
}

/// `a < b` by more than the tolerance.
pub fn definitely_less<T: Scalar>(a: T, b: T) -> bool {
    a < b && !approx_eq(a, b)
}

/// Index of the LUT cell covering `load`, i.e. `ceil(load / mu)`.
///
/// Loads within tolerance of an exact multiple snap to that multiple so that
/// `3 * 10 / 10` never rounds up to 4.
pub fn lut_index<T: Scalar>(load: T, mu: T) -> usize {
    if load <= T::zero() {
        return 0;
    }
    let q = load / mu;
    let r = q.round();
    let idx = if approx_eq(q, r) { r } else { q.ceil() };
    idx.to_usize().unwrap_or(usize::MAX)
}

/// `floor(total / unit)` with the same snapping rule as [`lut_index`].
pub fn whole_units<T: Scalar>(total: T, unit: T) -> u64 {
    if total <= T::zero() {
        return 0;
    }
    let q = total / unit;
    let r = q.round();
    let n = if approx_eq(q, r) { r } else { q.floor() };
    n.to_u64().unwrap_or(u64::MAX)
}

/// True when `value` is an integral multiple of `unit`.
pub fn divides<T: Scalar>(unit: T, value: T) -> bool {
    let q = value / unit;
    approx_eq(q, q.round())
}
