//! Scalar abstraction shared by every engine.
//!
//! All floating-point code in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The exact rational oracle in
//! [`crate::exact`] works over any [`num_traits::Num`] field instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count.
    fn from_count(x: usize) -> Self {
        Self::from_usize(x).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type Amplitude<T> = Complex<T>;

/// Second-order Neumaier (Klein) compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum<T> {
    sum: T,
    compensation: T,
    second: T,
}

/// Sum and rounding error of `a + b`.
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let t = a + b;
    let e = if a.abs() >= b.abs() { (a - t) + b } else { (b - t) + a };
    (t, e)
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
            second: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        let (c, ee) = two_sum(self.compensation, e);
        self.compensation = c;
        self.second += ee;
    }

    pub fn value(&self) -> T {
        self.sum + (self.compensation + self.second)
    }
}

impl<T: Real> FromIterator<T> for KahanSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of reals.
pub fn kahan_sum<T: Real, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<KahanSum<T>>().value()
}
