//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the value is not representable at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{2πi·turns}`. The argument is reduced modulo one first so large phases stay accurate.
pub fn cis_turns<T: Real>(turns: T) -> Complex<T> {
    let reduced = turns - turns.round();
    Complex::from_polar(T::one(), T::two_pi() * reduced)
}

/// `sin(t)/t` with the removable singularity filled in.
pub fn sinc<T: Real>(t: T) -> T {
    if t.abs() < T::lit(1e-4) {
        let t2 = t * t;
        T::one() - t2 / T::lit(6.0) + t2 * t2 / T::lit(120.0)
    } else {
        t.sin() / t
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Sum of complex terms with Kahan compensation on both components.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum<T> {
    sum: Complex<T>,
    carry: Complex<T>,
}

impl<T: Real> CompensatedSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: Complex::new(T::zero(), T::zero()),
            carry: Complex::new(T::zero(), T::zero()),
        }
    }

    pub(crate) fn add(&mut self, value: Complex<T>) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> Complex<T> {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cis_reduces_large_arguments() {
        let z: Complex<f64> = cis_turns(1.0e9 + 0.25);
        assert!((z.re).abs() < 1e-6);
        assert!((z.im - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sinc_is_continuous_at_the_switch() {
        let a: f64 = sinc(0.99999e-4);
        let b: f64 = sinc(1.00001e-4);
        assert!((a - b).abs() < 1e-12);
        assert_eq!(sinc(0.0f64), 1.0);
    }

    #[test]
    fn works_for_f32() {
        let z: Complex<f32> = cis_turns(0.5f32);
        assert!((z.re + 1.0).abs() < 1e-6);
    }
}
