//! Scalar abstraction shared by the series, operator and solver code.
//!
//! Everything numerical in the crate is written against [`Real`], so the same
//! code runs in `f32`, `f64` and (with the `extended` feature) in MPFR-backed
//! multiprecision floats. The trait deliberately does not require `Copy`:
//! multiprecision values own heap storage.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, ToPrimitive};

/// A real field element with the handful of transcendental operations the
/// crate needs.
pub trait Real:
    Clone + Debug + Display + PartialOrd + Send + Sync + 'static + Num + NumAssign + Neg<Output = Self>
{
    /// Mantissa bits carried by this type.
    fn precision_bits() -> u32;

    fn from_f64(x: f64) -> Self;

    /// Rounds an exact rational to the working precision.
    fn from_ratio(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn sqrt(&self) -> Self;

    fn abs(&self) -> Self;

    fn pi() -> Self;

    /// Unit roundoff.
    fn epsilon() -> Self;

    fn is_finite(&self) -> bool;

    fn from_i64(x: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(x)))
    }

    fn from_usize(x: usize) -> Self {
        Self::from_i64(x as i64)
    }

    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a.clone() * b.clone();
    }

    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a.clone() * b.clone();
    }

    fn max_abs(a: &Self, b: &Self) -> Self {
        let (a, b) = (a.abs(), b.abs());
        if a > b {
            a
        } else {
            b
        }
    }
}

macro_rules! impl_real_native {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            fn precision_bits() -> u32 {
                $bits
            }

            fn from_f64(x: f64) -> Self {
                x as $t
            }

            fn from_ratio(r: &BigRational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }

            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }

            fn pi() -> Self {
                std::f64::consts::PI as $t
            }

            fn epsilon() -> Self {
                <$t>::EPSILON
            }

            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }

            fn from_i64(x: i64) -> Self {
                x as $t
            }

            fn add_mul(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }

            fn sub_mul(&mut self, a: &Self, b: &Self) {
                *self -= a * b;
            }
        }
    };
}

impl_real_native!(f32, 24);
impl_real_native!(f64, 53);
