//! MPFR-backed multiprecision scalars with the precision fixed in the type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use rug::float::{Constant, Round};
use rug::ops::NegAssign;
use rug::{Float, Integer, Rational};

use crate::scalar::Real;

/// A binary floating-point number with `BITS` mantissa bits.
#[derive(Clone, PartialEq)]
pub struct Extended<const BITS: u32>(Float);

pub type Mp128 = Extended<128>;
pub type Mp256 = Extended<256>;
pub type Mp512 = Extended<512>;
pub type Mp1024 = Extended<1024>;
pub type Mp2048 = Extended<2048>;
pub type Mp4096 = Extended<4096>;

impl<const BITS: u32> Extended<BITS> {
    pub fn from_float(f: Float) -> Self {
        let mut f = f;
        f.set_prec(BITS);
        Extended(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
}

fn to_rug_integer(i: &num_bigint::BigInt) -> Integer {
    let (sign, digits) = i.to_u32_digits();
    let mut out = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == num_bigint::Sign::Minus {
        out.neg_assign();
    }
    out
}

impl<const BITS: u32> fmt::Debug for Extended<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Extended<{BITS}>({})", self.0)
    }
}

impl<const BITS: u32> fmt::Display for Extended<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl<const BITS: u32> PartialOrd for Extended<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binary_op {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident) => {
        impl<const BITS: u32> $tr for Extended<BITS> {
            type Output = Self;
            fn $method(mut self, rhs: Self) -> Self {
                $atr::$amethod(&mut self.0, rhs.0);
                self
            }
        }

        impl<const BITS: u32> $atr for Extended<BITS> {
            fn $amethod(&mut self, rhs: Self) {
                $atr::$amethod(&mut self.0, rhs.0);
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign);
binary_op!(Sub, sub, SubAssign, sub_assign);
binary_op!(Mul, mul, MulAssign, mul_assign);
binary_op!(Div, div, DivAssign, div_assign);

impl<const BITS: u32> Rem for Extended<BITS> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = Float::with_val(BITS, &self.0 / &rhs.0).trunc();
        let prod = Float::with_val(BITS, &q * &rhs.0);
        Extended(self.0 - prod)
    }
}

impl<const BITS: u32> RemAssign for Extended<BITS> {
    fn rem_assign(&mut self, rhs: Self) {
        *self = self.clone() % rhs;
    }
}

impl<const BITS: u32> Neg for Extended<BITS> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.0.neg_assign();
        self
    }
}

impl<const BITS: u32> Zero for Extended<BITS> {
    fn zero() -> Self {
        Extended(Float::new(BITS))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: u32> One for Extended<BITS> {
    fn one() -> Self {
        Extended(Float::with_val(BITS, 1))
    }
}

impl<const BITS: u32> Num for Extended<BITS> {
    type FromStrRadixErr = rug::float::ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(Extended(Float::with_val(BITS, parsed)))
    }
}

impl<const BITS: u32> Real for Extended<BITS> {
    fn precision_bits() -> u32 {
        BITS
    }

    fn from_f64(x: f64) -> Self {
        Extended(Float::with_val(BITS, x))
    }

    fn from_ratio(r: &BigRational) -> Self {
        let q = Rational::from((to_rug_integer(r.numer()), to_rug_integer(r.denom())));
        Extended(Float::with_val_round(BITS, &q, Round::Nearest).0)
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn sqrt(&self) -> Self {
        Extended(self.0.clone().sqrt())
    }

    fn abs(&self) -> Self {
        Extended(self.0.clone().abs())
    }

    fn pi() -> Self {
        Extended(Float::with_val(BITS, Constant::Pi))
    }

    fn epsilon() -> Self {
        Extended(Float::with_val(BITS, Float::u_exp(1, 1 - BITS as i32)))
    }

    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    fn from_i64(x: i64) -> Self {
        Extended(Float::with_val(BITS, x))
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        // Fused: one rounding for self + a*b.
        self.0 += &a.0 * &b.0;
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        self.0 -= &a.0 * &b.0;
    }
}

/// Mantissa widths for which a scalar type exists. `53` is binary64.
pub const TIERS: [u32; 7] = [53, 128, 256, 512, 1024, 2048, 4096];

/// The smallest available precision tier that carries at least `bits` bits.
pub fn tier_for(bits: u32) -> Option<u32> {
    TIERS.iter().copied().find(|t| *t >= bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn sqrt_two_to_many_digits() {
        let two = Mp256::from_i64(2);
        let s = two.sqrt().to_decimal(60);
        assert!(s.starts_with("1.41421356237309504880168872420969807856967187537694807317"));
    }

    #[test]
    fn ratio_is_rounded_once() {
        let third = BigRational::new(BigInt::from(-1), BigInt::from(3));
        let x = Mp128::from_ratio(&third);
        let back = x.clone() * Mp128::from_i64(-3);
        assert!((back - Mp128::one()).abs() <= Mp128::epsilon());
        assert_eq!(x.to_f64(), -1.0 / 3.0);
    }

    #[test]
    fn arithmetic_and_ordering() {
        let a = Mp128::from_f64(1.5);
        let b = Mp128::from_f64(-0.25);
        assert_eq!((a.clone() + b.clone()).to_f64(), 1.25);
        assert_eq!((a.clone() * b.clone()).to_f64(), -0.375);
        assert_eq!((a.clone() / b.clone()).to_f64(), -6.0);
        let r = (a.clone() % Mp128::from_f64(0.25)).to_f64();
        assert_eq!(r, 0.0);
        assert_eq!((Mp128::from_f64(-1.75) % Mp128::from_f64(0.5)).to_f64(), -0.25);
        assert!(b < a);
        let mut acc = Mp128::one();
        acc.add_mul(&a, &b);
        assert_eq!(acc.to_f64(), 0.625);
        acc.sub_mul(&a, &b);
        assert_eq!(acc.to_f64(), 1.0);
    }

    #[test]
    fn precision_and_epsilon() {
        assert_eq!(Mp512::precision_bits(), 512);
        let e = Mp128::epsilon();
        assert!(Mp128::one() + e.clone() > Mp128::one());
        assert_eq!(Mp128::pi().to_f64(), std::f64::consts::PI);
    }

    #[test]
    fn tiers_round_up() {
        assert_eq!(tier_for(1), Some(53));
        assert_eq!(tier_for(54), Some(128));
        assert_eq!(tier_for(400), Some(512));
        assert_eq!(tier_for(4097), None);
    }
}
