//! Plain and weighted polynomials of definite parity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parity of a weighted polynomial. Even functions use exponents 0, 2, 4, ...
/// and odd functions 1, 3, 5, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Monomial exponent carried by the `index`-th coefficient.
    pub fn exponent(self, index: usize) -> usize {
        match self {
            Parity::Even => 2 * index,
            Parity::Odd => 2 * index + 1,
        }
    }

    /// Parity of a polynomial degree.
    pub fn of_degree(degree: usize) -> Parity {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Truncation half-degree `n` for a polynomial degree (2n or 2n+1).
    pub fn half_degree(self, degree: usize) -> Result<usize> {
        if Parity::of_degree(degree) != self {
            return Err(Error::Usage(format!(
                "degree {degree} is inconsistent with {self} parity"
            )));
        }
        Ok(degree / 2)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::Usage(format!("unknown parity `{other}`"))),
        }
    }
}

/// A polynomial in the monomial basis, `coeffs[j]` multiplying `x^j`.
///
/// Trailing zeros are trimmed on construction, so the zero polynomial has an
/// empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PlainPolynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> PlainPolynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PlainPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        PlainPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^j` (zero past the degree).
    pub fn coeff(&self, j: usize) -> T {
        self.coeffs.get(j).cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Parity of the polynomial if every coefficient of the other parity vanishes.
    /// The zero polynomial reports `None`.
    pub fn parity(&self) -> Option<Parity> {
        if self.is_zero() {
            return None;
        }
        let odd_free = self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero());
        let even_free = self.coeffs.iter().step_by(2).all(|c| c.is_zero());
        match (odd_free, even_free) {
            (true, _) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: &T) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out: Vec<T> = (0..len).map(|j| self.coeff(j)).collect();
        for (o, c) in out.iter_mut().zip(&other.coeffs) {
            o.add_mul(c, s);
        }
        Self::new(out)
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> PlainPolynomial<U> {
        PlainPolynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> PlainPolynomial<f64> {
        self.map(T::to_f64)
    }
}

/// `psi(x) = C * sqrt(1 - x^2) * sum_m alphas[m] * x^(exponent(m))` on `[-1, 1]`,
/// identically zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPolynomial<T> {
    parity: Parity,
    alphas: Vec<T>,
    norm_c: Option<T>,
}

impl<T: Real> WeightedPolynomial<T> {
    pub fn new(parity: Parity, alphas: Vec<T>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Degenerate(
                "weighted polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(WeightedPolynomial {
            parity,
            alphas,
            norm_c: None,
        })
    }

    pub fn with_norm(mut self, c: T) -> Self {
        self.norm_c = Some(c);
        self
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn norm_c(&self) -> Option<&T> {
        self.norm_c.as_ref()
    }

    /// `C`, or one when the function is not normalized.
    pub fn scale_factor(&self) -> T {
        self.norm_c.clone().unwrap_or_else(T::one)
    }

    /// Truncation half-degree `n` (polynomial degree `2n` or `2n+1`).
    pub fn half_degree(&self) -> usize {
        self.alphas.len() - 1
    }

    /// Highest monomial exponent.
    pub fn degree(&self) -> usize {
        self.parity.exponent(self.half_degree())
    }

    /// The polynomial factor `sum_m alphas[m] x^(exponent(m))` in dense form.
    pub fn polynomial_factor(&self) -> PlainPolynomial<T> {
        let mut dense = vec![T::zero(); self.degree() + 1];
        for (m, a) in self.alphas.iter().enumerate() {
            dense[self.parity.exponent(m)] = a.clone();
        }
        PlainPolynomial::new(dense)
    }

    /// Evaluates the polynomial factor only (no weight, no `C`).
    pub fn factor_at(&self, x: &T) -> T {
        let x2 = x.clone() * x.clone();
        let mut acc = T::zero();
        for a in self.alphas.iter().rev() {
            acc = acc * x2.clone() + a.clone();
        }
        match self.parity {
            Parity::Even => acc,
            Parity::Odd => acc * x.clone(),
        }
    }

    /// `psi(x)`; exactly zero for `|x| >= 1`.
    pub fn evaluate(&self, x: &T) -> T {
        if x.abs() >= T::one() {
            return T::zero();
        }
        let weight = (T::one() - x.clone() * x.clone()).sqrt();
        self.scale_factor() * weight * self.factor_at(x)
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> WeightedPolynomial<U> {
        WeightedPolynomial {
            parity: self.parity,
            alphas: self.alphas.iter().map(&f).collect(),
            norm_c: self.norm_c.as_ref().map(&f),
        }
    }

    pub fn to_f64(&self) -> WeightedPolynomial<f64> {
        self.map(T::to_f64)
    }
}
