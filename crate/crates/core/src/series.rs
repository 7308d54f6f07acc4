//! Coefficient families behind the closed-form operator action.
//!
//! `c_{2k}` are the Taylor coefficients of `sqrt(1 - x^2)`,
//! `c_{2k} = (2k)! / ((1 - 2k) (k!)^2 4^k)`. They are generated exactly with
//! the ratio `c_{2k} / c_{2k-2} = (2k - 3) / (2k)` and rounded once to the
//! working precision, which keeps them accurate for any `k` (floating
//! factorials overflow near `k = 85`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::polynomial::Parity;
use crate::scalar::Real;

/// Exact `c_0, c_2, ..., c_{2 k_max}`.
pub fn sqrt_series_exact(k_max: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut c = BigRational::one();
    out.push(c.clone());
    for k in 1..=k_max {
        let k = k as i64;
        c *= BigRational::new(BigInt::from(2 * k - 3), BigInt::from(2 * k));
        out.push(c.clone());
    }
    out
}

/// Taylor coefficients of `sqrt(1 - x^2)`; entry `k` holds `c_{2k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Real> SqrtSeries<T> {
    pub fn new(k_max: usize) -> Self {
        SqrtSeries {
            coeffs: sqrt_series_exact(k_max).iter().map(T::from_ratio).collect(),
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `c_{2k}`.
    pub fn get(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coupling coefficient `(d_m + 1 - 2k) c_{2k}` where `d_m` is the exponent
    /// of the `m`-th basis function: `a_{k,m} = (2m + 1 - 2k) c_{2k}` for even
    /// parity, `b_{k,m} = (2m + 2 - 2k) c_{2k}` for odd.
    pub fn coupling(&self, parity: Parity, k: usize, m: usize) -> Result<T> {
        if k > m {
            return Err(Error::Usage(format!("coupling index k = {k} exceeds m = {m}")));
        }
        if k > self.k_max() {
            return Err(Error::Usage(format!(
                "coupling index k = {k} beyond series length {}",
                self.k_max()
            )));
        }
        Ok(T::from_usize(coupling_factor(parity, k, m)) * self.coeffs[k].clone())
    }
}

/// Integer factor `d_m + 1 - 2k` of the coupling coefficient (always positive for `k <= m`).
pub fn coupling_factor(parity: Parity, k: usize, m: usize) -> usize {
    parity.exponent(m) + 1 - 2 * k
}

/// `a_{k,m}` (even) or `b_{k,m}` (odd), evaluated on a fresh series.
pub fn coupling<T: Real>(parity: Parity, k: usize, m: usize) -> Result<T> {
    if k > m {
        return Err(Error::Usage(format!("coupling index k = {k} exceeds m = {m}")));
    }
    SqrtSeries::<T>::new(k).coupling(parity, k, m)
}

/// Lower-index-triangular coupling table for orders `m = 0..=n`.
#[derive(Clone, Debug)]
pub struct CouplingMatrix<T> {
    parity: Parity,
    order: usize,
    // rows[m][k] for k <= m
    rows: Vec<Vec<T>>,
}

impl<T: Real> CouplingMatrix<T> {
    pub fn new(parity: Parity, order: usize) -> Self {
        Self::from_series(parity, order, &SqrtSeries::new(order))
    }

    pub fn from_series(parity: Parity, order: usize, series: &SqrtSeries<T>) -> Self {
        assert!(series.k_max() >= order, "series too short for coupling order");
        let rows = (0..=order)
            .map(|m| {
                (0..=m)
                    .map(|k| T::from_usize(coupling_factor(parity, k, m)) * series.get(k).clone())
                    .collect()
            })
            .collect();
        CouplingMatrix { parity, order, rows }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, k: usize, m: usize) -> Result<&T> {
        if k > m || m > self.order {
            return Err(Error::Usage(format!(
                "coupling ({k}, {m}) outside table of order {}",
                self.order
            )));
        }
        Ok(&self.rows[m][k])
    }

    /// `sum_{k <= m} coupling(k, m)`: the value at `x = 1` of the image of the
    /// `m`-th basis function.
    pub fn boundary_sum(&self, m: usize) -> T {
        self.rows[m].iter().fold(T::zero(), |acc, v| acc + v.clone())
    }
}

/// Result of the truncated series eigenvalue formula.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEstimate<T> {
    pub value: T,
    /// Size of the last partial-sum increment, a crude convergence indicator.
    pub last_increment: T,
}

/// Eigenvalue estimate from the Taylor coefficients of a candidate eigenfunction.
///
/// `coeffs[j]` is `c_{2j}` for even parity and `c_{2j+1}` for odd parity. The
/// even estimate is `(2/pi) [1 - (c_2/1 + c_4/3 + ...) / c_0]`, the odd one
/// `(4/pi) [1 - (c_3/1 + c_5/3 + ...) / c_1]`, summed over the supplied
/// truncation only.
pub fn eigenvalue_from_series<T: Real>(coeffs: &[T], parity: Parity) -> Result<SeriesEstimate<T>> {
    let lead = coeffs
        .first()
        .ok_or_else(|| Error::Degenerate("empty coefficient series".into()))?;
    if lead.is_zero() {
        return Err(Error::Degenerate("leading series coefficient is zero".into()));
    }
    let prefactor = match parity {
        Parity::Even => T::from_f64(2.0),
        Parity::Odd => T::from_f64(4.0),
    } / T::pi();
    let mut sum = T::zero();
    let mut last = T::zero();
    for (j, c) in coeffs.iter().enumerate().skip(1) {
        last = c.clone() / T::from_usize(2 * j - 1);
        sum += last.clone();
    }
    let value = prefactor.clone() * (T::one() - sum / lead.clone());
    let last_increment = (prefactor * last / lead.clone()).abs();
    Ok(SeriesEstimate { value, last_increment })
}
