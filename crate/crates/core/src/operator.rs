//! Closed-form action of the Cauchy operator on weighted polynomials.
//!
//! For a basis function `x^d sqrt(1 - x^2)` the regional integral produces a
//! singular term `-(2/pi) x^d sqrt(1 - x^2) / (1 - x^2)` that the exterior
//! killing term `(2/pi) psi / (1 - x^2)` cancels exactly. What is left is the
//! plain polynomial `sum_k coupling(k, m) x^(d - 2k)`, so the operator maps
//! weighted polynomials of degree `d` onto plain polynomials of degree `d`.

use crate::error::Result;
use crate::polynomial::{Parity, PlainPolynomial, WeightedPolynomial};
use crate::scalar::Real;
use crate::series::{CouplingMatrix, SqrtSeries};

/// Image of a single basis function `x^(exponent(m)) sqrt(1 - x^2)`.
pub fn basis_image<T: Real>(parity: Parity, m: usize, series: &SqrtSeries<T>) -> Result<PlainPolynomial<T>> {
    let d = parity.exponent(m);
    let mut coeffs = vec![T::zero(); d + 1];
    for k in 0..=m {
        coeffs[d - 2 * k] = series.coupling(parity, k, m)?;
    }
    Ok(PlainPolynomial::new(coeffs))
}

/// `A_D psi / C`: the operator image of the unnormalized weighted polynomial.
pub fn apply_closed<T: Real>(psi: &WeightedPolynomial<T>) -> Result<PlainPolynomial<T>> {
    let parity = psi.parity();
    let n = psi.half_degree();
    let table = CouplingMatrix::<T>::new(parity, n);
    let mut coeffs = vec![T::zero(); psi.degree() + 1];
    for (m, alpha) in psi.alphas().iter().enumerate() {
        let d = parity.exponent(m);
        for k in 0..=m {
            coeffs[d - 2 * k].add_mul(alpha, table.get(k, m)?);
        }
    }
    Ok(PlainPolynomial::new(coeffs))
}

/// `A_D psi` including the normalization constant.
pub fn apply_closed_normalized<T: Real>(psi: &WeightedPolynomial<T>) -> Result<PlainPolynomial<T>> {
    Ok(apply_closed(psi)?.scale(&psi.scale_factor()))
}

/// The `w`-polynomial of index `n`: `w_{2n}` for even parity, `w_{2n+1}` for odd.
///
/// These follow the sign convention of the gamma expansions they multiply.
/// The even expansion is written `1 - gamma_2 x^2 - gamma_4 x^4 - ...`, so for
/// `n >= 1` the even `w_{2n}` is the negated basis image; `w_0 = 1` and the odd
/// polynomials are the basis images themselves.
pub fn w_polynomial<T: Real>(parity: Parity, n: usize) -> PlainPolynomial<T> {
    let series = SqrtSeries::<T>::new(n);
    let image = basis_image(parity, n, &series).expect("indices are in range by construction");
    match (parity, n) {
        (Parity::Even, 0) | (Parity::Odd, _) => image,
        (Parity::Even, _) => image.scale(&-T::one()),
    }
}

/// `p(1)`. For a definite-parity image `|p(-1)| = |p(1)|`; this is both the
/// boundary constraint row and the analytic limit of `A_D psi` at `x -> +-1`.
pub fn boundary_value<T: Real>(p: &PlainPolynomial<T>) -> T {
    p.coeffs().iter().fold(T::zero(), |acc, c| acc + c.clone())
}

/// The first `terms` Taylor coefficients of `psi` about zero, including `C`.
/// Entry `j` multiplies `x^(exponent(j))`.
pub fn taylor_coefficients<T: Real>(psi: &WeightedPolynomial<T>, terms: usize) -> Vec<T> {
    let series = SqrtSeries::<T>::new(terms.saturating_sub(1));
    let c = psi.scale_factor();
    (0..terms)
        .map(|j| {
            let mut acc = T::zero();
            for (m, a) in psi.alphas().iter().enumerate().take(j + 1) {
                acc.add_mul(a, series.get(j - m));
            }
            acc * c.clone()
        })
        .collect()
}

/// `C sqrt(1 - x^2) sum alpha_m x^m`, zero outside `[-1, 1]`.
pub fn evaluate<T: Real>(psi: &WeightedPolynomial<T>, x: &T) -> T {
    psi.evaluate(x)
}
