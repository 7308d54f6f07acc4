//! Randomized cross-check of the closed-form operator against quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::apply_closed;
use crate::polynomial::{Parity, WeightedPolynomial};
use crate::quadrature::{apply_numeric, chebyshev_points, PvSettings};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSample {
    pub parity: Parity,
    pub degree: usize,
    /// Largest `|closed − quadrature|` over the points.
    pub max_deviation: f64,
    pub worst_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: Vec<OracleSample>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Builds `count` random weighted polynomials (coefficients uniform in
/// `[-1, 1]`, degree at most `max_degree`, parities alternating) from `seed`
/// and compares closed-form and quadrature images at `points` interior
/// Chebyshev points.
pub fn oracle_check(
    max_degree: usize,
    points: usize,
    count: usize,
    seed: u64,
    tolerance: f64,
    settings: &PvSettings,
) -> Result<OracleReport> {
    if points == 0 || count == 0 {
        return Err(Error::Usage(
            "oracle check needs at least one point and one polynomial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<WeightedPolynomial<f64>> = (0..count)
        .map(|i| {
            let parity = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
            let top = if max_degree == 0 {
                0
            } else {
                (max_degree - parity.exponent(0)) / 2
            };
            let n = rng.gen_range(0..=top);
            let alphas = (0..=n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            WeightedPolynomial::new(parity, alphas).expect("non-empty by construction")
        })
        .collect();
    if max_degree == 0 && cases.iter().any(|c| c.parity() == Parity::Odd) {
        return Err(Error::Usage(
            "odd polynomials need a maximum degree of at least 1".into(),
        ));
    }
    let xs = chebyshev_points(points);
    let samples = cases
        .par_iter()
        .map(|psi| {
            let image = apply_closed(psi)?;
            let mut worst = (0.0_f64, 0.0_f64);
            for &x in &xs {
                let numeric = apply_numeric(|t| psi.evaluate(&t), x, settings)?;
                let d = (numeric - image.eval(&x)).abs();
                if d >= worst.0 {
                    worst = (d, x);
                }
            }
            Ok(OracleSample {
                parity: psi.parity(),
                degree: psi.degree(),
                max_deviation: worst.0,
                worst_x: worst.1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = samples.iter().map(|s| s.max_deviation).fold(0.0, f64::max);
    Ok(OracleReport {
        samples,
        max_deviation,
        tolerance,
        pass: max_deviation <= tolerance,
    })
}
