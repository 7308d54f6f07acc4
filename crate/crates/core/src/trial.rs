//! Analytic trial states built on `√cos`, their series expansions and the
//! closed-form operator image obtained term by term.
//!
//! The ground-state trial is `ψ(x) = C √((1 − x²) cos θx)` and the first
//! excited one `ψ(x) = −C sin θx √((1 − x²) cos θx)`, with
//! `θ = θ_num · π / 4096`. Writing the non-weight factor as a power series
//! turns each trial into an (infinite) weighted polynomial, so truncating
//! that series gives a closed-form image under the operator.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::residual::{residual_report, ResidualReport};
use crate::error::{Error, Result};
use crate::operator::{taylor_coefficients, w_polynomial};
use crate::polynomial::{Parity, PlainPolynomial, WeightedPolynomial};
use crate::quadrature::adaptive;

/// Default truncation of the `γ` expansion.
pub const DEFAULT_GAMMA_TERMS: usize = 15;

/// Denominator of the angular parameter: `θ = θ_num · π / THETA_DENOMINATOR`.
pub const THETA_DENOMINATOR: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialKind {
    /// `C √((1 − x²) cos θx)`, even.
    #[serde(rename = "ground")]
    GroundCos,
    /// `−C sin θx √((1 − x²) cos θx)`, odd.
    #[serde(rename = "excited")]
    ExcitedSinCos,
}

impl TrialKind {
    pub fn parity(self) -> Parity {
        match self {
            TrialKind::GroundCos => Parity::Even,
            TrialKind::ExcitedSinCos => Parity::Odd,
        }
    }

    /// The overall sign stored in front of `C`.
    fn sign(self) -> f64 {
        match self {
            TrialKind::GroundCos => 1.0,
            TrialKind::ExcitedSinCos => -1.0,
        }
    }
}

impl fmt::Display for TrialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialKind::GroundCos => "ground",
            TrialKind::ExcitedSinCos => "excited",
        })
    }
}

impl FromStr for TrialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(TrialKind::GroundCos),
            "excited" => Ok(TrialKind::ExcitedSinCos),
            other => Err(Error::Usage(format!("unknown trial kind `{other}` (ground|excited)"))),
        }
    }
}

/// Taylor coefficients of `√cos θx` (even, in powers `x^{2k}`) or of
/// `sin θx √cos θx` (odd, in powers `x^{2k+1}`), without any sign folding.
pub fn factor_series(kind: TrialKind, theta: f64, terms: usize) -> Vec<f64> {
    if terms == 0 {
        return Vec::new();
    }
    let t2 = theta * theta;
    // cos θx = Σ a_k x^{2k}
    let mut a = vec![1.0; terms];
    for k in 1..terms {
        a[k] = -a[k - 1] * t2 / ((2 * k - 1) * 2 * k) as f64;
    }
    // s² = a with s_0 = 1
    let mut s = vec![0.0; terms];
    s[0] = 1.0;
    for k in 1..terms {
        let cross: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
        s[k] = 0.5 * (a[k] - cross);
    }
    match kind {
        TrialKind::GroundCos => s,
        TrialKind::ExcitedSinCos => {
            // sin θx / x = Σ b_k x^{2k}
            let mut b = vec![theta; terms];
            for k in 1..terms {
                b[k] = -b[k - 1] * t2 / ((2 * k) * (2 * k + 1)) as f64;
            }
            (0..terms).map(|k| (0..=k).map(|j| b[j] * s[k - j]).sum()).collect()
        }
    }
}

/// Coefficients `γ` under the sign convention of the expansions: the even
/// factor reads `1 − γ₂x² − γ₄x⁴ − …`, the odd one `γ₁x + γ₃x³ + …`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSeries {
    pub parity: Parity,
    /// Entry `k` is `γ_{2k}` (even) or `γ_{2k+1}` (odd).
    pub coeffs: Vec<f64>,
}

impl GammaSeries {
    pub fn new(kind: TrialKind, theta: f64, terms: usize) -> Self {
        let raw = factor_series(kind, theta, terms);
        let coeffs = match kind {
            TrialKind::GroundCos => raw
                .iter()
                .enumerate()
                .map(|(k, v)| if k == 0 { *v } else { -v })
                .collect(),
            TrialKind::ExcitedSinCos => raw,
        };
        GammaSeries {
            parity: kind.parity(),
            coeffs,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialFunction {
    pub kind: TrialKind,
    pub theta_num: u32,
    pub gamma_terms: usize,
    pub norm_c: f64,
}

/// Builds a trial state and computes its `L²` normalization by quadrature
/// after the substitution `x = sin u`.
///
/// `θ_num` must stay below 2048 so that `cos θx > 0` on the open interval.
/// `θ_num = 0` is accepted for the ground kind, where the trial reduces to
/// `C √(1 − x²)`; the excited kind vanishes there and is rejected.
pub fn make_trial(kind: TrialKind, theta_num: u32, gamma_terms: usize) -> Result<TrialFunction> {
    if theta_num >= THETA_DENOMINATOR / 2 {
        return Err(Error::Domain(format!(
            "theta numerator must be below {} so that cos(theta x) stays positive, got {theta_num}",
            THETA_DENOMINATOR / 2
        )));
    }
    if gamma_terms == 0 {
        return Err(Error::Usage("gamma_terms must be at least 1".into()));
    }
    if theta_num == 0 && kind == TrialKind::ExcitedSinCos {
        return Err(Error::Degenerate(
            "the excited trial vanishes identically at theta = 0".into(),
        ));
    }
    let theta = theta_of(theta_num);
    let shape = move |x: f64| unnormalized(kind, theta, x);
    let integrand = |u: f64| {
        let x = u.sin();
        shape(x).powi(2) * u.cos()
    };
    let norm2 = adaptive(&integrand, -PI / 2.0, PI / 2.0, 1e-13, 40).map_err(|u| Error::Quadrature {
        x: 0.0,
        previous: u.coarse,
        last: u.fine,
    })?;
    Ok(TrialFunction {
        kind,
        theta_num,
        gamma_terms,
        norm_c: 1.0 / norm2.sqrt(),
    })
}

fn theta_of(theta_num: u32) -> f64 {
    theta_num as f64 * PI / THETA_DENOMINATOR as f64
}

fn unnormalized(kind: TrialKind, theta: f64, x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let base = ((1.0 - x * x) * (theta * x).cos()).sqrt();
    match kind {
        TrialKind::GroundCos => base,
        TrialKind::ExcitedSinCos => -(theta * x).sin() * base,
    }
}

impl TrialFunction {
    pub fn theta(&self) -> f64 {
        theta_of(self.theta_num)
    }

    pub fn parity(&self) -> Parity {
        self.kind.parity()
    }

    /// The exact trial function; zero outside `(-1, 1)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.norm_c * unnormalized(self.kind, self.theta(), x)
    }

    pub fn gamma(&self) -> GammaSeries {
        GammaSeries::new(self.kind, self.theta(), self.gamma_terms)
    }

    /// The trial with its factor series truncated at `gamma_terms`, as a
    /// normalized weighted polynomial (sign included).
    pub fn truncated(&self) -> WeightedPolynomial<f64> {
        let s = self.kind.sign();
        let alphas = factor_series(self.kind, self.theta(), self.gamma_terms)
            .into_iter()
            .map(|v| s * v)
            .collect();
        WeightedPolynomial::new(self.parity(), alphas)
            .expect("gamma_terms >= 1")
            .with_norm(self.norm_c)
    }
}

/// Taylor coefficients of `ψ` about zero (including `C` and the sign), in
/// powers `x^{2k}` or `x^{2k+1}`. Exact through `terms` entries regardless of
/// `gamma_terms`.
pub fn expand_trial(trial: &TrialFunction, terms: usize) -> Vec<f64> {
    let s = trial.kind.sign();
    let alphas: Vec<f64> = factor_series(trial.kind, trial.theta(), terms.max(1))
        .into_iter()
        .map(|v| s * v)
        .collect();
    let psi = WeightedPolynomial::new(trial.parity(), alphas)
        .expect("at least one coefficient")
        .with_norm(trial.norm_c);
    taylor_coefficients(&psi, terms)
}

/// `A_D ψ ≈ C · sign · Σ_{n < gamma_terms} γₙ wₙ`.
pub fn apply_ad_trial(trial: &TrialFunction) -> PlainPolynomial<f64> {
    let gamma = trial.gamma();
    let scale = trial.norm_c * trial.kind.sign();
    let mut sum = PlainPolynomial::zero();
    for (n, g) in gamma.coeffs.iter().enumerate() {
        sum = sum.add_scaled(&w_polynomial(gamma.parity, n), g);
    }
    sum.scale(&scale)
}

/// Residual of the exact trial against the truncated closed-form image.
pub fn trial_residual(trial: &TrialFunction, e: f64, grid_points: usize) -> Result<ResidualReport> {
    let image = apply_ad_trial(trial);
    residual_report(|x| trial.evaluate(x), |x| image.eval(&x), e, grid_points)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub theta_num: u32,
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub argmin: SweepPoint,
}

/// Residual supremum for every `θ_num` in `range`, computed in parallel and
/// reported in range order. Ties go to the smallest `θ_num`.
pub fn sweep(
    kind: TrialKind,
    range: RangeInclusive<u32>,
    e: f64,
    gamma_terms: usize,
    grid_points: usize,
) -> Result<SweepResult> {
    if range.is_empty() {
        return Err(Error::Usage(format!(
            "empty theta range {}..={}",
            range.start(),
            range.end()
        )));
    }
    let thetas: Vec<u32> = range.collect();
    let points = thetas
        .par_iter()
        .map(|&t| {
            let trial = make_trial(kind, t, gamma_terms)?;
            Ok(SweepPoint {
                theta_num: t,
                sup: trial_residual(&trial, e, grid_points)?.sup,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmin = points
        .iter()
        .fold(None::<&SweepPoint>, |best, p| match best {
            Some(b) if b.sup <= p.sup => Some(b),
            _ => Some(p),
        })
        .cloned()
        .expect("range is non-empty");
    Ok(SweepResult { points, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{apply_closed_normalized, boundary_value};
    use crate::quadrature::{apply_numeric, chebyshev_points, PvSettings};

    #[test]
    fn gamma_closed_forms() {
        let a = 1443.0 * PI / 4096.0;
        let g = GammaSeries::new(TrialKind::GroundCos, a, 5).coeffs;
        let expect = [
            1.0,
            a.powi(2) / 4.0,
            a.powi(4) / 96.0,
            19.0 * a.powi(6) / 5760.0,
            559.0 * a.powi(8) / 645120.0,
        ];
        for (x, y) in g.iter().zip(expect) {
            assert!((x - y).abs() < 1e-14 * y.abs().max(1.0), "{x} vs {y}");
        }
        let b = 1760.0 * PI / 4096.0;
        let g = GammaSeries::new(TrialKind::ExcitedSinCos, b, 4).coeffs;
        let expect = [
            b,
            -5.0 * b.powi(3) / 12.0,
            19.0 * b.powi(5) / 480.0,
            -31.0 * b.powi(7) / 8064.0,
        ];
        for (x, y) in g.iter().zip(expect) {
            assert!((x - y).abs() < 1e-13 * y.abs(), "{x} vs {y}");
        }
    }

    #[test]
    fn normalization_constants() {
        let g = make_trial(TrialKind::GroundCos, 1443, 15).unwrap();
        assert!((g.norm_c - 0.921749).abs() < 5e-7, "{}", g.norm_c);
        let e = make_trial(TrialKind::ExcitedSinCos, 1760, 15).unwrap();
        assert!((e.norm_c - 1.99693).abs() < 5e-6, "{}", e.norm_c);
        let flat = make_trial(TrialKind::GroundCos, 0, 3).unwrap();
        assert!((flat.norm_c - 0.75_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            make_trial(TrialKind::GroundCos, 2048, 5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(make_trial(TrialKind::GroundCos, 10, 0), Err(Error::Usage(_))));
        assert!(matches!(
            make_trial(TrialKind::ExcitedSinCos, 0, 5),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!("sideways".parse::<TrialKind>(), Err(Error::Usage(_))));
    }

    #[test]
    fn expansions_match_printed_leading_terms() {
        let g = make_trial(TrialKind::GroundCos, 1443, 15).unwrap();
        let c = expand_trial(&g, 3);
        assert!((c[0] - 0.921749).abs() < 5e-7);
        assert!((c[1] + 0.743145).abs() < 5e-7);
        assert!((c[2] - 0.011510).abs() < 5e-7);
        let e = make_trial(TrialKind::ExcitedSinCos, 1760, 15).unwrap();
        let c = expand_trial(&e, 2);
        // The printed values carry a normalization rounded about 2.5e-6 high.
        assert!((c[0] + 2.695662).abs() < 1e-5);
        assert!((c[1] - 3.394555).abs() < 1e-5);
    }

    #[test]
    fn flat_trial_expands_to_sqrt_series() {
        let t = make_trial(TrialKind::GroundCos, 0, 4).unwrap();
        let c = expand_trial(&t, 4);
        let s = t.norm_c;
        for (x, y) in c.iter().zip([s, -0.5 * s, -0.125 * s, -0.0625 * s]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_sum_equals_closed_form_on_truncation() {
        for (kind, t) in [(TrialKind::GroundCos, 1443), (TrialKind::ExcitedSinCos, 1760)] {
            let trial = make_trial(kind, t, 12).unwrap();
            let a = apply_ad_trial(&trial);
            let b = apply_closed_normalized(&trial.truncated()).unwrap();
            for j in 0..30 {
                assert!((a.coeff(j) - b.coeff(j)).abs() < 1e-12);
            }
            assert_eq!(a.parity(), Some(kind.parity()));
        }
    }

    #[test]
    fn single_gamma_term_gives_constant_c() {
        let t = make_trial(TrialKind::GroundCos, 1443, 1).unwrap();
        assert_eq!(apply_ad_trial(&t).coeffs(), &[t.norm_c]);
    }

    #[test]
    fn boundary_limit_converges_in_gamma_terms() {
        let value = |terms| boundary_value(&apply_ad_trial(&make_trial(TrialKind::GroundCos, 1443, terms).unwrap()));
        assert!((value(15) - 0.1307145).abs() < 1e-6);
        assert!((value(20) - value(15)).abs() < 1e-5);
    }

    #[test]
    fn image_agrees_with_quadrature() {
        let settings = PvSettings::default();
        let xs = chebyshev_points(25);
        // At 15 terms the gamma truncation dominates near the endpoints. Beyond
        // |x| = 0.95 the worst points sit at 1.7e-6 (ground) and 2.0e-3 (excited).
        for (kind, t, tol, edge) in [
            (TrialKind::GroundCos, 1443, 1e-6, 2e-6),
            (TrialKind::ExcitedSinCos, 1760, 1e-4, 2.5e-3),
        ] {
            let short = make_trial(kind, t, 15).unwrap();
            let long = make_trial(kind, t, 60).unwrap();
            let (short_image, long_image) = (apply_ad_trial(&short), apply_ad_trial(&long));
            for &x in &xs {
                let numeric = apply_numeric(|s| short.evaluate(s), x, &settings).unwrap();
                let d = (numeric - short_image.eval(&x)).abs();
                let bound = if x.abs() < 0.95 { tol } else { edge };
                assert!(d < bound, "{kind} x = {x}: {d}");
                assert!((numeric - long_image.eval(&x)).abs() < 1e-8, "{kind} x = {x}");
            }
        }
    }

    #[test]
    fn sweep_single_point_and_empty() {
        let r = sweep(TrialKind::GroundCos, 1500..=1500, 1.156, 15, 50).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.argmin.theta_num, 1500);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(matches!(
            sweep(TrialKind::GroundCos, empty, 1.0, 15, 10),
            Err(Error::Usage(_))
        ));
    }
}
