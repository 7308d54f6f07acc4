//! Truncated eigen-systems for the weighted-polynomial ansatz.
//!
//! Projecting `A_D ψ = E ψ` onto the first `n` powers of `x` and adding the
//! boundary demand `lim_{x→±1} A_D ψ = 0` gives the pencil `M0 v = E M1 v`
//! on the coefficient vector `v = (α₀, …, αₙ)`. Row `i < n` of `M0` collects
//! the coupling coefficients that land on `x^(exponent(i))`, row `i` of `M1`
//! is the Taylor convolution of `√(1 - x²)` with `v`, and the last row is the
//! boundary constraint (zero in `M1`).
//!
//! The constraint is solved for `αₙ` and the unit lower-triangular block of
//! `M1` is inverted by forward substitution, which leaves an `n × n` standard
//! eigenproblem. Its spectrum is computed in binary64; the selected root is
//! then refined in the working precision of the scalar type.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, Lu, Matrix};
use crate::operator::taylor_coefficients;
use crate::polynomial::{Parity, WeightedPolynomial};
use crate::scalar::Real;
use crate::series::{eigenvalue_from_series, CouplingMatrix, SqrtSeries};

/// Default relative tolerance on the imaginary part of an accepted eigenvalue.
pub const DEFAULT_IMAG_TOL: f64 = 1e-8;

/// The pencil `(M0, M1)` for one parity and truncation half-degree `n`.
#[derive(Clone, Debug)]
pub struct GeneralizedSystem<T> {
    parity: Parity,
    n: usize,
    m0: Matrix<T>,
    m1: Matrix<T>,
}

impl<T: Real> GeneralizedSystem<T> {
    /// Builds the system for polynomial degree `2n` (even) or `2n + 1` (odd).
    pub fn assemble(parity: Parity, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("truncation half-degree must be at least 1".into()));
        }
        let series = SqrtSeries::<T>::new(n);
        let table = CouplingMatrix::from_series(parity, n, &series);
        let mut m0 = Matrix::zeros(n + 1, n + 1);
        let mut m1 = Matrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for k in i..=n {
                m0[(i, k)] = table.get(k - i, k)?.clone();
            }
            for k in 0..=i {
                m1[(i, k)] = series.get(i - k).clone();
            }
        }
        for m in 0..=n {
            m0[(n, m)] = table.boundary_sum(m);
        }
        if m0[(n, n)].is_zero() {
            return Err(Error::Degenerate(
                "boundary constraint does not involve the top coefficient".into(),
            ));
        }
        Ok(GeneralizedSystem { parity, n, m0, m1 })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Truncation half-degree.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Polynomial degree `2n` or `2n + 1`.
    pub fn degree(&self) -> usize {
        self.parity.exponent(self.n)
    }

    pub fn m0(&self) -> &Matrix<T> {
        &self.m0
    }

    pub fn m1(&self) -> &Matrix<T> {
        &self.m1
    }

    /// `A = B⁻¹ (M0' − M0[:, n] r'/rₙ)` where `B` is the leading block of
    /// `M1`, `r` the constraint row and primes denote the leading `n` columns.
    pub fn reduced(&self) -> Matrix<T> {
        let n = self.n;
        let rn = self.m0[(n, n)].clone();
        let mut a = Matrix::from_fn(n, n, |i, k| {
            let mut v = self.m0[(i, k)].clone();
            let ratio = self.m0[(n, k)].clone() / rn.clone();
            v.sub_mul(&self.m0[(i, n)], &ratio);
            v
        });
        // Forward substitution with the unit lower-triangular block.
        for i in 1..n {
            for k in 0..i {
                let b = self.m1[(i, k)].clone();
                if b.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let upper = a[(k, j)].clone();
                    a[(i, j)].sub_mul(&b, &upper);
                }
            }
        }
        a
    }

    /// `M0 − E M1`.
    pub fn shifted(&self, e: &T) -> Matrix<T> {
        self.m0.sub_scaled(&self.m1, e)
    }

    /// Value of the constraint row on `alphas`, relative to the largest term.
    pub fn constraint_residual(&self, alphas: &[T]) -> f64 {
        let row = self.m0.row(self.n);
        let mut sum = T::zero();
        let mut scale = 0.0_f64;
        for (r, a) in row.iter().zip(alphas) {
            let term = r.clone() * a.clone();
            scale = scale.max(term.to_f64().abs());
            sum += term;
        }
        relative(sum.to_f64().abs(), scale)
    }

    /// Largest magnitude of the first `n` rows of `(M0 − E M1) alphas`,
    /// relative to the largest individual term.
    pub fn rows_residual(&self, e: &T, alphas: &[T]) -> f64 {
        let k = self.shifted(e);
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            let mut sum = T::zero();
            let mut scale = 0.0_f64;
            for (kij, a) in k.row(i).iter().zip(alphas) {
                let term = kij.clone() * a.clone();
                scale = scale.max(term.to_f64().abs());
                sum += term;
            }
            worst = worst.max(relative(sum.to_f64().abs(), scale));
        }
        worst
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        value
    } else {
        value / scale
    }
}

/// Finite spectrum of a system, sorted by real part (then imaginary part).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
}

impl Spectrum {
    /// Eigenvalues passing the reality filter `|Im E| ≤ tol (1 + |Re E|)`,
    /// paired with their imaginary parts, in ascending order.
    pub fn real_values(&self, imag_tol: f64) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()))
            .map(|z| (z.re, z.im.abs()))
            .collect()
    }
}

/// All finite eigenvalues of the system. The infinite eigenvalue carried by
/// the zero constraint row of `M1` is removed by the reduction.
pub fn solve_all<T: Real>(system: &GeneralizedSystem<T>) -> Result<Spectrum> {
    let reduced = system.reduced().map(T::to_f64);
    let mut values = eigenvalues(&reduced).map_err(|reason| Error::Numerical {
        degree: system.degree(),
        precision_bits: T::precision_bits(),
        reason,
    })?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Spectrum { values })
}

/// One approximate eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSolution<T> {
    pub parity: Parity,
    /// 1 is the lowest eigenvalue of this parity.
    pub rank: usize,
    pub degree: usize,
    pub e: T,
    /// Expansion coefficients with leading entry 1.
    pub alphas: Vec<T>,
    /// Normalization constant, set by [`normalize`].
    pub norm_c: Option<T>,
    /// Magnitude of the discarded imaginary part of `E`.
    pub imag_residue: f64,
    pub precision_bits: u32,
    /// Real candidates below this one skipped because their leading entry vanished.
    pub unscalable: usize,
}

impl<T: Real> SpectralSolution<T> {
    pub fn weighted(&self) -> WeightedPolynomial<T> {
        let psi = WeightedPolynomial::new(self.parity, self.alphas.clone())
            .expect("solutions carry at least one coefficient");
        match &self.norm_c {
            Some(c) => psi.with_norm(c.clone()),
            None => psi,
        }
    }

    pub fn to_f64(&self) -> SpectralSolution<f64> {
        SpectralSolution {
            parity: self.parity,
            rank: self.rank,
            degree: self.degree,
            e: self.e.to_f64(),
            alphas: self.alphas.iter().map(T::to_f64).collect(),
            norm_c: self.norm_c.as_ref().map(T::to_f64),
            imag_residue: self.imag_residue,
            precision_bits: self.precision_bits,
            unscalable: self.unscalable,
        }
    }

    /// `eigenvalue_from_series` on the Taylor expansion of the solution,
    /// truncated at `n + 1` terms.
    pub fn series_eigenvalue(&self) -> Result<T> {
        let coeffs = taylor_coefficients(&self.weighted(), self.alphas.len());
        Ok(eigenvalue_from_series(&coeffs, self.parity)?.value)
    }
}

/// Picks the `rank`-th smallest positive real eigenvalue, refines it in the
/// working precision and computes its coefficient vector.
pub fn select<T: Real>(
    system: &GeneralizedSystem<T>,
    spectrum: &Spectrum,
    rank: usize,
    imag_tol: f64,
) -> Result<SpectralSolution<T>> {
    if rank == 0 {
        return Err(Error::Usage("rank counts from 1".into()));
    }
    let candidates: Vec<(f64, f64)> = spectrum
        .real_values(imag_tol)
        .into_iter()
        .filter(|(re, _)| *re > 0.0)
        .collect();
    let mut found = 0;
    for (tried, (re, im)) in candidates.iter().enumerate() {
        let e = refine(system, T::from_f64(*re))?;
        let Some(alphas) = eigenvector(system, &e) else {
            continue;
        };
        found += 1;
        if found == rank {
            // Every candidate tried so far without a coefficient vector.
            let unscalable = tried + 1 - found;
            return Ok(SpectralSolution {
                parity: system.parity,
                rank,
                degree: system.degree(),
                e,
                alphas,
                norm_c: None,
                imag_residue: *im,
                precision_bits: T::precision_bits(),
                unscalable,
            });
        }
    }
    Err(Error::RankUnavailable {
        requested: rank,
        available: found,
    })
}

/// Every real positive eigenpair of the system, ascending, normalized.
pub fn solve_real<T: Real>(system: &GeneralizedSystem<T>, imag_tol: f64) -> Result<Vec<SpectralSolution<T>>> {
    let spectrum = solve_all(system)?;
    let mut out = Vec::new();
    let mut skipped = 0;
    for (re, im) in spectrum.real_values(imag_tol) {
        if re <= 0.0 {
            continue;
        }
        let e = refine(system, T::from_f64(re))?;
        match eigenvector(system, &e) {
            Some(alphas) => out.push(normalize(SpectralSolution {
                parity: system.parity,
                rank: out.len() + 1,
                degree: system.degree(),
                e,
                alphas,
                norm_c: None,
                imag_residue: im,
                precision_bits: T::precision_bits(),
                unscalable: skipped,
            })),
            None => skipped += 1,
        }
    }
    Ok(out)
}

/// Newton iteration on `det(M0 − E M1)`:
/// `E ← E + 1 / tr((M0 − E M1)⁻¹ M1)`. Only applied beyond binary64, where
/// the starting value from the binary64 spectrum is not already final.
fn refine<T: Real>(system: &GeneralizedSystem<T>, start: T) -> Result<T> {
    if T::precision_bits() <= 53 {
        return Ok(start);
    }
    let mut e = start;
    let tol = T::epsilon() * T::from_f64(64.0);
    for _ in 0..60 {
        let lu = Lu::factor(&system.shifted(&e));
        if lu.regularized > 0 {
            return Ok(e);
        }
        let tr = lu.trace_of_solve(&system.m1);
        if tr.is_zero() || !tr.is_finite() {
            break;
        }
        let step = T::one() / tr;
        e += step.clone();
        if step.abs() <= tol.clone() * e.abs() {
            return Ok(e);
        }
    }
    Err(Error::Numerical {
        degree: system.degree(),
        precision_bits: T::precision_bits(),
        reason: format!("Newton refinement of E near {} did not converge", e.to_f64()),
    })
}

/// Null vector of `M0 − E M1` by inverse iteration, scaled to leading entry 1.
/// `None` when the leading entry is numerically zero.
fn eigenvector<T: Real>(system: &GeneralizedSystem<T>, e: &T) -> Option<Vec<T>> {
    let lu = Lu::factor(&system.shifted(e));
    let size = system.n + 1;
    let mut v: Vec<T> = (0..size).map(|i| T::one() / T::from_usize(i + 1)).collect();
    for _ in 0..4 {
        v = lu.solve(&v);
        let scale = v.iter().fold(T::zero(), |m, x| T::max_abs(&m, x));
        if scale.is_zero() || !scale.is_finite() {
            return None;
        }
        for x in v.iter_mut() {
            *x /= scale.clone();
        }
    }
    let lead = v[0].clone();
    if lead.abs() <= T::epsilon().sqrt() {
        return None;
    }
    Some(v.into_iter().map(|x| x / lead.clone()).collect())
}

/// `∫₋₁¹ x^p (1 − x²) dx` for even `p`.
fn weighted_moment<T: Real>(p: usize) -> T {
    let two = T::from_f64(2.0);
    two.clone() / T::from_usize(p + 1) - two / T::from_usize(p + 3)
}

/// Sets `C` so that `∫ ψ² = 1`, using exact monomial moments.
pub fn normalize<T: Real>(mut solution: SpectralSolution<T>) -> SpectralSolution<T> {
    let parity = solution.parity;
    let a = &solution.alphas;
    let mut norm2 = T::zero();
    for (j, aj) in a.iter().enumerate() {
        for (k, ak) in a.iter().enumerate() {
            let moment = weighted_moment::<T>(parity.exponent(j) + parity.exponent(k));
            norm2 += aj.clone() * ak.clone() * moment;
        }
    }
    solution.norm_c = Some(T::one() / norm2.sqrt());
    solution
}

/// How much precision a solve runs in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionPolicy {
    /// binary64 at every degree.
    #[default]
    Machine,
    /// binary64 through degree 120; above it `max(64, 8n)` mantissa bits.
    Auto,
    /// A fixed mantissa width, rounded up to the next available tier.
    Bits(u32),
}

impl PrecisionPolicy {
    /// Mantissa bits requested for a system of truncation half-degree `n`.
    pub fn bits_for(self, n: usize) -> u32 {
        match self {
            PrecisionPolicy::Machine => 53,
            PrecisionPolicy::Auto if 2 * n <= 120 => 53,
            PrecisionPolicy::Auto => (8 * n as u32).max(64),
            PrecisionPolicy::Bits(b) => b,
        }
    }
}

/// Options for [`solve_state`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub precision: PrecisionPolicy,
    pub imag_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            precision: PrecisionPolicy::Machine,
            imag_tol: DEFAULT_IMAG_TOL,
        }
    }
}

/// assemble, solve, select and normalize in `T`.
pub fn solve_in<T: Real>(parity: Parity, n: usize, rank: usize, imag_tol: f64) -> Result<SpectralSolution<T>> {
    let system = GeneralizedSystem::<T>::assemble(parity, n)?;
    let spectrum = solve_all(&system)?;
    Ok(normalize(select(&system, &spectrum, rank, imag_tol)?))
}

/// Solves for the `rank`-th state of the given parity at polynomial `degree`,
/// choosing the scalar type from the precision policy. The result is
/// reported in binary64 together with the precision it was computed in.
pub fn solve_state(
    parity: Parity,
    degree: usize,
    rank: usize,
    options: &SolveOptions,
) -> Result<SpectralSolution<f64>> {
    let n = parity.half_degree(degree)?;
    let bits = options.precision.bits_for(n);
    let tol = options.imag_tol;
    dispatch(bits, parity, n, rank, tol)
}

#[cfg(feature = "extended")]
fn dispatch(bits: u32, parity: Parity, n: usize, rank: usize, tol: f64) -> Result<SpectralSolution<f64>> {
    use crate::extended::*;
    let tier = tier_for(bits).ok_or_else(|| {
        Error::Usage(format!(
            "precision of {bits} bits exceeds the largest tier ({})",
            TIERS[TIERS.len() - 1]
        ))
    })?;
    let sol = match tier {
        53 => solve_in::<f64>(parity, n, rank, tol)?.to_f64(),
        128 => solve_in::<Mp128>(parity, n, rank, tol)?.to_f64(),
        256 => solve_in::<Mp256>(parity, n, rank, tol)?.to_f64(),
        512 => solve_in::<Mp512>(parity, n, rank, tol)?.to_f64(),
        1024 => solve_in::<Mp1024>(parity, n, rank, tol)?.to_f64(),
        2048 => solve_in::<Mp2048>(parity, n, rank, tol)?.to_f64(),
        _ => solve_in::<Mp4096>(parity, n, rank, tol)?.to_f64(),
    };
    Ok(sol)
}

#[cfg(not(feature = "extended"))]
fn dispatch(bits: u32, parity: Parity, n: usize, rank: usize, tol: f64) -> Result<SpectralSolution<f64>> {
    if bits > 53 {
        return Err(Error::Usage(format!(
            "{bits}-bit precision needs the `extended` feature"
        )));
    }
    Ok(solve_in::<f64>(parity, n, rank, tol)?.to_f64())
}
