//! Eigenpairs of the Cauchy operator `(-Δ)^(1/2)` on the interval `(-1, 1)`
//! with exterior Dirichlet conditions.
//!
//! Eigenfunctions are approximated by weighted polynomials
//! `ψ(x) = C √(1 - x²) Σ αₘ xᵐ`. On that class the operator acts in closed
//! form, producing a plain polynomial, so truncating the expansion and
//! imposing a boundary constraint gives a finite generalized eigenproblem.
//!
//! The numerical core is generic over [`Real`]; `f64` is the default scalar
//! and the `extended` feature adds MPFR-backed types such as [`Mp256`].

pub mod analysis;
pub mod error;
#[cfg(feature = "extended")]
pub mod extended;
pub mod linalg;
pub mod operator;
pub mod polynomial;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod trial;

pub use error::{Error, Result};
#[cfg(feature = "extended")]
pub use extended::{Extended, Mp1024, Mp128, Mp2048, Mp256, Mp4096, Mp512};
pub use polynomial::{Parity, PlainPolynomial, WeightedPolynomial};
pub use quadrature::PvSettings;
pub use scalar::Real;
pub use series::{CouplingMatrix, SqrtSeries};
pub use solver::{GeneralizedSystem, PrecisionPolicy, SpectralSolution};
pub use trial::{TrialFunction, TrialKind};

/// Weighted polynomial in binary64.
pub type Weighted64 = WeightedPolynomial<f64>;
/// Plain polynomial in binary64.
pub type Plain64 = PlainPolynomial<f64>;
/// Generalized system assembled in binary64.
pub type System64 = GeneralizedSystem<f64>;
/// Solution carried in binary64.
pub type Solution64 = SpectralSolution<f64>;
