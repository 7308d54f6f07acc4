//! Pointwise residuals `|A_D ψ − E ψ|` on Chebyshev-clustered grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{apply_closed_normalized, boundary_value};
use crate::quadrature::chebyshev_points;
use crate::solver::SpectralSolution;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub x: f64,
    pub psi: f64,
    pub ad_psi: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Interior samples in ascending `x`.
    pub grid: Vec<ResidualSample>,
    /// Largest residual over the grid and the boundary limit.
    pub sup: f64,
    /// Where `sup` is attained (`1.0` when it is the boundary limit).
    pub sup_at: f64,
    /// `|A_D ψ(±1)|`, the residual limit at the endpoints where `ψ` vanishes.
    pub boundary_limit: f64,
    /// Signed `A_D ψ(1)`.
    pub boundary_ad: f64,
    pub e_used: f64,
}

impl ResidualReport {
    /// Grid rows followed by the boundary row at `x = 1`; empty when the grid is.
    pub fn rows(&self) -> Vec<ResidualSample> {
        if self.grid.is_empty() {
            return Vec::new();
        }
        let mut rows = self.grid.clone();
        rows.push(ResidualSample {
            x: 1.0,
            psi: 0.0,
            ad_psi: self.boundary_ad,
            residual: self.boundary_limit,
        });
        rows
    }
}

/// Samples `|ad(x) − e psi(x)|` at `grid_points` Chebyshev-Gauss points.
/// `ad` must extend continuously to `x = 1`; its value there is the boundary
/// limit. A `grid_points` of zero produces a report with only that limit.
pub fn residual_report(
    psi: impl Fn(f64) -> f64,
    ad: impl Fn(f64) -> f64,
    e: f64,
    grid_points: usize,
) -> Result<ResidualReport> {
    if e.is_nan() || e < 0.0 || e.is_infinite() {
        return Err(Error::Domain(format!(
            "eigenvalue must be finite and non-negative, got {e}"
        )));
    }
    let mut xs = chebyshev_points(grid_points);
    xs.reverse();
    let grid: Vec<ResidualSample> = xs
        .into_iter()
        .map(|x| {
            let p = psi(x);
            let a = ad(x);
            ResidualSample {
                x,
                psi: p,
                ad_psi: a,
                residual: (a - e * p).abs(),
            }
        })
        .collect();
    let boundary_ad = ad(1.0);
    let boundary_limit = boundary_ad.abs();
    let (mut sup, mut sup_at) = (boundary_limit, 1.0);
    for s in &grid {
        if s.residual > sup {
            sup = s.residual;
            sup_at = s.x;
        }
    }
    Ok(ResidualReport {
        grid,
        sup,
        sup_at,
        boundary_limit,
        boundary_ad,
        e_used: e,
    })
}

/// Residual of a normalized solution against its own eigenvalue, with the
/// operator applied in closed form.
pub fn solution_residual(solution: &SpectralSolution<f64>, grid_points: usize) -> Result<ResidualReport> {
    if solution.norm_c.is_none() {
        return Err(Error::Usage(
            "solution must be normalized before residual analysis".into(),
        ));
    }
    let psi = solution.weighted();
    let image = apply_closed_normalized(&psi)?;
    let report = residual_report(|x| psi.evaluate(&x), |x| image.eval(&x), solution.e, grid_points)?;
    debug_assert!((report.boundary_ad - boundary_value(&image)).abs() <= 1e-12 * (1.0 + report.boundary_limit));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_in, DEFAULT_IMAG_TOL};
    use crate::Parity;

    #[test]
    fn degree_two_residual_closed_form() {
        let sol = solve_in::<f64>(Parity::Even, 1, 1, DEFAULT_IMAG_TOL).unwrap();
        let c = sol.norm_c.unwrap();
        let report = solution_residual(&sol, 400).unwrap();
        for s in &report.grid {
            let x = s.x;
            let expect = (1.2 * c * (1.0 - x * x) - 1.2 * c * (1.0 - 0.4 * x * x) * (1.0 - x * x).sqrt()).abs();
            assert!((s.residual - expect).abs() < 1e-13);
        }
        // The constraint makes the boundary limit vanish; the maximum sits close to it.
        assert!(report.boundary_limit < 1e-14);
        assert!(report.sup_at.abs() > 0.5);
        assert!(report.grid.windows(2).all(|w| w[0].x < w[1].x));
    }

    #[test]
    fn zero_eigenvalue_reduces_to_image_magnitude() {
        let r = residual_report(|_| 0.0, |x| 0.25 + 0.0 * x, 0.0, 5).unwrap();
        assert_eq!(r.sup, 0.25);
        assert_eq!(r.boundary_limit, 0.25);
        assert_eq!(r.rows().len(), 6);
    }

    #[test]
    fn empty_grid_and_bad_energy() {
        let r = residual_report(|_| 0.0, |_| 1.0, 1.0, 0).unwrap();
        assert!(r.rows().is_empty());
        assert_eq!(r.sup, 1.0);
        assert!(matches!(
            residual_report(|_| 0.0, |_| 0.0, -1.0, 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unnormalized_solution_is_rejected() {
        let mut sol = solve_in::<f64>(Parity::Even, 1, 1, DEFAULT_IMAG_TOL).unwrap();
        sol.norm_c = None;
        assert!(matches!(solution_residual(&sol, 3), Err(Error::Usage(_))));
    }
}
