//! Gauss-Legendre rules, adaptive panel integration and the principal-value
//! oracle for the operator on arbitrary functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel estimates at the point where refinement gave up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unconverged {
    pub coarse: f64,
    pub fine: f64,
}

/// Adaptive bisection with a 16-point Gauss-Legendre panel rule. A panel is
/// accepted when the single-panel and two-half-panel estimates agree within
/// its share of `tol * max(1, |I|)`, or when they differ by no more than the
/// rounding noise of the panel sum.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64, Unconverged> {
    adaptive_noisy(
        &|x| {
            let v = f(x);
            (v, v.abs())
        },
        a,
        b,
        tol,
        max_depth,
    )
}

/// Like [`adaptive`] for integrands that also report the magnitude of the
/// terms they cancel, so the noise floor reflects cancellation inside `f`.
pub fn adaptive_noisy(
    f: &impl Fn(f64) -> (f64, f64),
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64, Unconverged> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussLegendre::new(16);
    let (whole, _) = estimate(&rule, a, b, f);
    let scale = whole.abs().max(1.0);
    let budget = tol * scale / (b - a).abs();
    panel(&rule, f, a, b, whole, budget, max_depth)
}

fn estimate(rule: &GaussLegendre, a: f64, b: f64, f: &impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (mut sum, mut magnitude) = (0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let (v, m) = f(mid + half * x);
        sum += w * v;
        magnitude += w * m;
    }
    (half * sum, (half * magnitude).abs())
}

fn panel(
    rule: &GaussLegendre,
    f: &impl Fn(f64) -> (f64, f64),
    a: f64,
    b: f64,
    coarse: f64,
    budget: f64,
    depth: u32,
) -> Result<f64, Unconverged> {
    let mid = 0.5 * (a + b);
    let (left, left_noise) = estimate(rule, a, mid, f);
    let (right, right_noise) = estimate(rule, mid, b, f);
    let fine = left + right;
    let noise = 256.0 * f64::EPSILON * (left_noise + right_noise);
    if (fine - coarse).abs() <= (budget * (b - a).abs()).max(noise) {
        return Ok(fine);
    }
    if depth == 0 {
        eprintln!(
            "DBG a={a:e} b={b:e} c={coarse:e} f={fine:e} bud={:e} noise={noise:e}",
            budget * (b - a).abs()
        );
    }
    if depth == 0 || !fine.is_finite() {
        return Err(Unconverged { coarse, fine });
    }
    Ok(panel(rule, f, a, mid, left, budget, depth - 1)? + panel(rule, f, mid, b, right, budget, depth - 1)?)
}

/// Settings of the principal-value oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct PvSettings {
    /// Excision half-widths as fractions of `h = 1 - |x|`, strictly decreasing.
    pub epsilon_schedule: Vec<f64>,
    /// Absolute panel tolerance (scaled by the integral magnitude when it exceeds one).
    pub panel_tolerance: f64,
    pub max_depth: u32,
    /// Accepted gap between the last two extrapolated values, relative to `1 + |I|`.
    pub extrapolation_tolerance: f64,
}

impl Default for PvSettings {
    fn default() -> Self {
        PvSettings {
            epsilon_schedule: (0..6).map(|j| 1e-2 / f64::powi(2.0, j)).collect(),
            panel_tolerance: 1e-11,
            max_depth: 40,
            extrapolation_tolerance: 1e-8,
        }
    }
}

impl PvSettings {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon_schedule.len() < 2 {
            return Err(Error::Usage("epsilon schedule needs at least two entries".into()));
        }
        let positive = self.epsilon_schedule.iter().all(|e| *e > 0.0 && *e < 1.0);
        let decreasing = self.epsilon_schedule.windows(2).all(|w| w[1] < w[0]);
        if !positive || !decreasing {
            return Err(Error::Usage(
                "epsilon schedule must be strictly decreasing inside (0, 1)".into(),
            ));
        }
        if self.panel_tolerance <= 0.0 || self.extrapolation_tolerance <= 0.0 {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `(2/pi) psi(x) / (1 - x^2) + (1/pi) PV int_{-1}^{1} (psi(x) - psi(t)) / (t - x)^2 dt`
/// evaluated by quadrature, for any `psi` continuous on `[-1, 1]` and vanishing
/// at the endpoints.
///
/// The integral is split at `t = x`. Over `|t - x| < h = 1 - |x|` the two sides
/// are paired, `S(s) = (2 psi(x) - psi(x + s) - psi(x - s)) / s^2`, which removes
/// the `1/(t - x)` singularity; the pairing is excised on `(0, eps)` and the
/// result extrapolated to `eps -> 0` in odd powers of `eps` (S is even in `s`).
/// The one-sided remainder reaches the far endpoint. Square-root endpoint
/// behaviour is smoothed by quadratic substitutions.
pub fn apply_numeric(psi: impl Fn(f64) -> f64, x: f64, settings: &PvSettings) -> Result<f64> {
    if x.is_nan() || x.abs() >= 1.0 {
        return Err(Error::Domain(format!("oracle needs |x| < 1, got {x}")));
    }
    settings.validate()?;
    let tol = settings.panel_tolerance;
    let depth = settings.max_depth;
    let fail = |u: Unconverged| Error::Quadrature {
        x,
        previous: u.coarse,
        last: u.fine,
    };

    let psi_x = psi(x);
    let h = 1.0 - x.abs();
    let paired = |s: f64| {
        let (p, m) = (psi(x + s), psi(x - s));
        let s2 = s * s;
        ((2.0 * psi_x - p - m) / s2, (2.0 * psi_x.abs() + p.abs() + m.abs()) / s2)
    };

    // Paired part on [eps_0, h], with s = h - u^2.
    let eps: Vec<f64> = settings.epsilon_schedule.iter().map(|f| f * h).collect();
    let u_max = (h - eps[0]).sqrt();
    let base = adaptive_noisy(&|u: f64| jacobian(2.0 * u, paired(h - u * u)), 0.0, u_max, tol, depth).map_err(fail)?;
    let mut excised = Vec::with_capacity(eps.len());
    excised.push(base);
    for w in eps.windows(2) {
        let inc = adaptive_noisy(&paired, w[1], w[0], tol, depth).map_err(fail)?;
        excised.push(excised.last().copied().unwrap_or(0.0) + inc);
    }

    let (previous, last) = extrapolate_odd(&eps, &excised);
    let pv_paired = last;
    if (last - previous).abs() > settings.extrapolation_tolerance * (1.0 + last.abs()) {
        return Err(Error::Quadrature { x, previous, last });
    }

    // One-sided remainder from the far endpoint to x -+ h.
    let kernel = |t: f64| {
        let p = psi(t);
        let d = t - x;
        let v = (psi_x - p) / (d * d);
        // Rounding in t - x is amplified by the squared denominator.
        (
            v,
            (psi_x.abs() + p.abs()) / (d * d) + v.abs() * (t.abs() + x.abs()) / d.abs(),
        )
    };
    let remainder = if x > 0.0 {
        let v_max = (2.0 * x).sqrt();
        adaptive_noisy(
            &|v: f64| jacobian(2.0 * v, kernel(-1.0 + v * v)),
            0.0,
            v_max,
            tol,
            depth,
        )
        .map_err(fail)?
    } else if x < 0.0 {
        let v_max = (-2.0 * x).sqrt();
        adaptive_noisy(&|v: f64| jacobian(2.0 * v, kernel(1.0 - v * v)), 0.0, v_max, tol, depth).map_err(fail)?
    } else {
        0.0
    };

    Ok(2.0 / PI * psi_x / (1.0 - x * x) + (pv_paired + remainder) / PI)
}

fn jacobian(d: f64, (v, m): (f64, f64)) -> (f64, f64) {
    (d * v, d.abs() * m)
}

/// Extrapolates `F(eps) = F0 + a_0 eps + a_1 eps^3 + ...` to `eps = 0` from the
/// samples, returning the estimates that use all but the last sample and all
/// samples.
fn extrapolate_odd(eps: &[f64], values: &[f64]) -> (f64, f64) {
    let fit = |count: usize| -> f64 {
        let scale = eps[0];
        // Unknowns: F0, a_0, a_1, ... ; rows: samples.
        let mut m: Vec<Vec<f64>> = (0..count)
            .map(|i| {
                let e = eps[i] / scale;
                let mut row = Vec::with_capacity(count + 1);
                row.push(1.0);
                for p in 0..count - 1 {
                    row.push(e.powi(2 * p as i32 + 1));
                }
                row.push(values[i]);
                row
            })
            .collect();
        solve_dense(&mut m)[0]
    };
    (fit(values.len() - 1), fit(values.len()))
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(m: &mut [Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            let (upper, lower) = m.split_at_mut(r);
            for (dst, src) in lower[0][col..=n].iter_mut().zip(&upper[col][col..=n]) {
                *dst -= f * src;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

/// `count` Chebyshev-Gauss points `cos((2j - 1) pi / (2 count))`, all interior.
pub fn chebyshev_points(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|j| ((2 * j - 1) as f64 * PI / (2 * count) as f64).cos())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 33] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n = {n}");
            let deg = 2 * n - 1;
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32 - 1));
            let expect = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((got - expect).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        // The square-root endpoint is only algebraically resolved, so ask for less.
        let v = adaptive(&|x: f64| (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-9, 50).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn adaptive_reports_failure() {
        let err = adaptive(&|x: f64| 1.0 / x.abs(), -1.0, 1.0, 1e-14, 3).unwrap_err();
        assert!(err.fine.is_finite());
    }

    #[test]
    fn oracle_ground_basis_is_constant_one() {
        let psi = |t: f64| if t.abs() < 1.0 { (1.0 - t * t).sqrt() } else { 0.0 };
        let v = apply_numeric(psi, 0.3, &PvSettings::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn oracle_odd_basis_is_two_x() {
        let psi = |t: f64| if t.abs() < 1.0 { t * (1.0 - t * t).sqrt() } else { 0.0 };
        let v = apply_numeric(psi, 0.5, &PvSettings::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn oracle_at_centre_and_near_boundary() {
        let psi = |t: f64| {
            if t.abs() < 1.0 {
                (1.0 - t * t).sqrt() * (1.0 - 0.4 * t * t)
            } else {
                0.0
            }
        };
        for x in [0.0, -0.7, 0.999] {
            let v = apply_numeric(psi, x, &PvSettings::default()).unwrap();
            let exact = 1.2 - 1.2 * x * x;
            assert!((v - exact).abs() < 1e-8, "x = {x}: {v} vs {exact}");
        }
    }

    #[test]
    fn oracle_domain_and_settings_errors() {
        let psi = |_: f64| 0.0;
        assert!(matches!(
            apply_numeric(psi, 1.0, &PvSettings::default()),
            Err(Error::Domain(_))
        ));
        let bad = PvSettings {
            epsilon_schedule: vec![0.1, 0.2],
            ..PvSettings::default()
        };
        assert!(matches!(apply_numeric(psi, 0.0, &bad), Err(Error::Usage(_))));
    }

    #[test]
    fn odd_power_extrapolation_is_exact_on_model() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let vals: Vec<f64> = eps.iter().map(|e| 3.0 - 2.0 * e + 5.0 * e * e * e).collect();
        let (prev, last) = extrapolate_odd(&eps, &vals);
        assert!((last - 3.0).abs() < 1e-13);
        assert!((prev - 3.0).abs() < 1e-13);
    }

    #[test]
    fn chebyshev_points_are_interior() {
        let pts = chebyshev_points(25);
        assert_eq!(pts.len(), 25);
        assert!(pts.iter().all(|x| x.abs() < 1.0));
        assert!((pts[0] - (PI / 50.0).cos()).abs() < 1e-15);
    }
}
