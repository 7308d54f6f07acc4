//! Small dense linear algebra: matrices, LU with partial pivoting and a real
//! nonsymmetric eigenvalue routine (balancing, Hessenberg reduction, Francis
//! double-shift QR).

// The eigenvalue routines keep the explicit 1-based index loops of the
// classic formulation, which is easier to check against it.
#![allow(clippy::needless_range_loop)]

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    acc.add_mul(a, x);
                }
                acc
            })
            .collect()
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// `self - s * other`.
    pub fn sub_scaled(&self, other: &Self, s: &T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(&other.data) {
            o.sub_mul(s, b);
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| T::max_abs(&m, x))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization `P A = L U` of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign_flips: usize,
    /// Pivots that came out exactly zero and were replaced by a tiny value.
    pub regularized: usize,
}

impl<T: Real> Lu<T> {
    /// Factors `a`. An exactly singular pivot is replaced by `eps * max|a|`,
    /// which is what inverse iteration needs at a converged eigenvalue.
    pub fn factor(a: &Matrix<T>) -> Self {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0;
        let mut regularized = 0;
        let tiny = {
            let m = a.max_abs();
            let m = if m.is_zero() { T::one() } else { m };
            T::epsilon() * m
        };
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign_flips += 1;
            }
            if lu[(k, k)].is_zero() {
                lu[(k, k)] = tiny.clone();
                regularized += 1;
            }
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                let f = lu[(i, k)].clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)].clone();
                    lu[(i, j)].sub_mul(&f, &u);
                }
                lu[(i, k)] = f;
            }
        }
        Lu {
            lu,
            perm,
            sign_flips,
            regularized,
        }
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "dimension mismatch");
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let xj = x[j].clone();
                x[i].sub_mul(&self.lu[(i, j)], &xj);
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let xj = x[j].clone();
                x[i].sub_mul(&self.lu[(i, j)], &xj);
            }
            x[i] = x[i].clone() / self.lu[(i, i)].clone();
        }
        x
    }

    pub fn determinant(&self) -> T {
        let mut d = T::one();
        for i in 0..self.dim() {
            d *= self.lu[(i, i)].clone();
        }
        if self.sign_flips % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// `tr(A^{-1} B)`, one solve per column of `B`.
    pub fn trace_of_solve(&self, b: &Matrix<T>) -> T {
        let n = self.dim();
        let mut tr = T::zero();
        for j in 0..n {
            let col: Vec<T> = (0..n).map(|i| b[(i, j)].clone()).collect();
            if col.iter().all(|c| c.is_zero()) {
                continue;
            }
            tr += self.solve(&col)[j].clone();
        }
        tr
    }
}

/// All eigenvalues of a real square matrix, in no particular order. `Err`
/// carries a description when the QR iteration stalls.
pub fn eigenvalues(a: &Matrix<f64>) -> Result<Vec<Complex64>, String> {
    assert_eq!(a.rows, a.cols, "eigenvalues need a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.data.iter().any(|x| !x.is_finite()) {
        return Err("matrix has non-finite entries".into());
    }
    // 1-based working copy keeps the QR sweep indices readable.
    let mut h = vec![vec![0.0_f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = a[(i, j)];
        }
    }
    balance(&mut h, n);
    hessenberg(&mut h, n);
    hqr(&mut h, n)
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 1..=n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[i] *= f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transforms; entries below the subdiagonal are cleared afterwards.
fn hessenberg(a: &mut [Vec<f64>], n: usize) {
    for m in 2..n {
        let mut x = 0.0;
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..i - 1 {
            a[i][j] = 0.0;
        }
    }
}

fn hqr(a: &mut [Vec<f64>], n: usize) -> Result<Vec<Complex64>, String> {
    const MAX_ITS: usize = 60;
    let sign = |a: f64, b: f64| if b >= 0.0 { a.abs() } else { -a.abs() };
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w): (f64, f64, f64, f64);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(format!("QR iteration did not converge ({} eigenvalue(s) left)", nn));
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for row in a.iter_mut().take(mmin + 1).skip(l) {
                                p = x * row[k] + y * row[k + 1];
                                if k != nn - 1 {
                                    p += z * row[k + 2];
                                    row[k + 2] -= p * r;
                                }
                                row[k + 1] -= p * q;
                                row[k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn lu_solves_and_determinant() {
        let a = Matrix::from_fn(3, 3, |i, j| [[2.0, 1.0, 1.0], [4.0, -6.0, 0.0], [-2.0, 7.0, 2.0]][i][j]);
        let lu = Lu::factor(&a);
        let x = lu.solve(&[5.0, -2.0, 9.0]);
        for (xi, e) in x.iter().zip([1.0, 1.0, 2.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
        assert!((lu.determinant() - (-16.0)).abs() < 1e-12);
        assert_eq!(lu.regularized, 0);
    }

    #[test]
    fn lu_regularizes_exact_singularity() {
        let a = Matrix::from_fn(2, 2, |i, j| [[1.0, 2.0], [2.0, 4.0]][i][j]);
        let lu = Lu::factor(&a);
        assert_eq!(lu.regularized, 1);
        let v = lu.solve(&[1.0, 1.0]);
        // Dominated by the null vector (2, -1).
        assert!((v[0] / v[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = Matrix::from_fn(3, 3, |i, j| [[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]][i][j]);
        let ev = sorted_re(eigenvalues(&a).unwrap());
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e.re - want).abs() < 1e-12 && e.im == 0.0, "{e}");
        }
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = Matrix::from_fn(2, 2, |i, j| [[0.0, -1.0], [1.0, 0.0]][i][j]);
        let ev = sorted_re(eigenvalues(&a).unwrap());
        assert!((ev[0].im + 1.0).abs() < 1e-15 && (ev[1].im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn badly_scaled_upper_triangular() {
        let a = Matrix::from_fn(4, 4, |i, j| {
            if j < i {
                0.0
            } else if i == j {
                (i + 1) as f64
            } else {
                1e6_f64.powi((j - i) as i32)
            }
        });
        let ev = sorted_re(eigenvalues(&a).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e.re - (k + 1) as f64).abs() < 1e-8, "{e}");
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let a = Matrix::from_fn(2, 2, |_, _| f64::NAN);
        assert!(eigenvalues(&a).is_err());
    }

    proptest! {
        #[test]
        fn eigenvalues_match_trace_and_determinant(
            entries in proptest::collection::vec(-1.0f64..1.0, 36),
            n in 1usize..=6,
        ) {
            let a = Matrix::from_fn(n, n, |i, j| entries[i * 6 + j]);
            let ev = eigenvalues(&a).unwrap();
            prop_assert_eq!(ev.len(), n);
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let sum: Complex64 = ev.iter().sum();
            let prod: Complex64 = ev.iter().product();
            let det = Lu::factor(&a).determinant();
            prop_assert!((sum.re - trace).abs() < 1e-9 && sum.im.abs() < 1e-9);
            prop_assert!((prod.re - det).abs() < 1e-9 && prod.im.abs() < 1e-9);
        }

        #[test]
        fn lu_round_trip(
            entries in proptest::collection::vec(-1.0f64..1.0, 25),
            rhs in proptest::collection::vec(-1.0f64..1.0, 5),
        ) {
            let a = Matrix::from_fn(5, 5, |i, j| entries[i * 5 + j] + if i == j { 3.0 } else { 0.0 });
            let x = Lu::factor(&a).solve(&rhs);
            let back = a.mul_vec(&x);
            for (b, r) in back.iter().zip(&rhs) {
                prop_assert!((b - r).abs() < 1e-12);
            }
        }
    }
}
