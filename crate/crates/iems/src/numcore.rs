//! Shared numerical primitives: dense real/complex matrices, LU solves, a
//! symmetric eigensolver (tridiagonalization + implicit QL), complex
//! Hessenberg QR eigenvalues, and power iteration for spectral norms.
//!
//! Everything here is self-contained and desk-scale (matrix sizes up to a few
//! hundred). Determinism is preferred over peak performance: fixed iteration
//! caps, fixed tolerances, and a fixed start vector for power iteration, so
//! repeated runs produce bit-identical output.

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum NumError {
    /// A matrix expected to be symmetric was not, beyond tolerance.
    #[error("matrix not symmetric: max |M - M^T| entry {0:.3e} exceeds tolerance")]
    NotSymmetric(f64),
    /// An iterative eigenvalue method failed to converge within its cap.
    #[error("eigenvalue iteration failed to converge ({0})")]
    NoConvergence(String),
    /// A linear solve hit a pivot too small to trust.
    #[error("singular matrix: pivot {pivot:.3e} below threshold at column {col}")]
    Singular { pivot: f64, col: usize },
    /// Shape mismatch between operands.
    #[error("dimension mismatch: {0}")]
    Dim(String),
}

/// Tolerance for the symmetry precheck in [`sym_eig`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative pivot threshold below which LU factorization reports singularity.
pub const PIVOT_TOL: f64 = 1e-14;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from a row-major value vector. Panics if the count mismatches.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "row-major value count must equal rows*cols");
        Self { rows, cols, data }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry accessor.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Entry mutator.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Matrix-vector product `M x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut s = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                s += a * b;
            }
            y[i] = s;
        }
        y
    }

    /// Transposed matrix-vector product `M^T x`.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (yj, a) in y.iter_mut().zip(row.iter()) {
                *yj += a * xi;
            }
        }
        y
    }

    /// Dense product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Symmetric part `(M + M^T)/2`; requires a square matrix.
    pub fn symmetric_part(&self) -> DenseMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut s = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        s
    }

    /// Largest absolute deviation from symmetry, `max |M_ij - M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }
}

/// LU factorization with partial pivoting, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    /// Packed L (unit lower, below diagonal) and U (upper, on/above diagonal).
    lu: Vec<f64>,
    /// Row permutation applied to the right-hand side before substitution.
    perm: Vec<usize>,
}

impl LuFactors {
    /// Factor a square matrix. Reports singularity when a pivot falls below
    /// `PIVOT_TOL` times the largest absolute entry of the matrix.
    pub fn factor(m: &DenseMatrix) -> Result<Self, NumError> {
        if m.rows != m.cols {
            return Err(NumError::Dim(format!("LU needs square matrix, got {}x{}", m.rows, m.cols)));
        }
        let n = m.rows;
        let scale = m.max_abs().max(1.0);
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            // Partial pivoting: bring the largest remaining entry of this
            // column to the diagonal.
            let mut pivot_row = col;
            let mut pivot_val = lu[col * n + col].abs();
            for r in (col + 1)..n {
                let v = lu[r * n + col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            if pivot_val < PIVOT_TOL * scale {
                return Err(NumError::Singular { pivot: pivot_val, col });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            let d = lu[col * n + col];
            for r in (col + 1)..n {
                let factor = lu[r * n + col] / d;
                lu[r * n + col] = factor;
                if factor != 0.0 {
                    for j in (col + 1)..n {
                        lu[r * n + j] -= factor * lu[col * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    /// Solve `M x = rhs` using the stored factorization.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        // Forward substitution with unit lower factor.
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        // Back substitution with the upper factor.
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Solve `M x = rhs` by LU with partial pivoting.
pub fn linear_solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>, NumError> {
    Ok(LuFactors::factor(m)?.solve(rhs))
}

/// Ascending eigenvalues of a symmetric matrix.
///
/// Householder tridiagonalization followed by the implicit QL algorithm with
/// Wilkinson-style shifts. The input must be symmetric within
/// [`SYMMETRY_TOL`] relative to its largest entry.
pub fn sym_eig(m: &DenseMatrix) -> Result<Vec<f64>, NumError> {
    sym_eig_impl(m, false).map(|(vals, _)| vals)
}

/// Ascending eigenvalues plus orthonormal eigenvectors (as matrix columns).
pub fn sym_eig_with_vectors(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), NumError> {
    sym_eig_impl(m, true).map(|(vals, vecs)| (vals, vecs.expect("vectors requested")))
}

fn sym_eig_impl(
    m: &DenseMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<DenseMatrix>), NumError> {
    if m.rows != m.cols {
        return Err(NumError::Dim(format!("sym_eig needs square matrix, got {}x{}", m.rows, m.cols)));
    }
    let scale = m.max_abs().max(1.0);
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL * scale {
        return Err(NumError::NotSymmetric(asym));
    }
    let n = m.rows;
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| DenseMatrix::zeros(0, 0))));
    }
    // Householder tridiagonalization (classic tred2 layout: `a` accumulates
    // the orthogonal transformation when vectors are requested).
    let mut a = m.data.clone();
    let mut d = vec![0.0f64; n]; // diagonal
    let mut e = vec![0.0f64; n]; // sub-diagonal, e[0] unused
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut sc = 0.0;
            for k in 0..=l {
                sc += a[i * n + k].abs();
            }
            if sc == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= sc;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = sc * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for j in 0..=l {
                    if want_vectors {
                        a[j * n + i] = a[i * n + j] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let fj = a[i * n + j];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        a[j * n + k] -= fj * e[k] + gj * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    if want_vectors {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    for i in 0..n {
        if want_vectors {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[i * n + k] * a[k * n + j];
                    }
                    for k in 0..i {
                        a[k * n + j] -= g * a[k * n + i];
                    }
                }
            }
            d[i] = a[i * n + i];
            a[i * n + i] = 1.0;
            for j in 0..i {
                a[j * n + i] = 0.0;
                a[i * n + j] = 0.0;
            }
        } else {
            d[i] = a[i * n + i];
        }
    }
    // Implicit QL with shifts on the tridiagonal (classic tql2).
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mi = l;
            while mi < n - 1 {
                let dd = d[mi].abs() + d[mi + 1].abs();
                if e[mi].abs() <= f64::EPSILON * dd {
                    break;
                }
                mi += 1;
            }
            if mi == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(NumError::NoConvergence(format!(
                    "QL exceeded 50 sweeps at eigenvalue index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mi] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..mi).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mi] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want_vectors {
                    for k in 0..n {
                        f = a[k * n + i + 1];
                        a[k * n + i + 1] = s * a[k * n + i] + c * f;
                        a[k * n + i] = c * a[k * n + i] - s * f;
                    }
                }
            }
            if r == 0.0 && mi > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mi] = 0.0;
        }
    }
    // Sort ascending (and permute vectors alongside).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("eigenvalues are finite"));
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vecs = want_vectors.then(|| {
        let mut v = DenseMatrix::zeros(n, n);
        for (newcol, &oldcol) in order.iter().enumerate() {
            for r in 0..n {
                v.set(r, newcol, a[r * n + oldcol]);
            }
        }
        v
    });
    Ok((vals, vecs))
}

/// Dense complex matrix in row-major order; used only for eigenvalue work.
#[derive(Debug, Clone)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero square complex matrix of order `n`.
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Matrix order.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry accessor.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Entry mutator.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }
}

/// Iteration cap for the complex QR eigenvalue sweep (per eigenvalue).
const QR_MAX_SWEEPS: usize = 100;

/// All eigenvalues of a square complex matrix.
///
/// Parlett–Reinsch style balancing, Givens reduction to upper Hessenberg
/// form, then the shifted QR algorithm with deflation. Intended for the
/// small matrices (order ≤ 9) arising from companion matrices, but correct
/// for any square input.
pub fn complex_eig(m: &ComplexMatrix) -> Result<Vec<Complex64>, NumError> {
    let n = m.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    balance(&mut h);
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// Two-sided diagonal scaling by powers of two; leaves eigenvalues intact
/// while roughly equalizing row and column norms.
fn balance(a: &mut ComplexMatrix) {
    let n = a.n;
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).norm();
                    r += a.get(i, j).norm();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                let mut c2 = c;
                while c2 < g {
                    f *= radix;
                    c2 *= sqrdx;
                }
                g = r * radix;
                while c2 > g {
                    f /= radix;
                    c2 /= sqrdx;
                }
                if (c2 + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        let v = a.get(i, j) * ginv;
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Givens-rotation reduction of a square complex matrix to upper Hessenberg
/// form by unitary similarity.
fn reduce_to_hessenberg(a: &mut ComplexMatrix) {
    let n = a.n;
    for col in 0..n.saturating_sub(2) {
        for row in (col + 2)..n {
            let x = a.get(col + 1, col);
            let y = a.get(row, col);
            if y.norm() == 0.0 {
                continue;
            }
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let c = x / r;
            let s = y / r;
            // Rows (col+1, row): G^H from the left.
            for j in 0..n {
                let u = a.get(col + 1, j);
                let v = a.get(row, j);
                a.set(col + 1, j, c.conj() * u + s.conj() * v);
                a.set(row, j, -s * u + c * v);
            }
            // Columns (col+1, row): G from the right.
            for i in 0..n {
                let u = a.get(i, col + 1);
                let v = a.get(i, row);
                a.set(i, col + 1, u * c + v * s);
                a.set(i, row, -u * s.conj() + v * c.conj());
            }
        }
    }
}

/// Eigenvalue of the complex 2x2 [[a,b],[c,d]] closer to `d` (Wilkinson shift).
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Shifted QR with deflation on an upper Hessenberg complex matrix.
fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>, NumError> {
    let n = h.n;
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is rows/cols 0..hi
    let mut sweeps_here = 0usize;
    while hi > 0 {
        // Deflate: zero-out negligibly small subdiagonals.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h.get(lo, lo - 1).norm() <= f64::EPSILON * s {
                h.set(lo, lo - 1, Complex64::new(0.0, 0.0));
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs.push(h.get(hi - 1, hi - 1));
            hi -= 1;
            sweeps_here = 0;
            continue;
        }
        sweeps_here += 1;
        if sweeps_here > QR_MAX_SWEEPS {
            return Err(NumError::NoConvergence(format!(
                "complex QR exceeded {QR_MAX_SWEEPS} sweeps on block of size {}",
                hi - lo
            )));
        }
        // Exceptional shift every 15 sweeps breaks rare symmetry stalls.
        let sigma = if sweeps_here % 15 == 0 {
            h.get(hi - 1, hi - 2) * Complex64::new(1.5, 0.5)
        } else {
            wilkinson_shift(
                h.get(hi - 2, hi - 2),
                h.get(hi - 2, hi - 1),
                h.get(hi - 1, hi - 2),
                h.get(hi - 1, hi - 1),
            )
        };
        // One explicit QR sweep on the active block: H - σI = QR, H ← RQ + σI.
        for i in lo..hi {
            let v = h.get(i, i) - sigma;
            h.set(i, i, v);
        }
        let mut rot = Vec::with_capacity(hi - lo - 1);
        for i in lo..(hi - 1) {
            let x = h.get(i, i);
            let y = h.get(i + 1, i);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            for j in i..hi {
                let u = h.get(i, j);
                let v = h.get(i + 1, j);
                h.set(i, j, c.conj() * u + s.conj() * v);
                h.set(i + 1, j, -s * u + c * v);
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let i = lo + idx;
            for row in lo..=(i + 1).min(hi - 1) {
                let u = h.get(row, i);
                let v = h.get(row, i + 1);
                h.set(row, i, u * c + v * s);
                h.set(row, i + 1, -u * s.conj() + v * c.conj());
            }
        }
        for i in lo..hi {
            let v = h.get(i, i) + sigma;
            h.set(i, i, v);
        }
    }
    eigs.reverse();
    Ok(eigs)
}

/// Spectral norm `‖M‖₂` by power iteration on `M^T M`.
///
/// `apply` and `apply_t` evaluate `M x` and `M^T x`. The start vector is a
/// fixed deterministic ramp, so results are reproducible. Returns the norm
/// estimate; errors if the relative change has not fallen below `tol` within
/// `max_iter` iterations.
pub fn spectral_norm_power(
    dim: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<f64, NumError> {
    if dim == 0 {
        return Ok(0.0);
    }
    // Deterministic, sign-varying start vector with no special symmetry.
    let mut v: Vec<f64> = (0..dim)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin() + 0.25 * ((i as f64) * 1.3).cos())
        .collect();
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nv = norm(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }
    let mut lambda_old = 0.0f64;
    for _ in 0..max_iter {
        let w = apply_t(&apply(&v));
        let lambda = norm(&w);
        if lambda == 0.0 {
            return Ok(0.0);
        }
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / lambda;
        }
        if (lambda - lambda_old).abs() <= tol * lambda.max(1.0) {
            return Ok(lambda.sqrt());
        }
        lambda_old = lambda;
    }
    Err(NumError::NoConvergence(format!(
        "power iteration did not reach tol {tol:.1e} in {max_iter} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_is_identity() {
        let m = DenseMatrix::identity(4);
        let x = linear_solve(&m, &[1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.0, 0.5]);
    }

    #[test]
    fn diagonal_solve_divides_componentwise() {
        let mut m = DenseMatrix::zeros(2, 2);
        m.set(0, 0, 2.0);
        m.set(1, 1, 4.0);
        let x = linear_solve(&m, &[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lu_solve_residual_small() {
        // Moderate random-ish 6x6 system with exact solution of ones.
        let n = 6;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = ((i * 7 + j * 3 + 1) as f64 * 0.37).sin() + if i == j { 4.0 } else { 0.0 };
                m.set(i, j, v);
            }
        }
        let rhs = m.matvec(&vec![1.0; n]);
        let x = linear_solve(&m, &rhs).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(linear_solve(&m, &[1.0, 1.0]), Err(NumError::Singular { .. })));
    }

    #[test]
    fn sym_eig_identity() {
        let vals = sym_eig(&DenseMatrix::identity(4)).unwrap();
        for v in vals {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn sym_eig_diagonal_sorted() {
        let mut m = DenseMatrix::zeros(3, 3);
        m.set(0, 0, -1.0);
        m.set(1, 1, 0.0);
        m.set(2, 2, 2.0);
        let vals = sym_eig(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-13);
        assert!(vals[1].abs() < 1e-13);
        assert!((vals[2] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sym_eig_residual_with_vectors() {
        let n = 8;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = ((i + 2 * j + 1) as f64 * 0.21).cos();
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let (vals, vecs) = sym_eig_with_vectors(&m).unwrap();
        let scale = m.max_abs();
        for (idx, &lam) in vals.iter().enumerate() {
            let v: Vec<f64> = (0..n).map(|r| vecs.get(r, idx)).collect();
            let mv = m.matvec(&v);
            let resid: f64 = mv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-9 * scale, "residual {resid:.3e} too large");
        }
    }

    #[test]
    fn sym_eig_sum_matches_trace() {
        for n in [4usize, 16, 64] {
            let mut m = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = ((i * 5 + j * 11 + 3) as f64 * 0.137).sin();
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            let vals = sym_eig(&m).unwrap();
            let sum: f64 = vals.iter().sum();
            assert!((sum - m.trace()).abs() <= 1e-9 * m.max_abs() * n as f64);
        }
    }

    #[test]
    fn sym_eig_rejects_asymmetric() {
        let m = DenseMatrix::from_vec(2, 2, vec![1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(sym_eig(&m), Err(NumError::NotSymmetric(_))));
    }

    #[test]
    fn complex_eig_two_by_two() {
        // Companion of ζ² − 1: eigenvalues ±1.
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, Complex64::new(1.0, 0.0));
        m.set(1, 0, Complex64::new(1.0, 0.0));
        let mut eigs = complex_eig(&m).unwrap();
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((eigs[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((eigs[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_eig_rotation_matrix() {
        // [[0,-1],[1,0]] has eigenvalues ±i.
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, Complex64::new(-1.0, 0.0));
        m.set(1, 0, Complex64::new(1.0, 0.0));
        let mut eigs = complex_eig(&m).unwrap();
        eigs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((eigs[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((eigs[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn power_iteration_matches_eigensolver() {
        let n = 12;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, ((i * 3 + j * 5 + 1) as f64 * 0.173).sin());
            }
        }
        let est = spectral_norm_power(n, |x| m.matvec(x), |x| m.matvec_t(x), 1e-12, 10_000).unwrap();
        // Oracle: largest eigenvalue of the symmetric matrix M^T M.
        let mut mtm = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += m.get(l, i) * m.get(l, j);
                }
                mtm.set(i, j, s);
            }
        }
        let vals = sym_eig(&mtm).unwrap();
        let oracle = vals.last().unwrap().max(0.0).sqrt();
        assert!((est - oracle).abs() <= 1e-8 * oracle.max(1.0));
    }
}
