//! Small dense complex linear algebra.
//!
//! Everything here targets filter lengths of a handful of taps, so the
//! factorizations favour robustness over speed: a cyclic Jacobi sweep for
//! Hermitian matrices, and a Takagi factorization obtained from the real
//! symmetric embedding `[[Re C, Im C], [Im C, -Re C]]`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LmsError, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance used when validating Hermitian/symmetric structure.
pub const STRUCTURE_TOL: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense complex column vector.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CplxVec(Vec<C64>);

impl CplxVec {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(elements: Vec<C64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(LmsError::Size("vector must have at least one element".into()));
        }
        if let Some(i) = elements.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LmsError::NonFinite(format!("vector element {i} is {}", elements[i])));
        }
        Ok(Self(elements))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![ZERO; n])
    }

    /// Real-valued vector.
    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    /// Inner product `self^H other`.
    pub fn dot(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Outer product `self other^H`.
    pub fn outer(&self, other: &Self) -> CplxMat {
        CplxMat::from_fn(self.len(), other.len(), |i, j| self.0[i] * other.0[j].conj())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl From<Vec<C64>> for CplxVec {
    fn from(v: Vec<C64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for CplxVec {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CplxVec {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for &CplxVec {
    type Output = CplxVec;
    fn add(self, rhs: &CplxVec) -> CplxVec {
        CplxVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CplxVec {
    type Output = CplxVec;
    fn sub(self, rhs: &CplxVec) -> CplxVec {
        CplxVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for CplxVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CplxMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CplxMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn scaled_identity(n: usize, s: C64) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { s } else { ZERO })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length and finite entries.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(LmsError::Size("matrix must be non-empty".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(LmsError::Structure("ragged matrix rows".into()));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LmsError::NonFinite("matrix entry".into()));
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Checked constructor for a Hermitian matrix.
    pub fn hermitian(rows: Vec<Vec<C64>>) -> Result<Self> {
        let m = Self::from_rows(rows)?;
        m.require_hermitian()?;
        Ok(m)
    }

    /// Checked constructor for a complex symmetric matrix.
    pub fn symmetric(rows: Vec<Vec<C64>>) -> Result<Self> {
        let m = Self::from_rows(rows)?;
        m.require_symmetric()?;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `trace(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.cols, other.rows);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, j: usize) -> CplxVec {
        CplxVec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn mul_vec(&self, v: &CplxVec) -> CplxVec {
        debug_assert_eq!(self.cols, v.len());
        CplxVec(
            (0..self.rows)
                .map(|i| {
                    let row = &self.data[i * self.cols..(i + 1) * self.cols];
                    row.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
                })
                .collect(),
        )
    }

    /// Largest entrywise deviation `max|M - M^H|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// Largest entrywise deviation `max|M - M^T|`.
    pub fn symmetric_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)]).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_defect() <= STRUCTURE_TOL * self.max_abs()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.symmetric_defect() <= STRUCTURE_TOL * self.max_abs()
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(LmsError::Structure(format!("expected square matrix, got {}x{}", self.rows, self.cols)));
        }
        Ok(())
    }

    fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        if !self.is_finite() {
            return Err(LmsError::NonFinite("matrix entry".into()));
        }
        if !self.is_hermitian() {
            return Err(LmsError::Structure(format!(
                "matrix is not Hermitian (defect {:.3e})",
                self.hermitian_defect()
            )));
        }
        Ok(())
    }

    fn require_symmetric(&self) -> Result<()> {
        self.require_square()?;
        if !self.is_finite() {
            return Err(LmsError::NonFinite("matrix entry".into()));
        }
        if !self.is_symmetric() {
            return Err(LmsError::Structure(format!(
                "matrix is not symmetric (defect {:.3e})",
                self.symmetric_defect()
            )));
        }
        Ok(())
    }

    /// Replaces the matrix with `(M + M^H)/2`.
    pub fn symmetrize_hermitian(&mut self) {
        for i in 0..self.rows {
            let d = self[(i, i)].re;
            self[(i, i)] = C64::new(d, 0.0);
            for j in (i + 1)..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Replaces the matrix with `(M + M^T)/2`.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = (self[(i, j)] + self[(j, i)]) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }
}

impl Index<(usize, usize)> for CplxMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CplxMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CplxMat {
    type Output = CplxMat;
    fn mul(self, rhs: &CplxMat) -> CplxMat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CplxMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CplxMat {
    type Output = CplxMat;
    fn add(self, rhs: &CplxMat) -> CplxMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CplxMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CplxMat {
    type Output = CplxMat;
    fn sub(self, rhs: &CplxMat) -> CplxMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CplxMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CplxMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[C64]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_struct("CplxMat").field("rows", &self.rows).field("cols", &self.cols).field("data", &rows).finish()
    }
}

/// Eigendecomposition `M = Q diag(values) Q^H` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CplxMat,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CplxMat {
        let d = CplxMat::diag(&self.values.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

fn off_diagonal_norm(a: &CplxMat) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &CplxMat) -> Result<HermitianEigen> {
    m.require_hermitian()?;
    let n = m.rows;
    let mut a = m.clone();
    a.symmetrize_hermitian();
    let mut q = CplxMat::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    let mut converged = n == 1;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    if !converged {
        let residual = off_diagonal_norm(&a);
        if residual > 1e-13 * scale {
            return Err(LmsError::NoConvergence { sweeps: MAX_JACOBI_SWEEPS, residual });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CplxMat::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][r]`; accumulates the rotation into `q`.
fn rotate(a: &mut CplxMat, q: &mut CplxMat, p: usize, r: usize) {
    let apr = a[(p, r)];
    let b = apr.norm();
    if b == 0.0 {
        return;
    }
    // Phase that makes the (p, r) entry real and positive.
    let phase = apr / b;
    let app = a[(p, p)].re;
    let arr = a[(r, r)].re;
    let zeta = (arr - app) / (2.0 * b);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to columns (p, r).
    let g_pp = C64::new(c, 0.0);
    let g_pr = C64::new(s, 0.0);
    let g_rp = -phase.conj() * s;
    let g_rr = phase.conj() * c;

    let n = a.rows;
    // A <- A G
    for i in 0..n {
        let aip = a[(i, p)];
        let air = a[(i, r)];
        a[(i, p)] = aip * g_pp + air * g_rp;
        a[(i, r)] = aip * g_pr + air * g_rr;
    }
    // A <- G^H A
    for j in 0..n {
        let apj = a[(p, j)];
        let arj = a[(r, j)];
        a[(p, j)] = g_pp.conj() * apj + g_rp.conj() * arj;
        a[(r, j)] = g_pr.conj() * apj + g_rr.conj() * arj;
    }
    a[(p, r)] = ZERO;
    a[(r, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
    for i in 0..n {
        let qip = q[(i, p)];
        let qir = q[(i, r)];
        q[(i, p)] = qip * g_pp + qir * g_rp;
        q[(i, r)] = qip * g_pr + qir * g_rr;
    }
}

/// Takagi factorization `C = Q diag(sigma) Q^T` of a complex symmetric matrix.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub vectors: CplxMat,
    /// Nonnegative Takagi values (singular values of C), descending.
    pub sigma: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> CplxMat {
        let d = CplxMat::diag(&self.sigma.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        &(&self.vectors * &d) * &self.vectors.transpose()
    }
}

/// Takagi factorization via the real symmetric embedding.
///
/// With `C = A + iB`, an eigenpair `([x; y], s)` of `[[A, B], [B, -A]]`
/// satisfies `C conj(u) = s u` for `u = x + iy`. Eigenvalues come in `±s`
/// pairs; the nonnegative half gives the Takagi vectors. Vectors from the
/// null space are re-orthogonalized in the complex inner product, since a
/// real eigenbasis of the zero cluster may contain both `u` and `i u`.
pub fn takagi_factorize(c: &CplxMat) -> Result<Takagi> {
    c.require_symmetric()?;
    let n = c.rows;
    let mut sym = c.clone();
    sym.symmetrize();

    let embed = CplxMat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = sym[(ii, jj)];
        let v = match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        };
        C64::new(v, 0.0)
    });
    let eig = hermitian_eig(&embed)?;

    let mut accepted: Vec<CplxVec> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for (idx, &value) in eig.values.iter().enumerate() {
        if accepted.len() == n {
            break;
        }
        let col = eig.vectors.column(idx);
        let mut u = CplxVec((0..n).map(|i| C64::new(col[i].re, col[n + i].re)).collect());
        for prev in &accepted {
            let proj = prev.dot(&u);
            for i in 0..n {
                u[i] -= prev[i] * proj;
            }
        }
        let norm = u.norm();
        if norm < 0.5 {
            continue;
        }
        let u = u.scale(C64::new(1.0 / norm, 0.0));
        accepted.push(u);
        sigma.push(value.max(0.0));
    }
    if accepted.len() != n {
        return Err(LmsError::NoConvergence { sweeps: 0, residual: (n - accepted.len()) as f64 });
    }
    let vectors = CplxMat::from_fn(n, n, |i, j| accepted[j][i]);
    Ok(Takagi { vectors, sigma })
}

/// Solves `R x = b` for Hermitian positive definite `R`.
///
/// Fails with [`LmsError::Rank`] when the smallest eigenvalue of `R` is not
/// above `1e-12` times the largest.
pub fn solve_hermitian(r: &CplxMat, b: &CplxVec) -> Result<CplxVec> {
    r.require_hermitian()?;
    if r.rows != b.len() {
        return Err(LmsError::Size(format!("matrix is {}x{} but rhs has {} entries", r.rows, r.cols, b.len())));
    }
    let eig = hermitian_eig(r)?;
    let largest = eig.values[0];
    let smallest = *eig.values.last().expect("non-empty");
    if !(largest > 0.0) || smallest <= 1e-12 * largest {
        return Err(LmsError::Rank { smallest, largest });
    }
    let l = cholesky(r).ok_or(LmsError::Rank { smallest, largest })?;
    let mut x = cholesky_solve(&l, b);
    // One step of iterative refinement.
    let residual = b - &r.mul_vec(&x);
    let dx = cholesky_solve(&l, &residual);
    x = &x + &dx;
    Ok(x)
}

/// Lower-triangular `L` with `R = L L^H`.
fn cholesky(r: &CplxMat) -> Option<CplxMat> {
    let n = r.rows;
    let mut l = CplxMat::zeros(n, n);
    for j in 0..n {
        let mut d = r[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = r[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &CplxMat, b: &CplxVec) -> CplxVec {
    let n = l.rows;
    let mut y = vec![ZERO; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    CplxVec(x)
}
