//! Dense complex kernels: row-major matrices, rank-3 site tensors, strided
//! matrix products, thin QR and truncated SVD.
//!
//! The factorizations are delegated to `nalgebra`; everything that sits on the
//! sampling hot path (the strided product) is implemented here so it can read
//! directly out of a site tensor without copying its physical slices.

use std::ops::{Index, IndexMut};

use nalgebra as na;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        ensure!(
            rows * cols == entries.len(),
            "matrix of shape {rows}x{cols} needs {} entries, got {}",
            rows * cols,
            entries.len()
        );
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius norm of `self - other`; shapes must agree.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation of `self† self` from the identity.
    pub fn column_orthonormality_residual(&self) -> f64 {
        let g = self.adjoint().mul(self);
        max_identity_deviation(&g)
    }

    /// Largest entrywise deviation of `self self†` from the identity.
    pub fn row_orthonormality_residual(&self) -> f64 {
        let g = self.mul(&self.adjoint());
        max_identity_deviation(&g)
    }

    fn mul(&self, other: &Self) -> Self {
        matmul(self, other).expect("internal product with matching shapes")
    }

    pub(crate) fn view(&self) -> MatView<'_> {
        MatView::dense(&self.entries, self.rows, self.cols)
    }

    fn to_nalgebra(&self) -> na::DMatrix<C64> {
        na::DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    fn from_nalgebra(m: &na::DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

fn max_identity_deviation(g: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.rows {
        for j in 0..g.cols {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

/// Rank-3 tensor with index order (left bond, physical, right bond), stored
/// row-major so that both the `(left*phys) x right` and the
/// `left x (phys*right)` matricizations are the raw storage itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    left_dim: usize,
    phys_dim: usize,
    right_dim: usize,
    entries: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(left_dim: usize, phys_dim: usize, right_dim: usize) -> Self {
        Self {
            left_dim,
            phys_dim,
            right_dim,
            entries: vec![C64::new(0.0, 0.0); left_dim * phys_dim * right_dim],
        }
    }

    pub fn from_vec(
        left_dim: usize,
        phys_dim: usize,
        right_dim: usize,
        entries: Vec<C64>,
    ) -> Result<Self> {
        ensure!(
            left_dim * phys_dim * right_dim == entries.len(),
            "tensor of shape ({left_dim},{phys_dim},{right_dim}) needs {} entries, got {}",
            left_dim * phys_dim * right_dim,
            entries.len()
        );
        ensure!(left_dim > 0 && phys_dim > 0 && right_dim > 0, "tensor dimensions must be positive");
        Ok(Self { left_dim, phys_dim, right_dim, entries })
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    #[inline]
    pub fn get(&self, l: usize, s: usize, r: usize) -> C64 {
        self.entries[(l * self.phys_dim + s) * self.right_dim + r]
    }

    #[inline]
    pub fn get_mut(&mut self, l: usize, s: usize, r: usize) -> &mut C64 {
        &mut self.entries[(l * self.phys_dim + s) * self.right_dim + r]
    }

    /// `(left*phys) x right` matricization.
    pub fn to_left_fused(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.left_dim * self.phys_dim,
            cols: self.right_dim,
            entries: self.entries.clone(),
        }
    }

    /// `left x (phys*right)` matricization.
    pub fn to_right_fused(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.left_dim,
            cols: self.phys_dim * self.right_dim,
            entries: self.entries.clone(),
        }
    }

    pub fn from_left_fused(m: ComplexMatrix, phys_dim: usize) -> Result<Self> {
        ensure!(m.rows.is_multiple_of(phys_dim), "row count {} not divisible by {phys_dim}", m.rows);
        Self::from_vec(m.rows / phys_dim, phys_dim, m.cols, m.entries)
    }

    pub fn from_right_fused(m: ComplexMatrix, phys_dim: usize) -> Result<Self> {
        ensure!(m.cols.is_multiple_of(phys_dim), "column count {} not divisible by {phys_dim}", m.cols);
        Self::from_vec(m.rows, phys_dim, m.cols / phys_dim, m.entries)
    }

    /// The `left x right` matrix selected by physical index `s`.
    pub(crate) fn slice(&self, s: usize) -> MatView<'_> {
        MatView {
            data: &self.entries[s * self.right_dim..],
            rows: self.left_dim,
            cols: self.right_dim,
            row_stride: self.phys_dim * self.right_dim,
            col_stride: 1,
            conj: false,
        }
    }

    pub fn physical_slice(&self, s: usize) -> ComplexMatrix {
        self.slice(s).to_matrix()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: C64) {
        self.entries.iter_mut().for_each(|z| *z *= factor);
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise deviation of `Σ_s A^s (A^s)†` from the identity.
    pub fn right_orthonormality_residual(&self) -> f64 {
        self.to_right_fused().row_orthonormality_residual()
    }

    /// Largest entrywise deviation of `Σ_s (A^s)† A^s` from the identity.
    pub fn left_orthonormality_residual(&self) -> f64 {
        self.to_left_fused().column_orthonormality_residual()
    }
}

/// Borrowed strided matrix, optionally conjugated.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MatView<'a> {
    data: &'a [C64],
    rows: usize,
    cols: usize,
    row_stride: usize,
    col_stride: usize,
    conj: bool,
}

impl<'a> MatView<'a> {
    pub(crate) fn dense(data: &'a [C64], rows: usize, cols: usize) -> Self {
        Self { data, rows, cols, row_stride: cols, col_stride: 1, conj: false }
    }

    pub(crate) fn adjoint(self) -> Self {
        Self {
            data: self.data,
            rows: self.cols,
            cols: self.rows,
            row_stride: self.col_stride,
            col_stride: self.row_stride,
            conj: !self.conj,
        }
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> C64 {
        let z = self.data[i * self.row_stride + j * self.col_stride];
        if self.conj {
            z.conj()
        } else {
            z
        }
    }

    pub(crate) fn to_matrix(self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j))
    }
}

/// `out = a * b`, with `out` a dense row-major `a.rows x b.cols` buffer.
///
/// Loop order i-k-j so the innermost loop streams a contiguous row of `b`
/// whenever `b` has unit column stride (every call site on the hot path).
pub(crate) fn gemm_into(out: &mut [C64], a: MatView<'_>, b: MatView<'_>) {
    debug_assert_eq!(a.cols, b.rows);
    let (m, kk, n) = (a.rows, a.cols, b.cols);
    debug_assert_eq!(out.len(), m * n);
    out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    if b.col_stride == 1 && !b.conj {
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..kk {
                let aik = a.at(i, k);
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                let brow = &b.data[k * b.row_stride..k * b.row_stride + n];
                for (o, &bkj) in row.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        }
    } else {
        for i in 0..m {
            for k in 0..kk {
                let aik = a.at(i, k);
                for j in 0..n {
                    out[i * n + j] += aik * b.at(k, j);
                }
            }
        }
    }
}

/// Standard complex matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure!(
        a.cols == b.rows,
        "matmul shape mismatch: {}x{} times {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    gemm_into(&mut out.entries, a.view(), b.view());
    Ok(out)
}

/// Thin QR factorization `m = Q R`, Q with orthonormal columns.
pub fn qr_decompose(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ensure!(m.rows > 0 && m.cols > 0, "qr of an empty matrix");
    ensure!(m.is_finite(), "qr input has non-finite entries");
    let qr = m.to_nalgebra().qr();
    let q = ComplexMatrix::from_nalgebra(&qr.q());
    let r = ComplexMatrix::from_nalgebra(&qr.r());
    if !(q.is_finite() && r.is_finite()) {
        return Err(Error::Numerical("qr produced non-finite factors".into()));
    }
    Ok((q, r))
}

/// Result of [`svd_truncate`]: `m ≈ U diag(S) V†`.
#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub vt: ComplexMatrix,
    /// Σ_discarded s² / Σ_all s².
    pub discarded_weight: f64,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.rank();
        let us = ComplexMatrix::from_fn(self.u.rows, k, |i, j| self.u[(i, j)] * self.singular_values[j]);
        matmul(&us, &self.vt).expect("consistent factor shapes")
    }
}

pub const DEFAULT_CUTOFF: f64 = 1e-10;

/// SVD keeping `min(chi_max, #{s_i : s_i / s_1 > cutoff})` singular values
/// (at least one). Values below the numerical rank `ε·max(m, n)·s_1` are
/// always dropped. Ties at the `chi_max` boundary keep the factorization's
/// order.
pub fn svd_truncate(m: &ComplexMatrix, chi_max: usize, cutoff: f64) -> Result<TruncatedSvd> {
    ensure!(m.rows > 0 && m.cols > 0, "svd of an empty matrix");
    ensure!(chi_max >= 1, "chi_max must be at least 1");
    ensure!(cutoff >= 0.0, "cutoff must be nonnegative, got {cutoff}");
    ensure!(m.is_finite(), "svd input has non-finite entries");

    let full = full_svd(m)?;
    let s_full = &full.s;

    let mut order: Vec<usize> = (0..s_full.len()).collect();
    order.sort_by(|&a, &b| s_full[b].total_cmp(&s_full[a]));

    let total: f64 = s_full.iter().map(|s| s * s).sum();
    let s_max = s_full[order[0]];
    // singular vectors of numerically zero values are not reliably orthonormal
    let floor = cutoff.max(f64::EPSILON * m.rows.max(m.cols) as f64);
    let above = order
        .iter()
        .take_while(|&&i| s_max > 0.0 && s_full[i] / s_max > floor)
        .count();
    let keep = above.clamp(1, chi_max.min(order.len()));
    let kept = &order[..keep];

    let kept_weight: f64 = kept.iter().map(|&i| s_full[i] * s_full[i]).sum();
    let discarded_weight = if total > 0.0 { ((total - kept_weight) / total).max(0.0) } else { 0.0 };

    let u = ComplexMatrix::from_fn(m.rows, keep, |i, j| full.u[(i, kept[j])]);
    let vt = ComplexMatrix::from_fn(keep, m.cols, |i, j| full.vt[(kept[i], j)]);
    let singular_values = kept.iter().map(|&i| s_full[i]).collect();
    let out = TruncatedSvd { u, singular_values, vt, discarded_weight };
    if !(out.u.is_finite() && out.vt.is_finite()) {
        return Err(Error::Numerical("svd produced non-finite factors".into()));
    }
    Ok(out)
}

/// Thin factorization `m = u diag(s) vt`, unordered.
struct FullSvd {
    u: ComplexMatrix,
    s: Vec<f64>,
    vt: ComplexMatrix,
}

impl FullSvd {
    fn residual(&self, m: &ComplexMatrix) -> f64 {
        let us = ComplexMatrix::from_fn(self.u.rows, self.s.len(), |i, j| self.u[(i, j)] * self.s[j]);
        matmul(&us, &self.vt).expect("consistent factor shapes").distance(m)
    }
}

// nalgebra's implicit-shift iteration occasionally returns a wrong
// factorization for nearly rank-deficient complex input, so its result is
// checked and replaced by one-sided Jacobi when inconsistent.
fn full_svd(m: &ComplexMatrix) -> Result<FullSvd> {
    let norm = m.frobenius_norm();
    let tol = 1e-10 * norm;
    if let Some(svd) = na::linalg::SVD::try_new(m.to_nalgebra(), true, true, 5.0 * f64::EPSILON, 0) {
        let full = FullSvd {
            u: ComplexMatrix::from_nalgebra(svd.u.as_ref().expect("requested U")),
            s: svd.singular_values.iter().copied().collect(),
            vt: ComplexMatrix::from_nalgebra(svd.v_t.as_ref().expect("requested V^T")),
        };
        let weight: f64 = full.s.iter().map(|s| s * s).sum();
        if (weight.sqrt() - norm).abs() <= tol && full.residual(m) <= tol {
            return Ok(full);
        }
    }
    let full = if m.rows >= m.cols {
        jacobi_svd(m)?
    } else {
        let t = jacobi_svd(&m.adjoint())?;
        FullSvd { u: t.vt.adjoint(), s: t.s, vt: t.u.adjoint() }
    };
    if full.residual(m) > tol.max(f64::MIN_POSITIVE) {
        return Err(Error::Numerical("svd did not converge to a consistent factorization".into()));
    }
    Ok(full)
}

/// One-sided (Hestenes) Jacobi SVD for `rows >= cols`.
fn jacobi_svd(m: &ComplexMatrix) -> Result<FullSvd> {
    const MAX_SWEEPS: usize = 60;
    let (rows, cols) = (m.rows, m.cols);
    debug_assert!(rows >= cols);
    // columns stored contiguously
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| (0..cols).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let col_norm = |x: &[C64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let alpha = col_norm(&a[p]);
                let beta = col_norm(&a[q]);
                let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                converged = false;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = a.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], phase, c, s);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], phase, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::Numerical("jacobi svd did not converge".into()));
    }
    let s: Vec<f64> = a.iter().map(|col| col_norm(col).sqrt()).collect();
    let u = ComplexMatrix::from_fn(rows, cols, |i, j| if s[j] > 0.0 { a[j][i] / s[j] } else { C64::new(0.0, 0.0) });
    let vt = ComplexMatrix::from_fn(cols, cols, |i, j| v[i][j].conj());
    Ok(FullSvd { u, s, vt })
}

// x <- c x - s e^{iφ'} y,  y <- s x + c e^{iφ'} y  with e^{iφ'} = phase
fn rotate(x: &mut [C64], y: &mut [C64], phase: C64, c: f64, s: f64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let yp = *yi * phase;
        let xo = *xi;
        *xi = xo * c - yp * s;
        *yi = xo * s + yp * c;
    }
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub(crate) fn symmetric_eigen(m: na::DMatrix<f64>) -> (Vec<f64>, na::DMatrix<f64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = na::DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn naive_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = c(0.0, 0.0);
                for k in 0..a.cols() {
                    acc += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn identity_times_matrix() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(4.0, -4.0)]).unwrap();
        assert_eq!(matmul(&ComplexMatrix::identity(2), &m).unwrap(), m);
    }

    #[test]
    fn pauli_x_squares_to_identity() {
        let x = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(matmul(&x, &x).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn product_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(3, 4, &mut rng);
        let b = random_matrix(4, 2, &mut rng);
        let fast = matmul(&a, &b).unwrap();
        assert!(fast.distance(&naive_product(&a, &b)) < 1e-12);
    }

    #[test]
    fn strided_adjoint_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = Tensor3::from_vec(3, 2, 5, (0..30).map(|_| c(rng.gen(), rng.gen())).collect()).unwrap();
        let b = random_matrix(3, 4, &mut rng);
        for s in 0..2 {
            let dense = t.physical_slice(s);
            let mut out = vec![c(0.0, 0.0); 5 * 4];
            gemm_into(&mut out, t.slice(s).adjoint(), b.view());
            let expected = naive_product(&dense.adjoint(), &b);
            let got = ComplexMatrix::from_vec(5, 4, out).unwrap();
            assert!(got.distance(&expected) < 1e-13);
        }
    }

    #[test]
    fn matmul_shape_mismatch_is_contract_violation() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &b), Err(Error::Contract(_))));
    }

    #[test]
    fn qr_of_identity() {
        let (q, r) = qr_decompose(&ComplexMatrix::identity(2)).unwrap();
        for i in 0..2 {
            assert!((q[(i, i)].norm() - 1.0).abs() < 1e-14);
            assert!((r[(i, i)].norm() - 1.0).abs() < 1e-14);
        }
        assert!(matmul(&q, &r).unwrap().distance(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn qr_of_rank_one_has_zero_row() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        let (_, r) = qr_decompose(&m).unwrap();
        let row_norm = |i: usize| (0..2).map(|j| r[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        assert!(row_norm(0).min(row_norm(1)) < 1e-12);
    }

    #[test]
    fn qr_reconstructs_tall_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(6, 4, &mut rng);
        let (q, r) = qr_decompose(&m).unwrap();
        assert_eq!((q.rows(), q.cols()), (6, 4));
        assert!(matmul(&q, &r).unwrap().distance(&m) < 1e-12);
        assert!(q.column_orthonormality_residual() < 1e-12);
    }

    #[test]
    fn qr_reconstructs_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_matrix(256, 256, &mut rng);
        let (q, r) = qr_decompose(&m).unwrap();
        assert!(matmul(&q, &r).unwrap().distance(&m) / m.frobenius_norm() < 1e-12);
        assert!(q.column_orthonormality_residual() < 1e-12);
    }

    #[test]
    fn svd_rank_one_keeps_one_value() {
        let u = [c(1.0, 0.0), c(0.5, -0.5), c(0.0, 2.0)];
        let v = [c(0.3, 0.1), c(-1.0, 0.0)];
        let m = ComplexMatrix::from_fn(3, 2, |i, j| u[i] * v[j].conj());
        let svd = svd_truncate(&m, 8, DEFAULT_CUTOFF).unwrap();
        assert_eq!(svd.rank(), 1);
        assert!(svd.discarded_weight < 1e-20);
    }

    #[test]
    fn svd_identity_truncated_to_half() {
        let svd = svd_truncate(&ComplexMatrix::identity(4), 2, 0.0).unwrap();
        assert_eq!(svd.rank(), 2);
        assert!((svd.discarded_weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn svd_full_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(8, 8, &mut rng);
        let svd = svd_truncate(&m, 8, 0.0).unwrap();
        assert_eq!(svd.rank(), 8);
        assert!(svd.reconstruct().distance(&m) < 1e-12);
        assert!(svd.u.column_orthonormality_residual() < 1e-12);
        assert!(svd.vt.row_orthonormality_residual() < 1e-12);
        assert_eq!(svd.discarded_weight, 0.0);
    }

    #[test]
    fn svd_rejects_empty_and_bad_args() {
        assert!(matches!(svd_truncate(&ComplexMatrix::zeros(0, 3), 2, 0.0), Err(Error::Contract(_))));
        assert!(matches!(svd_truncate(&ComplexMatrix::identity(2), 0, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn svd_of_nearly_rank_one_complex_block() {
        // a block on which the implicit-shift iteration returns s_1 ≈ 1.22
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                c(0.497502082639013, 0.0499167083234141),
                c(0.49750208263901313, 0.04991670832341412),
                c(0.49750208263901274, 0.049916708323414084),
                c(0.4975020826390132, 0.04991670832341413),
            ],
        )
        .unwrap();
        let svd = svd_truncate(&m, 2, 0.0).unwrap();
        assert_eq!(svd.rank(), 1);
        assert!((svd.singular_values[0] - m.frobenius_norm()).abs() < 1e-14);
        assert!(svd.reconstruct().distance(&m) < 1e-14);
    }

    #[test]
    fn jacobi_matches_reference_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (rows, cols) in [(1, 1), (5, 3), (3, 5), (9, 9)] {
            let m = random_matrix(rows, cols, &mut rng);
            let full = if rows >= cols {
                jacobi_svd(&m).unwrap()
            } else {
                let t = jacobi_svd(&m.adjoint()).unwrap();
                FullSvd { u: t.vt.adjoint(), s: t.s, vt: t.u.adjoint() }
            };
            assert!(full.residual(&m) < 1e-12);
            assert!(full.u.column_orthonormality_residual() < 1e-12);
            assert!(full.vt.row_orthonormality_residual() < 1e-12);
            let mut mine = full.s.clone();
            mine.sort_by(|a, b| b.total_cmp(a));
            let reference = m.to_nalgebra().singular_values();
            let mut reference: Vec<f64> = reference.iter().copied().collect();
            reference.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in mine.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_handles_zero_and_rank_deficient() {
        let z = jacobi_svd(&ComplexMatrix::zeros(3, 2)).unwrap();
        assert!(z.s.iter().all(|&s| s == 0.0));
        let u = [c(1.0, 1.0), c(0.0, -1.0), c(2.0, 0.5)];
        let m = ComplexMatrix::from_fn(3, 3, |i, j| u[i] * u[j].conj());
        let full = jacobi_svd(&m).unwrap();
        let big = full.s.iter().filter(|&&s| s > 1e-12).count();
        assert_eq!(big, 1);
        assert!(full.residual(&m) < 1e-12);
    }

    #[test]
    fn tensor_reshapes_are_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = Tensor3::from_vec(3, 2, 4, (0..24).map(|_| c(rng.gen(), rng.gen())).collect()).unwrap();
        let back = Tensor3::from_left_fused(t.to_left_fused(), 2).unwrap();
        assert_eq!(back, t);
        let back = Tensor3::from_right_fused(t.to_right_fused(), 2).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_left_fused()[(2 * 2 + 1, 3)], t.get(2, 1, 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn svd_values_descending_and_reconstruct(rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let svd = svd_truncate(&m, rows.max(cols), 0.0).unwrap();
            prop_assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(svd.singular_values.iter().all(|&s| s >= 0.0));
            prop_assert!(svd.reconstruct().distance(&m) < 1e-12 * (1.0 + m.frobenius_norm()));
            prop_assert_eq!(svd.discarded_weight, 0.0);
        }

        #[test]
        fn qr_reconstructs(rows in 1usize..16, cols in 1usize..16, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let (q, r) = qr_decompose(&m).unwrap();
            prop_assert!(matmul(&q, &r).unwrap().distance(&m) <= 1e-12 * m.frobenius_norm().max(1.0));
            prop_assert!(q.column_orthonormality_residual() < 1e-12);
        }
    }
}
