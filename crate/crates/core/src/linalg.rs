//! Dense complex matrices, a one-sided Jacobi SVD and a Jacobi
//! eigenvalue solver for Hermitian matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// `f gᴴ`.
    pub fn outer(f: &[C64], g: &[C64]) -> Self {
        Self::from_fn(f.len(), g.len(), |i, j| f[i] * g[j].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: C64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        let oc = other.cols;
        for i in 0..self.rows {
            let orow = &mut out.data[i * oc..(i + 1) * oc];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * oc..(k + 1) * oc];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `selfᴴ v`.
    pub fn adjoint_matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![ZERO; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `max |A_{ij} − conj(A_{ji})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)])
    }

    /// Leading `rows × cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(i, j)])
    }

    /// `tr(selfᴴ other) = Σ conj(self_{ij})·other_{ij}`.
    pub fn frobenius_inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Thin singular value decomposition `A = U·diag(s)·Vᴴ` with `s` non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values above `rel·s₀`.
    pub fn rank(&self, rel: f64) -> usize {
        let s0 = self.s.first().copied().unwrap_or(0.0);
        self.s.iter().take_while(|&&x| x > rel * s0).count()
    }
}

const JACOBI_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Deterministic sweep order.
pub fn svd(a: &CMatrix) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows, a.cols);
    // columns stored contiguously
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut norms: Vec<f64> = w.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let pc = phase.conj();
                let (lo, hi) = w.split_at_mut(q);
                for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let yq = *xq * pc;
                    let np = *xp * c - yq * s;
                    *xq = *xp * s + yq * c;
                    *xp = np;
                }
                let (lo, hi) = v.split_at_mut(q);
                for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let yq = *xq * pc;
                    let np = *xp * c - yq * s;
                    *xq = *xp * s + yq * c;
                    *xp = np;
                }
                norms[p] = w[p].iter().map(|x| x.norm_sqr()).sum();
                norms[q] = w[q].iter().map(|x| x.norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let sv: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(core::cmp::Ordering::Equal).then(i.cmp(&j)));
    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        s.push(sv[j]);
        if sv[j] > 0.0 {
            for i in 0..m {
                u[(i, k)] = w[j][i] / sv[j];
            }
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd(a).s
}

/// Eigenvalues (ascending) of a Hermitian matrix, via cyclic Jacobi on the
/// real symmetric embedding `[[Re, −Im], [Im, Re]]`; each eigenvalue of the
/// embedding appears twice and one copy of each pair is returned.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows;
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let h = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            s[i * m + j] = h.re;
            s[(i + n) * m + j + n] = h.re;
            s[(i + n) * m + j] = h.im;
            s[i * m + j + n] = -h.im;
        }
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 =
            (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| s[i * m + j] * s[i * m + j]).sum();
        let diag: f64 = (0..m).map(|i| s[i * m + i] * s[i * m + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q * m + q] - s[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| s[i * m + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let data = (0..rows * cols).map(|_| C64::new(next(), next())).collect();
        CMatrix::from_vec(rows, cols, data).unwrap()
    }

    fn reconstruct(s: &Svd) -> CMatrix {
        let k = s.s.len();
        let mut us = s.u.clone();
        for i in 0..us.rows() {
            for j in 0..k {
                us[(i, j)] *= s.s[j];
            }
        }
        us.matmul(&s.v.adjoint()).unwrap()
    }

    #[test]
    fn svd_reconstructs_and_is_orthonormal() {
        for (r, c) in [(12, 12), (20, 7), (5, 11)] {
            let a = pseudo_random(r, c, (r * 31 + c) as u64);
            let s = svd(&a);
            assert!(reconstruct(&s).max_abs_diff(&a) < 1e-12);
            let k = s.s.len();
            let utu = s.u.adjoint().matmul(&s.u).unwrap();
            assert!(utu.max_abs_diff(&CMatrix::identity(k)) < 1e-12);
            assert!(s.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let d = CMatrix::diagonal(&[C64::new(3.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
        let s = singular_values(&d);
        assert_eq!(s.len(), 3);
        for (a, b) in s.iter().zip([3.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_trace_and_psd() {
        let b = pseudo_random(9, 9, 4);
        let h = b.matmul(&b.adjoint()).unwrap();
        let ev = hermitian_eigenvalues(&h);
        assert!(ev.iter().all(|&e| e > -1e-12));
        let tr: f64 = ev.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-10);
        let sv = singular_values(&h);
        for (a, b) in ev.iter().rev().zip(&sv) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn kron_of_identities() {
        let k = CMatrix::identity(2).kron(&CMatrix::identity(3));
        assert_eq!(k, CMatrix::identity(6));
    }
}
