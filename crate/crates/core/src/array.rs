//! Dense row-major complex arrays with per-axis fiber maps.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::par;

/// Row-major complex array of arbitrary rank.
#[derive(Debug, Clone, PartialEq)]
pub struct NdArray {
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl NdArray {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self { shape: shape.to_vec(), data: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<C64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::DimensionMismatch { expected: len, got: data.len() });
        }
        Ok(Self { shape: shape.to_vec(), data })
    }

    /// Builds an array by evaluating `f` at every multi-index.
    pub fn from_fn(shape: &[usize], f: impl Fn(&[usize]) -> C64 + Sync + Send) -> Self {
        let len: usize = shape.iter().product();
        let data = par::map_indexed(len, |flat| {
            let idx = unravel(shape, flat);
            f(&idx)
        });
        Self { shape: shape.to_vec(), data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
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

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        ravel(&self.shape, idx)
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[ravel(&self.shape, idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: C64) {
        let k = ravel(&self.shape, idx);
        self.data[k] = v;
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::GridMismatch);
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { shape: self.shape.clone(), data })
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.shape, other.shape);
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Replaces every fiber along `axis` by `f(fiber)` of length `out_len`.
    /// `f` receives the input fiber, the output fiber and a reusable scratch buffer.
    pub fn map_axis<F>(&self, axis: usize, out_len: usize, f: F) -> Self
    where
        F: Fn(&[C64], &mut [C64], &mut Vec<C64>) + Sync + Send,
    {
        let n = self.shape[axis];
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut shape = self.shape.clone();
        shape[axis] = out_len;
        let mut out = Self::zeros(&shape);
        if outer * inner == 0 {
            return out;
        }
        let block = 64usize.min(outer * inner);
        let fibers = outer * inner;
        let chunks = fibers.div_ceil(block);
        let results = par::map_indexed(chunks, |c| {
            let mut scratch = Vec::new();
            let mut fin = vec![C64::new(0.0, 0.0); n];
            let lo = c * block;
            let hi = (lo + block).min(fibers);
            let mut res = vec![C64::new(0.0, 0.0); (hi - lo) * out_len];
            for (slot, fib) in (lo..hi).enumerate() {
                let (o, r) = (fib / inner, fib % inner);
                let base = o * n * inner + r;
                for (i, v) in fin.iter_mut().enumerate() {
                    *v = self.data[base + i * inner];
                }
                f(&fin, &mut res[slot * out_len..(slot + 1) * out_len], &mut scratch);
            }
            res
        });
        for (c, res) in results.into_iter().enumerate() {
            let lo = c * block;
            for (slot, chunk) in res.chunks(out_len.max(1)).enumerate() {
                let fib = lo + slot;
                let (o, r) = (fib / inner, fib % inner);
                let base = o * out_len * inner + r;
                for (i, v) in chunk.iter().enumerate() {
                    out.data[base + i * inner] = *v;
                }
            }
        }
        out
    }

    /// Applies a real `rows × n` matrix (row-major) to every fiber along `axis`,
    /// multiplying the result by `weight`.
    pub fn contract_axis(&self, axis: usize, matrix: &[f64], rows: usize, weight: f64) -> Self {
        let n = self.shape[axis];
        debug_assert_eq!(matrix.len(), rows * n);
        self.map_axis(axis, rows, |fin, fout, _| {
            for (r, o) in fout.iter_mut().enumerate() {
                let row = &matrix[r * n..(r + 1) * n];
                let mut acc = C64::new(0.0, 0.0);
                for (a, b) in row.iter().zip(fin) {
                    acc += b * *a;
                }
                *o = acc * weight;
            }
        })
    }

    /// Applies the transpose of a real `n_out × rows` matrix along `axis`,
    /// i.e. `out_j = Σ_r matrix[r][j]·in_r`.
    pub fn contract_axis_transposed(&self, axis: usize, matrix: &[f64], cols: usize) -> Self {
        let rows = self.shape[axis];
        debug_assert_eq!(matrix.len(), rows * cols);
        self.map_axis(axis, cols, |fin, fout, _| {
            for o in fout.iter_mut() {
                *o = C64::new(0.0, 0.0);
            }
            for (r, v) in fin.iter().enumerate() {
                if *v == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &matrix[r * cols..(r + 1) * cols];
                for (o, a) in fout.iter_mut().zip(row) {
                    *o += v * *a;
                }
            }
        })
    }

    /// Axis permutation: output axis `k` is input axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.ndim());
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let in_strides = strides(&self.shape);
        let data = par::map_indexed(self.len(), |flat| {
            let idx = unravel(&shape, flat);
            let src: usize = idx.iter().zip(perm).map(|(&i, &p)| i * in_strides[p]).sum();
            self.data[src]
        });
        Self { shape, data }
    }

    /// Reflects every listed axis by `i ↦ (n − i) mod n`.
    pub fn reflect_axes(&self, axes: &[usize]) -> Self {
        let shape = self.shape.clone();
        let data = par::map_indexed(self.len(), |flat| {
            let mut idx = unravel(&shape, flat);
            for &a in axes {
                let n = shape[a];
                idx[a] = (n - idx[a]) % n;
            }
            self.data[ravel(&shape, &idx)]
        });
        Self { shape, data }
    }

    pub fn reshape(self, shape: &[usize]) -> Result<Self> {
        Self::from_vec(shape, self.data)
    }
}

pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

pub fn unravel(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
    idx
}

pub fn ravel(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> NdArray {
        NdArray::from_fn(&[2, 3, 4], |i| C64::new((i[0] * 100 + i[1] * 10 + i[2]) as f64, 0.0))
    }

    #[test]
    fn ravel_unravel_roundtrip() {
        let shape = [3, 5, 2];
        for k in 0..30 {
            assert_eq!(ravel(&shape, &unravel(&shape, k)), k);
        }
    }

    #[test]
    fn map_axis_sees_fibers_in_order() {
        let a = sample();
        let b = a.map_axis(1, 1, |fin, fout, _| fout[0] = fin.iter().sum());
        assert_eq!(b.shape(), &[2, 1, 4]);
        assert_eq!(b.get(&[1, 0, 2]).re, 3.0 * 102.0 + 30.0);
    }

    #[test]
    fn permute_moves_axes() {
        let a = sample();
        let b = a.permute(&[2, 0, 1]);
        assert_eq!(b.shape(), &[4, 2, 3]);
        assert_eq!(b.get(&[3, 1, 2]), a.get(&[1, 2, 3]));
    }

    #[test]
    fn reflect_maps_index_to_negative() {
        let a = sample();
        let b = a.reflect_axes(&[2]);
        assert_eq!(b.get(&[0, 0, 1]), a.get(&[0, 0, 3]));
        assert_eq!(b.get(&[0, 0, 0]), a.get(&[0, 0, 0]));
    }

    #[test]
    fn contraction_pair_is_transpose() {
        let a = sample();
        let m = [1.0, 2.0, 0.5, -1.0, 0.0, 3.0];
        let c = a.contract_axis(1, &m, 2, 1.0);
        assert_eq!(c.shape(), &[2, 2, 4]);
        let e = c.get(&[1, 1, 3]);
        let want = -1.0 * a.get(&[1, 0, 3]).re + 3.0 * a.get(&[1, 2, 3]).re;
        assert_eq!(e.re, want);
        let back = c.contract_axis_transposed(1, &m, 3);
        let w = 2.0 * c.get(&[0, 0, 0]).re + 0.0 * c.get(&[0, 1, 0]).re;
        assert_eq!(back.get(&[0, 1, 0]).re, w);
    }
}
