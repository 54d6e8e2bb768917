//! Truncated orthonormal Hermite system on a configuration lattice,
//! coefficient analysis/synthesis and rapid-decay bookkeeping.
//!
//! A basis carries a dilation `s`: `h_k^s(x) = s^{−1/2} h_k(x/s)`. With
//! `s = 1` these are the eigenfunctions of `−d²/dx² + x²`; in general they
//! are eigenfunctions of `−s²d²/dx² + x²/s²` with the same eigenvalues
//! `2k + 1`. [`SYMPLECTIC_SCALE`] makes the phase-space footprint of the
//! truncated system a disc, which is what operator experiments want.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::array::{ravel, unravel, NdArray};
use crate::error::{arg, Error, Result};
use crate::grid::{ConfigGrid, Geometry, KernelFunction, Sampled, WaveFunction};
use crate::par;

/// `(2π)^{−1/2}`: dilation under which `h_k^s` has equal spread in `x` and `ξ`.
pub const SYMPLECTIC_SCALE: f64 = 0.398_942_280_401_432_7;

/// Largest Gram-matrix deviation accepted when a basis is built.
pub const GRAM_THRESHOLD: f64 = 1e-8;

/// Boundary magnitude above which a sampled Hermite function counts as leaking.
pub const LEAKAGE_THRESHOLD: f64 = 1e-10;

/// Values `h_0^s(x), …, h_{m−1}^s(x)` by the normalized three-term recurrence.
pub fn hermite_values(m: usize, x: f64, scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; m];
    fill_hermite_values(&mut out, x, scale);
    out
}

pub(crate) fn fill_hermite_values(out: &mut [f64], x: f64, scale: f64) {
    let m = out.len();
    if m == 0 {
        return;
    }
    let u = x / scale;
    let norm = scale.powf(-0.5);
    let h0 = PI.powf(-0.25) * (-0.5 * u * u).exp();
    out[0] = h0;
    if m > 1 {
        out[1] = 2f64.sqrt() * u * h0;
    }
    for k in 1..m.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * u * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
    for v in out.iter_mut() {
        *v *= norm;
    }
}

/// Samples of the normalized `h_k` on a one-dimensional grid.
pub fn hermite_samples(k: usize, grid: &ConfigGrid) -> Result<Vec<f64>> {
    let v: Vec<f64> = (0..grid.n).map(|i| hermite_values(k + 1, grid.coord(i), 1.0)[k]).collect();
    let edge = v[0].abs().max(v[grid.n - 1].abs());
    if edge > LEAKAGE_THRESHOLD {
        return Err(Error::Leakage { what: format!("h_{k} at the boundary of [-{}, {})", grid.l, grid.l), measured: edge });
    }
    Ok(v)
}

/// Truncated Hermite system `{h_k̲ : k̲ ∈ {0..M−1}^d}` sampled on a grid.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    grid: ConfigGrid,
    m: usize,
    scale: f64,
    samples: Arc<Vec<f64>>,
}

impl PartialEq for HermiteBasis {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.m == other.m && self.scale == other.scale
    }
}

impl HermiteBasis {
    /// Unit-dilation basis.
    pub fn new(grid: ConfigGrid, m: usize) -> Result<Self> {
        Self::with_scale(grid, m, 1.0)
    }

    pub fn with_scale(grid: ConfigGrid, m: usize, scale: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config { field: "M", reason: "must be a positive integer".into() });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config { field: "hermite_scale", reason: format!("must be positive, got {scale}") });
        }
        let n = grid.n;
        let cols = par::map_indexed(n, |i| hermite_values(m, grid.coord(i), scale));
        let mut samples = vec![0.0; m * n];
        for (i, col) in cols.iter().enumerate() {
            for k in 0..m {
                samples[k * n + i] = col[k];
            }
        }
        let edge = cols[0].iter().chain(&cols[n - 1]).fold(0.0f64, |a, v| a.max(v.abs()));
        if edge > LEAKAGE_THRESHOLD {
            return Err(Error::Leakage {
                what: format!("Hermite functions up to order {} at the boundary of [-{}, {})", m - 1, grid.l, grid.l),
                measured: edge,
            });
        }
        let basis = Self { grid, m, scale, samples: Arc::new(samples) };
        let gram = basis.gram_deviation();
        if gram > GRAM_THRESHOLD {
            return Err(Error::Leakage {
                what: format!("Hermite functions up to order {} are under-resolved at step {}", m - 1, grid.step()),
                measured: gram,
            });
        }
        Ok(basis)
    }

    pub fn grid(&self) -> &ConfigGrid {
        &self.grid
    }

    /// Per-axis cutoff `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.grid.d
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Classical turning radius `s·√(2M+1)` of the highest retained function.
    pub fn spatial_radius(&self) -> f64 {
        self.scale * ((2 * self.m + 1) as f64).sqrt()
    }

    /// Frequency-side counterpart `√(2M+1)/(2πs)` of [`Self::spatial_radius`].
    pub fn frequency_radius(&self) -> f64 {
        ((2 * self.m + 1) as f64).sqrt() / (2.0 * PI * self.scale)
    }

    /// Number of basis functions `M^d`.
    pub fn dim(&self) -> usize {
        self.m.pow(self.grid.d as u32)
    }

    /// Row-major `M × N_x` matrix of per-axis samples.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.samples[k * self.grid.n..(k + 1) * self.grid.n]
    }

    /// Lexicographic multi-index of a flat basis position.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        unravel(&vec![self.m; self.grid.d], flat)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        ravel(&vec![self.m; self.grid.d], idx)
    }

    /// `(−1)^{|k̲|}`, the eigenvalue of the parity operator on `h_k̲`.
    pub fn parity(&self, flat: usize) -> f64 {
        if self.multi_index(flat).iter().sum::<usize>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `n + 2|k̲|`, the eigenvalue of the Hermite operator on `h_k̲`.
    pub fn eigenvalue(&self, flat: usize) -> f64 {
        (self.grid.d + 2 * self.multi_index(flat).iter().sum::<usize>()) as f64
    }

    /// `max_{jk} |G_{jk} − δ_{jk}|` for the per-axis quadrature Gram matrix.
    pub fn gram_deviation(&self) -> f64 {
        let h = self.grid.step();
        let rows = par::map_indexed(self.m, |j| {
            let mut worst = 0.0f64;
            for k in 0..=j {
                let g: f64 = self.row(j).iter().zip(self.row(k)).map(|(a, b)| a * b).sum::<f64>() * h;
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
            worst
        });
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Samples of `h_k̲` on the full configuration lattice.
    pub fn function(&self, flat: usize) -> WaveFunction {
        let mut c = CoefficientArray::zeros(self);
        c.values[flat] = C64::new(1.0, 0.0);
        self.synthesize(&c)
    }

    /// `f̆(k̲) = (f, h_k̲)` by Riemann-sum quadrature.
    pub fn analyze(&self, f: &WaveFunction) -> Result<CoefficientArray> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let h = self.grid.step();
        let mut v = f.values().clone();
        for axis in 0..self.grid.d {
            v = v.contract_axis(axis, &self.samples, self.m, h);
        }
        Ok(CoefficientArray { d: self.grid.d, m: self.m, values: v.into_vec() })
    }

    /// Coefficients `(K, h_j̲ ⊗ h_k̲)` of a kernel, as an `M^d × M^d` row-major block.
    pub fn analyze_kernel(&self, k: &KernelFunction) -> Result<Vec<C64>> {
        if k.grid().config != self.grid {
            return Err(Error::GridMismatch);
        }
        let h = self.grid.step();
        let mut v = k.values().clone();
        for axis in 0..2 * self.grid.d {
            v = v.contract_axis(axis, &self.samples, self.m, h);
        }
        Ok(v.into_vec())
    }

    /// `Σ_k̲ c(k̲)h_k̲` sampled on the grid.
    pub fn synthesize(&self, c: &CoefficientArray) -> WaveFunction {
        assert_eq!((c.d, c.m), (self.grid.d, self.m), "coefficient array belongs to another basis");
        let mut v = NdArray::from_vec(&vec![self.m; self.grid.d], c.values.clone()).expect("shape");
        for axis in 0..self.grid.d {
            v = v.contract_axis_transposed(axis, &self.samples, self.grid.n);
        }
        Sampled::new(self.grid, v).expect("finite synthesis")
    }

    /// `H_s f = Σ_axes (−s²∂² + x²/s²) f` with spectral derivatives.
    pub fn apply_hermite_operator(&self, f: &WaveFunction) -> WaveFunction {
        let d = self.grid.d;
        let s2 = self.scale * self.scale;
        let mut acc = f.modulate(|x| C64::new(x.iter().map(|v| v * v).sum::<f64>() / s2, 0.0));
        for axis in 0..d {
            let mut orders = vec![0u32; d];
            orders[axis] = 2;
            let dd = f.derivative(&orders).scale(C64::new(-s2, 0.0));
            acc = acc.add(&dd).expect("same grid");
        }
        acc
    }

    /// `‖H_s h_k̲ − (n+2|k̲|)h_k̲‖₂ / (n+2|k̲|)`.
    pub fn eigen_residual(&self, flat: usize) -> f64 {
        let f = self.function(flat);
        let lam = self.eigenvalue(flat);
        let hf = self.apply_hermite_operator(&f);
        hf.sub(&f.scale(C64::new(lam, 0.0))).expect("same grid").l2_norm() / lam
    }

    /// `‖H_s^N φ‖₂`, the norm entering the exact decay bound.
    pub fn hermite_power_norm(&self, f: &WaveFunction, power: u32) -> f64 {
        let mut g = f.clone();
        for _ in 0..power {
            g = self.apply_hermite_operator(&g);
        }
        g.l2_norm()
    }

    /// Decay check with `‖H_s^N φ‖₂` computed here for every requested order.
    pub fn decay_report(&self, f: &WaveFunction, orders: &[u32]) -> Result<DecayReport> {
        let c = self.analyze(f)?;
        let norms: BTreeMap<u32, f64> = orders.iter().map(|&n| (n, self.hermite_power_norm(f, n))).collect();
        verify_decay(&c, orders, &norms)
    }
}

/// Hermite coefficients indexed lexicographically over `{0..M−1}^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientArray {
    pub d: usize,
    pub m: usize,
    pub values: Vec<C64>,
}

impl CoefficientArray {
    pub fn zeros(basis: &HermiteBasis) -> Self {
        Self { d: basis.d(), m: basis.m(), values: vec![C64::new(0.0, 0.0); basis.dim()] }
    }

    pub fn new(d: usize, m: usize, values: Vec<C64>) -> Result<Self> {
        let want = m.pow(d as u32);
        if values.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: values.len() });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("coefficient array"));
        }
        Ok(Self { d, m, values })
    }

    /// `Σ|c(k̲)|²`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `|k̲|` of every entry, in storage order.
    pub fn degrees(&self) -> Vec<usize> {
        let shape = vec![self.m; self.d];
        (0..self.values.len()).map(|f| unravel(&shape, f).iter().sum()).collect()
    }
}

/// One row of a [`DecayReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecayEntry {
    pub order: u32,
    pub seminorm: f64,
    /// `sup_k̲ |c(k̲)|(n+2|k̲|)^N / seminorm`.
    pub empirical_constant: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub entries: Vec<DecayEntry>,
}

impl DecayReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }
}

/// Checks `|c(k̲)| ≤ (n+2|k̲|)^{−N}·seminorm_N` for each requested `N`.
pub fn verify_decay(c: &CoefficientArray, orders: &[u32], seminorms: &BTreeMap<u32, f64>) -> Result<DecayReport> {
    let degrees = c.degrees();
    let n = c.d as f64;
    let mut entries = Vec::with_capacity(orders.len());
    for &order in orders {
        let semi = *seminorms.get(&order).ok_or_else(|| arg(format!("no seminorm supplied for order {order}")))?;
        let sup = c.values.iter().zip(&degrees).map(|(v, &k)| v.norm() * (n + 2.0 * k as f64).powi(order as i32)).fold(0.0, f64::max);
        let empirical_constant = if semi > 0.0 {
            sup / semi
        } else if sup == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        entries.push(DecayEntry { order, seminorm: semi, empirical_constant, satisfied: empirical_constant <= 1.0 + 1e-9 });
    }
    Ok(DecayReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide() -> ConfigGrid {
        ConfigGrid::new(1, 16.0, 512).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let h = hermite_values(2, 0.0, 1.0);
        assert!((h[0] - PI.powf(-0.25)).abs() < 1e-15);
        let h = hermite_values(2, 1.0, 1.0);
        assert!((h[1] - 2f64.sqrt() * PI.powf(-0.25) * (-0.5f64).exp()).abs() < 1e-15);
        assert!((h[1] - 0.644_289).abs() < 1e-6);
    }

    #[test]
    fn unit_basis_needs_room() {
        let narrow = ConfigGrid::new(1, 8.0, 256).unwrap();
        assert!(matches!(HermiteBasis::new(narrow, 64), Err(Error::Leakage { .. })));
        assert!(hermite_samples(63, &narrow).is_err());
        assert!(hermite_samples(20, &narrow).is_err());
        assert!(hermite_samples(20, &wide()).is_ok());
        let b = HermiteBasis::new(wide(), 64).unwrap();
        assert!(b.gram_deviation() < 1e-8);
    }

    #[test]
    fn symplectic_basis_fits_desk_grid() {
        let g = ConfigGrid::new(1, 8.0, 256).unwrap();
        let b = HermiteBasis::with_scale(g, 64, SYMPLECTIC_SCALE).unwrap();
        assert!(b.gram_deviation() < 1e-8);
        for k in [0, 7, 20] {
            assert!(b.eigen_residual(k) < 1e-6, "k={k}");
        }
    }

    #[test]
    fn analysis_of_a_combination() {
        let b = HermiteBasis::new(wide(), 16).unwrap();
        let f = b.function(0).add(&b.function(3).scale(C64::new(2.0, 0.0))).unwrap();
        let c = b.analyze(&f).unwrap();
        for (k, v) in c.values.iter().enumerate() {
            let want = match k {
                0 => 1.0,
                3 => 2.0,
                _ => 0.0,
            };
            assert!((v - C64::new(want, 0.0)).norm() < 1e-10);
        }
        let back = b.synthesize(&c);
        assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn parity_is_sample_exact() {
        let b = HermiteBasis::new(wide(), 12).unwrap();
        for k in 0..12 {
            let f = b.function(k);
            let r = f.reflect();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let n = b.grid().n;
            for i in 1..n {
                assert_eq!(r.get(&[i]), f.get(&[i]) * sign);
            }
        }
    }

    #[test]
    fn decay_of_ground_state() {
        let b = HermiteBasis::new(wide(), 32).unwrap();
        let rep = b.decay_report(&b.function(0), &[0, 1, 2, 3]).unwrap();
        assert!(rep.all_satisfied());
        for e in &rep.entries {
            assert!((e.empirical_constant - 1.0).abs() < 1e-6);
        }
    }
}
