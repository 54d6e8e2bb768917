//! Uniform phase-space and configuration-space lattices, sampled functions
//! on them, quadrature norms, FFT-based transforms and seminorms.
//!
//! Every axis carries the points `−L + i·h`, `h = 2L/N`, `i < N`. Fourier
//! transforms use the kernel `e^{−2πi⟨·,·⟩}`, Riemann-sum weights `h` per
//! axis, and land on the same lattice; output frequencies outside the
//! principal band `[−1/(2h), 1/(2h))` are aliases and are set to zero.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::array::{unravel, NdArray};
use crate::error::{arg, Error, Result};
use crate::fft::{shift_samples, spectral_derivative, Fft, Lattice1, UniformDft};

/// Shape and spacing of a cubic lattice `[−L, L)^dims` with `N` points per axis.
pub trait Geometry: Copy + PartialEq + Debug + Send + Sync {
    fn dims(&self) -> usize;
    fn half_width(&self) -> f64;
    fn samples(&self) -> usize;

    fn step(&self) -> f64 {
        2.0 * self.half_width() / self.samples() as f64
    }

    fn axis(&self) -> Lattice1 {
        Lattice1::new(-self.half_width(), self.step(), self.samples())
    }

    fn coord(&self, i: usize) -> f64 {
        -self.half_width() + i as f64 * self.step()
    }

    fn shape(&self) -> Vec<usize> {
        vec![self.samples(); self.dims()]
    }

    fn len(&self) -> usize {
        self.samples().pow(self.dims() as u32)
    }

    /// Quadrature weight `h^dims` of one lattice cell.
    fn cell(&self) -> f64 {
        self.step().powi(self.dims() as i32)
    }

    /// Coordinates of the lattice point with the given flat (row-major) index.
    fn point(&self, flat: usize) -> Vec<f64> {
        unravel(&self.shape(), flat).into_iter().map(|i| self.coord(i)).collect()
    }

    /// Largest frequency magnitude the lattice resolves, `1/(2h)`.
    fn band(&self) -> f64 {
        0.5 / self.step()
    }
}

fn validate_axis(d: usize, l: f64, n: usize, names: (&'static str, &'static str, &'static str)) -> Result<()> {
    if d == 0 {
        return Err(Error::Config { field: names.0, reason: "must be a positive integer".into() });
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Config { field: names.1, reason: format!("must be positive and finite, got {l}") });
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Config { field: names.2, reason: format!("must be a power of two >= 2, got {n}") });
    }
    Ok(())
}

/// Lattice on phase space `ℝ^{2d}`; axes `0..d` are positions, `d..2d` momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub d: usize,
    pub l: f64,
    pub n: usize,
}

impl PhaseGrid {
    pub fn new(d: usize, l: f64, n: usize) -> Result<Self> {
        validate_axis(d, l, n, ("d", "L", "N"))?;
        Ok(Self { d, l, n })
    }
}

impl Geometry for PhaseGrid {
    fn dims(&self) -> usize {
        2 * self.d
    }
    fn half_width(&self) -> f64 {
        self.l
    }
    fn samples(&self) -> usize {
        self.n
    }
}

/// Lattice on configuration space `ℝ^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigGrid {
    pub d: usize,
    pub l: f64,
    pub n: usize,
}

impl ConfigGrid {
    pub fn new(d: usize, l: f64, n: usize) -> Result<Self> {
        validate_axis(d, l, n, ("d", "L_x", "N_x"))?;
        Ok(Self { d, l, n })
    }
}

impl Geometry for ConfigGrid {
    fn dims(&self) -> usize {
        self.d
    }
    fn half_width(&self) -> f64 {
        self.l
    }
    fn samples(&self) -> usize {
        self.n
    }
}

/// Product lattice carrying integral kernels `K(t, x)`; axes `0..d` are `t`,
/// axes `d..2d` are `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGrid {
    pub config: ConfigGrid,
}

impl Geometry for KernelGrid {
    fn dims(&self) -> usize {
        2 * self.config.d
    }
    fn half_width(&self) -> f64 {
        self.config.l
    }
    fn samples(&self) -> usize {
        self.config.n
    }
}

/// Complex samples of a function on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<G> {
    grid: G,
    values: NdArray,
}

pub type PhaseFunction = Sampled<PhaseGrid>;
pub type WaveFunction = Sampled<ConfigGrid>;
pub type KernelFunction = Sampled<KernelGrid>;

impl<G: Geometry> Sampled<G> {
    pub fn new(grid: G, values: NdArray) -> Result<Self> {
        if values.shape() != grid.shape().as_slice() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if !values.all_finite() {
            return Err(Error::NonFinite("sampled function"));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: G, values: NdArray) -> Self {
        debug_assert_eq!(values.shape(), grid.shape().as_slice());
        Self { grid, values }
    }

    pub fn zeros(grid: G) -> Self {
        Self { grid, values: NdArray::zeros(&grid.shape()) }
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn(grid: G, f: impl Fn(&[f64]) -> C64 + Sync + Send) -> Self {
        let values = NdArray::from_fn(&grid.shape(), |idx| {
            let z: Vec<f64> = idx.iter().map(|&i| grid.coord(i)).collect();
            f(&z)
        });
        Self { grid, values }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &NdArray {
        &self.values
    }

    pub fn into_values(self) -> NdArray {
        self.values
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.values.get(idx)
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_parts(self.grid, self.values.zip_map(&other.values, |a, b| a + b)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_parts(self.grid, self.values.zip_map(&other.values, |a, b| a - b)?))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_parts(self.grid, self.values.zip_map(&other.values, |a, b| a * b)?))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_parts(self.grid, self.values.scale(s))
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.grid, self.values.map(|v| v.conj()))
    }

    /// Multiplies every sample by `f(z)`.
    pub fn modulate(&self, f: impl Fn(&[f64]) -> C64 + Sync + Send) -> Self {
        let m = Self::from_fn(self.grid, f);
        Self::from_parts(self.grid, self.values.zip_map(&m.values, |a, b| a * b).expect("same grid"))
    }

    /// `Σ f·conj(g)·h^dims`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_grid(other)?;
        let s: C64 = self.values.as_slice().iter().zip(other.values.as_slice()).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.max_abs()
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.as_slice().iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.cell()).sqrt()
    }

    /// Riemann-sum `L^p` norm; `p = ∞` gives the sample maximum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(arg(format!("L^p exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        if p == 2.0 {
            return Ok(self.l2_norm());
        }
        let s: f64 = self.values.as_slice().iter().map(|v| v.norm().powf(p)).sum();
        Ok((s * self.grid.cell()).powf(1.0 / p))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.values.max_abs_diff(&other.values))
    }

    /// `f(−z)`, exact on the lattice via `i ↦ N − i (mod N)`.
    pub fn reflect(&self) -> Self {
        let axes: Vec<usize> = (0..self.grid.dims()).collect();
        self.reflect_axes(&axes)
    }

    pub fn reflect_axes(&self, axes: &[usize]) -> Self {
        Self::from_parts(self.grid, self.values.reflect_axes(axes))
    }

    /// Fraction of the `L²` mass carried by the outer boundary layer
    /// (`max(1, N/32)` samples at each end of every axis).
    pub fn tail_fraction(&self) -> f64 {
        let n = self.grid.samples();
        let w = (n / 32).max(1);
        let shape = self.grid.shape();
        let (mut tail, mut total) = (0.0, 0.0);
        for (flat, v) in self.values.as_slice().iter().enumerate() {
            let e = v.norm_sqr();
            total += e;
            if unravel(&shape, flat).iter().any(|&i| i < w || i >= n - w) {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            (tail / total).sqrt()
        }
    }

    /// Band-limited translation `f ↦ f(· − w)`.
    pub fn translate(&self, w: &[f64]) -> Result<Self> {
        let dims = self.grid.dims();
        if w.len() != dims {
            return Err(Error::DimensionMismatch { expected: dims, got: w.len() });
        }
        let l = self.grid.half_width();
        if let Some(&bad) = w.iter().find(|v| !v.is_finite() || v.abs() > l) {
            return Err(Error::SupportOverflow(format!("shift {bad} exceeds the half-width {l}")));
        }
        let fft = Fft::new(self.grid.samples());
        let h = self.grid.step();
        let mut values = self.values.clone();
        for (axis, &s) in w.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            values = values.map_axis(axis, self.grid.samples(), |fin, fout, _| {
                fout.copy_from_slice(fin);
                shift_samples(&fft, fout, s, h);
            });
        }
        Ok(Self::from_parts(self.grid, values))
    }

    /// Spectral partial derivative `∂^orders`.
    pub fn derivative(&self, orders: &[u32]) -> Self {
        let fft = Fft::new(self.grid.samples());
        let h = self.grid.step();
        let mut values = self.values.clone();
        for (axis, &k) in orders.iter().enumerate() {
            if k == 0 {
                continue;
            }
            values = values.map_axis(axis, self.grid.samples(), |fin, fout, _| {
                fout.copy_from_slice(fin);
                spectral_derivative(&fft, fout, k, h);
            });
        }
        Self::from_parts(self.grid, values)
    }

    /// Multiplies by the monomial `z^powers`.
    pub fn monomial(&self, powers: &[u32]) -> Self {
        if powers.iter().all(|&p| p == 0) {
            return self.clone();
        }
        let p = powers.to_vec();
        self.modulate(move |z| {
            let m: f64 = z.iter().zip(&p).map(|(x, &k)| x.powi(k as i32)).product();
            C64::new(m, 0.0)
        })
    }

    fn check_tail(&self) -> Result<()> {
        let t = self.tail_fraction();
        if t > 1e-6 {
            return Err(Error::Accuracy { what: "boundary tail of a seminorm argument".into(), measured: t });
        }
        Ok(())
    }

    /// `Σ_{|α|+|β|≤order} ‖∂^α(z^β f)‖₂` with spectral derivatives.
    pub fn schwartz_seminorm(&self, order: u32) -> Result<f64> {
        self.check_tail()?;
        let dims = self.grid.dims();
        let mut total = 0.0;
        for beta in multi_indices(dims, order) {
            let weighted = self.monomial(&beta);
            let rest = order - beta.iter().sum::<u32>();
            for alpha in multi_indices(dims, rest) {
                total += weighted.derivative(&alpha).l2_norm();
            }
        }
        Ok(total)
    }

    /// `Σ_{|α|≤order} ‖∂^α f‖_∞` with spectral derivatives.
    pub fn c_seminorm(&self, order: u32) -> Result<f64> {
        self.check_tail()?;
        let dims = self.grid.dims();
        Ok(multi_indices(dims, order).iter().map(|alpha| self.derivative(alpha).sup_norm()).sum())
    }

    /// Resamples onto another lattice of the same rank by band-limited
    /// interpolation; points outside the source box evaluate to zero.
    pub fn resample(&self, target: G) -> Result<Self> {
        if target.dims() != self.grid.dims() {
            return Err(Error::DimensionMismatch { expected: self.grid.dims(), got: target.dims() });
        }
        let r = crate::fft::Resampler::new(self.grid.axis(), target.axis());
        let mut values = self.values.clone();
        for axis in 0..self.grid.dims() {
            values = values.map_axis(axis, target.samples(), |fin, fout, s| r.apply(fin, fout, s));
        }
        Ok(Self::from_parts(target, values))
    }
}

impl Sampled<ConfigGrid> {
    /// Embeds the samples in a lattice of twice the half-width and the same
    /// spacing, zero outside the original box.
    pub fn zero_padded(&self) -> Self {
        let g = self.grid;
        let big = ConfigGrid { d: g.d, l: 2.0 * g.l, n: 2 * g.n };
        let off = g.n / 2;
        let values = NdArray::from_fn(&big.shape(), |idx| {
            if idx.iter().all(|&i| i >= off && i < off + g.n) {
                let inner: Vec<usize> = idx.iter().map(|&i| i - off).collect();
                self.values.get(&inner)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::from_parts(big, values)
    }
}

/// All multi-indices in `dims` variables with total degree at most `max`,
/// in graded lexicographic order.
pub fn multi_indices(dims: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dims];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            rec(pos + 1, left - k, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, max, &mut cur, &mut out);
    out.sort_by_key(|m| m.iter().sum::<u32>());
    out
}

/// `σ((x,ξ),(x′,ξ′)) = x′·ξ − x·ξ′`.
pub fn symplectic_form(z: &[f64], zp: &[f64]) -> Result<f64> {
    if z.len() != zp.len() || z.len() % 2 != 0 || z.is_empty() {
        return Err(arg(format!(
            "symplectic form needs two points with the same even number of coordinates, got {} and {}",
            z.len(),
            zp.len()
        )));
    }
    let d = z.len() / 2;
    let (x, xi) = z.split_at(d);
    let (xp, xip) = zp.split_at(d);
    Ok((0..d).map(|k| xp[k] * xi[k] - x[k] * xip[k]).sum())
}

fn dft_axes(values: &NdArray, grid: &impl Geometry, axes: core::ops::Range<usize>, sign: f64) -> NdArray {
    let ax = grid.axis();
    let plan = UniformDft::new(ax, ax, sign, Some(grid.band()));
    let n = grid.samples();
    let mut out = values.clone();
    for a in axes {
        out = out.map_axis(a, n, |fin, fout, s| plan.apply(fin, fout, s));
    }
    out
}

/// Symplectic Fourier transform `F_σF(w) = ∫F(z)e^{−2πiσ(w,z)}dz` on the same grid.
pub fn symplectic_fourier(f: &PhaseFunction) -> PhaseFunction {
    let g = *f.grid();
    let d = g.d;
    let mut v = dft_axes(f.values(), &g, 0..d, -1.0);
    v = dft_axes(&v, &g, d..2 * d, 1.0);
    let w = g.cell();
    let perm: Vec<usize> = (d..2 * d).chain(0..d).collect();
    let v = v.permute(&perm).map(|c| c * w);
    Sampled::from_parts(g, v)
}

/// Partial Fourier transform over the momentum axes, `ξ ↦ τ` with `e^{−2πiτξ}`.
pub fn partial_fourier_xi(f: &PhaseFunction) -> PhaseFunction {
    partial_fourier_xi_signed(f, -1.0)
}

/// Inverse of [`partial_fourier_xi`] (kernel `e^{+2πiτξ}`).
pub fn inverse_partial_fourier_xi(f: &PhaseFunction) -> PhaseFunction {
    partial_fourier_xi_signed(f, 1.0)
}

fn partial_fourier_xi_signed(f: &PhaseFunction, sign: f64) -> PhaseFunction {
    let g = *f.grid();
    let w = g.step().powi(g.d as i32);
    let v = dft_axes(f.values(), &g, g.d..2 * g.d, sign).map(|c| c * w);
    Sampled::from_parts(g, v)
}

/// Partial Fourier transform over the position axes, `x ↦ ν` with `e^{−2πiνx}`.
pub fn partial_fourier_x(f: &PhaseFunction) -> PhaseFunction {
    let g = *f.grid();
    let w = g.step().powi(g.d as i32);
    let v = dft_axes(f.values(), &g, 0..g.d, -1.0).map(|c| c * w);
    Sampled::from_parts(g, v)
}

/// Euclidean convolution `(f∗g)(z) = ∫f(z′)g(z−z′)dz′` by zero-padded FFTs.
pub fn euclid_convolve<G: Geometry>(f: &Sampled<G>, g: &Sampled<G>) -> Result<Sampled<G>> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *f.grid();
    let n = grid.samples();
    let big = Fft::new(2 * n);
    let pad = |a: &NdArray| {
        let mut v = a.clone();
        for axis in 0..grid.dims() {
            v = v.map_axis(axis, 2 * n, |fin, fout, _| {
                fout[..n].copy_from_slice(fin);
                for o in fout[n..].iter_mut() {
                    *o = C64::new(0.0, 0.0);
                }
                big.forward(fout);
            });
        }
        v
    };
    let prod = pad(f.values()).zip_map(&pad(g.values()), |a, b| a * b)?;
    let mut v = prod;
    let inv = 1.0 / (2 * n) as f64;
    for axis in 0..grid.dims() {
        v = v.map_axis(axis, n, |fin, fout, s| {
            s.clear();
            s.extend_from_slice(fin);
            big.inverse(s);
            for (k, o) in fout.iter_mut().enumerate() {
                *o = s[k + n / 2] * inv;
            }
        });
    }
    let w = grid.cell();
    Ok(Sampled::from_parts(grid, v.map(|c| c * w)))
}

/// Band-limited translation `f ↦ f(· − w)`.
pub fn translate<G: Geometry>(f: &Sampled<G>, w: &[f64]) -> Result<Sampled<G>> {
    f.translate(w)
}

pub fn lp_norm<G: Geometry>(f: &Sampled<G>, p: f64) -> Result<f64> {
    f.lp_norm(p)
}

pub fn schwartz_seminorm<G: Geometry>(f: &Sampled<G>, order: u32) -> Result<f64> {
    f.schwartz_seminorm(order)
}

pub fn c_seminorm<G: Geometry>(f: &Sampled<G>, order: u32) -> Result<f64> {
    f.c_seminorm(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn gauss(z: &[f64]) -> C64 {
        C64::new((-PI * z.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    }

    fn desk() -> PhaseGrid {
        PhaseGrid::new(1, 8.0, 256).unwrap()
    }

    #[test]
    fn grid_validation_names_the_field() {
        match PhaseGrid::new(1, 8.0, 100) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "N"),
            other => panic!("{other:?}"),
        }
        assert!(ConfigGrid::new(0, 8.0, 64).is_err());
        let g = desk();
        assert_eq!(g.step() * g.n as f64, 2.0 * g.l);
        assert_eq!(g.coord(0), -8.0);
    }

    #[test]
    fn symplectic_form_values() {
        assert_eq!(symplectic_form(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), -1.0);
        assert_eq!(symplectic_form(&[0.3, -2.0], &[0.3, -2.0]).unwrap(), 0.0);
        assert!(symplectic_form(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn gaussian_is_fixed_by_symplectic_fourier() {
        let f = PhaseFunction::from_fn(desk(), gauss);
        let g = symplectic_fourier(&f);
        assert!(g.max_abs_diff(&f).unwrap() < 1e-8);
    }

    #[test]
    fn partial_fourier_of_gaussian() {
        let f = PhaseFunction::from_fn(desk(), gauss);
        let g = partial_fourier_xi(&f);
        assert!(g.max_abs_diff(&f).unwrap() < 1e-8);
        let back = inverse_partial_fourier_xi(&g);
        assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }

    #[test]
    fn gaussian_self_convolution() {
        let f = PhaseFunction::from_fn(desk(), gauss);
        let c = euclid_convolve(&f, &f).unwrap();
        let want = PhaseFunction::from_fn(desk(), |z| gauss(z).powf(0.5) * 0.5);
        assert!(c.max_abs_diff(&want).unwrap() < 1e-10);
    }

    #[test]
    fn lp_norms_of_gaussian() {
        let f = PhaseFunction::from_fn(desk(), gauss);
        assert!((f.lp_norm(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-8);
        assert!((f.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 1.0);
        assert!(f.lp_norm(0.5).is_err());
        let one = PhaseFunction::from_fn(desk(), |_| C64::new(1.0, 0.0));
        assert!((one.lp_norm(1.0).unwrap() - 256.0).abs() < 1e-9);
    }

    #[test]
    fn translation_by_one_step_is_a_shift() {
        let g = PhaseGrid::new(1, 4.0, 64).unwrap();
        let f = PhaseFunction::from_fn(g, gauss);
        let t = f.translate(&[g.step(), 0.0]).unwrap();
        for i in 1..64 {
            for j in 0..64 {
                assert!((t.get(&[i, j]) - f.get(&[i - 1, j])).norm() < 1e-13);
            }
        }
        assert!(f.translate(&[5.0, 0.0]).is_err());
    }

    #[test]
    fn seminorms_of_gaussian() {
        let f = PhaseFunction::from_fn(desk(), gauss);
        assert!((f.schwartz_seminorm(0).unwrap() - f.l2_norm()).abs() < 1e-14);
        assert!((f.c_seminorm(0).unwrap() - 1.0).abs() < 1e-14);
        let g = desk();
        let peak = (0..g.n)
            .map(|i| {
                let x = g.coord(i);
                2.0 * PI * x.abs() * (-PI * x * x).exp()
            })
            .fold(0.0, f64::max);
        let c1 = f.c_seminorm(1).unwrap();
        assert!((c1 - (1.0 + 2.0 * peak)).abs() < 1e-10, "{c1}");
    }

    #[test]
    fn multi_index_enumeration() {
        let m = multi_indices(2, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m[0], vec![0, 0]);
        assert!(m.iter().all(|k| k.iter().sum::<u32>() <= 2));
    }
}
