//! The projective Schrödinger representation `ρ`, integral kernels, Weyl
//! quantization into truncated Hermite matrices, twisted convolution and
//! the ambiguity / Fourier–Wigner transforms.
//!
//! Conventions: `ρ(x,ξ)g(t) = e^{−πix·ξ+2πit·ξ}g(t−x)`,
//! `k_F(t,x) = F^ξF(t−x, −(t+x)/2)`, `K_a(t,x) = F^ξa((x+t)/2, x−t)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use spin::RwLock;

use crate::array::{ravel, unravel, NdArray};
use crate::error::{Error, Result};
use crate::fft::{cis_turns, Lattice1, Resampler, UniformDft};
use crate::grid::{symplectic_form, ConfigGrid, Geometry, KernelFunction, KernelGrid, PhaseFunction, PhaseGrid, Sampled, WaveFunction};
use crate::hermite::{fill_hermite_values, CoefficientArray, HermiteBasis, LEAKAGE_THRESHOLD};
use crate::linalg::CMatrix;
use crate::par;

/// Operator on `L²(ℝ^d)` compressed to a truncated Hermite system:
/// entry `(j̲, k̲) = (T h_k̲, h_j̲)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: HermiteBasis,
    entries: CMatrix,
}

impl OperatorMatrix {
    pub fn new(basis: HermiteBasis, entries: CMatrix) -> Result<Self> {
        let n = basis.dim();
        if entries.rows() != n || entries.cols() != n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.rows() * entries.cols() });
        }
        if !entries.is_finite() {
            return Err(Error::NonFinite("operator matrix"));
        }
        Ok(Self { basis, entries })
    }

    pub fn zeros(basis: &HermiteBasis) -> Self {
        let n = basis.dim();
        Self { basis: basis.clone(), entries: CMatrix::zeros(n, n) }
    }

    pub fn identity(basis: &HermiteBasis) -> Self {
        Self { basis: basis.clone(), entries: CMatrix::identity(basis.dim()) }
    }

    /// `T_{f⊗ḡ} : h ↦ (h, g) f`.
    pub fn rank_one(basis: &HermiteBasis, f: &CoefficientArray, g: &CoefficientArray) -> Self {
        Self { basis: basis.clone(), entries: CMatrix::outer(&f.values, &g.values) }
    }

    /// Orthogonal projector onto `h_k̲` (flat index).
    pub fn projector(basis: &HermiteBasis, k: usize) -> Self {
        let mut e = CMatrix::zeros(basis.dim(), basis.dim());
        e[(k, k)] = C64::new(1.0, 0.0);
        Self { basis: basis.clone(), entries: e }
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self { basis: self.basis.clone(), entries: self.entries.adjoint() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self { basis: self.basis.clone(), entries: self.entries.matmul(&other.entries)? })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self { basis: self.basis.clone(), entries: self.entries.add(&other.entries)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self { basis: self.basis.clone(), entries: self.entries.sub(&other.entries)? })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { basis: self.basis.clone(), entries: self.entries.scale(s) }
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.frobenius_norm()
    }
}

fn split_point(z: &[f64], d: usize) -> Result<(&[f64], &[f64])> {
    if z.len() != 2 * d {
        return Err(Error::DimensionMismatch { expected: 2 * d, got: z.len() });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("phase-space point"));
    }
    Ok(z.split_at(d))
}

/// `[ρ(x,ξ)g](t) = e^{−πix·ξ+2πit·ξ}g(t−x)` with band-limited translation.
pub fn rho_point_apply(z: &[f64], g: &WaveFunction) -> Result<WaveFunction> {
    let (x, xi) = split_point(z, g.grid().d)?;
    let shifted = g.translate(x)?;
    let c: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
    let xi = xi.to_vec();
    Ok(shifted.modulate(move |t| {
        let s: f64 = t.iter().zip(&xi).map(|(a, b)| a * b).sum();
        cis_turns(s - 0.5 * c)
    }))
}

/// Rejects shifts that move the truncated system off the lattice or past its
/// band. Order `k` enters with weight `weights[k] ∈ [0, 1]`.
pub(crate) fn check_shift(basis: &HermiteBasis, x: f64, xi: f64, weights: &[f64]) -> Result<()> {
    let grid = basis.grid();
    let m = weights.len();
    let mut buf = vec![0.0; m];
    let mut edge = 0.0f64;
    for t in [grid.coord(0), grid.coord(grid.n - 1)] {
        fill_hermite_values(&mut buf, t - x, basis.scale());
        edge = buf.iter().zip(weights).fold(edge, |a, (v, w)| a.max(v.abs() * w));
    }
    if edge > LEAKAGE_THRESHOLD {
        return Err(Error::Leakage { what: format!("Hermite system shifted by x = {x}"), measured: edge });
    }
    let top = weights.iter().rposition(|w| *w > LEAKAGE_THRESHOLD).map_or(0, |k| k + 1);
    let reach = xi.abs() + ((2 * top + 1) as f64).sqrt() / (2.0 * PI * basis.scale());
    if reach > grid.band() {
        return Err(Error::Leakage {
            what: format!("Hermite system modulated by xi = {xi} exceeds the band {}", grid.band()),
            measured: reach,
        });
    }
    Ok(())
}

/// Shifted samples `h_k(t_i − x)` as an `M × N` row-major array.
fn shifted_samples(basis: &HermiteBasis, x: f64) -> Vec<f64> {
    let grid = basis.grid();
    let (m, n) = (basis.m(), grid.n);
    let mut out = vec![0.0; m * n];
    let mut buf = vec![0.0; m];
    for i in 0..n {
        fill_hermite_values(&mut buf, grid.coord(i) - x, basis.scale());
        for k in 0..m {
            out[k * n + i] = buf[k];
        }
    }
    out
}

fn chirp(basis: &HermiteBasis, x: f64, xi: f64) -> Vec<C64> {
    let grid = basis.grid();
    (0..grid.n).map(|i| cis_turns(grid.coord(i) * xi - 0.5 * x * xi)).collect()
}

/// One-axis `ρ(x,ξ)` matrix by quadrature of `(ρ h_k, h_j)`.
fn rho_matrix_axis(basis: &HermiteBasis, x: f64, xi: f64) -> CMatrix {
    let grid = basis.grid();
    let (m, n) = (basis.m(), grid.n);
    let h = grid.step();
    let shifted = shifted_samples(basis, x);
    let phase = chirp(basis, x, xi);
    let cols = par::map_indexed(m, |k| {
        let z: Vec<C64> = (0..n).map(|i| phase[i] * shifted[k * n + i]).collect();
        (0..m)
            .map(|j| {
                let row = basis.row(j);
                let mut acc = C64::new(0.0, 0.0);
                for (a, b) in row.iter().zip(&z) {
                    acc += b * *a;
                }
                acc * h
            })
            .collect::<Vec<C64>>()
    });
    CMatrix::from_fn(m, m, |j, k| cols[k][j])
}

/// Matrix of `ρ(z)` in the truncated Hermite basis.
pub fn rho_point_matrix(z: &[f64], basis: &HermiteBasis) -> Result<OperatorMatrix> {
    let d = basis.d();
    let (x, xi) = split_point(z, d)?;
    let ones = vec![1.0; basis.m()];
    for a in 0..d {
        check_shift(basis, x[a], xi[a], &ones)?;
    }
    let mut m = rho_matrix_axis(basis, x[0], xi[0]);
    for a in 1..d {
        m = m.kron(&rho_matrix_axis(basis, x[a], xi[a]));
    }
    Ok(OperatorMatrix { basis: basis.clone(), entries: m })
}

/// `ρ(z)` applied to a coefficient vector without forming the matrix.
pub fn rho_apply_coefficients(z: &[f64], basis: &HermiteBasis, c: &[C64]) -> Result<Vec<C64>> {
    rho_apply_weighted(z, basis, c, 1.0)
}

/// [`rho_apply_coefficients`] for a term that enters a sum with relative
/// weight `rel`, which scales the leakage it may contribute.
pub(crate) fn rho_apply_weighted(z: &[f64], basis: &HermiteBasis, c: &[C64], rel: f64) -> Result<Vec<C64>> {
    let d = basis.d();
    let (x, xi) = split_point(z, d)?;
    if c.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: c.len() });
    }
    let grid = basis.grid();
    let (m, n) = (basis.m(), grid.n);
    let h = grid.step();
    let mut v = NdArray::from_vec(&vec![m; d], c.to_vec())?;
    let mut weights = order_weights(c, m, d);
    for w in weights.iter_mut().flatten() {
        *w *= rel;
    }
    for a in 0..d {
        check_shift(basis, x[a], xi[a], &weights[a])?;
        let shifted = shifted_samples(basis, x[a]);
        let phase = chirp(basis, x[a], xi[a]);
        v = v.map_axis(a, m, |fin, fout, s| {
            s.clear();
            s.resize(n, C64::new(0.0, 0.0));
            for (k, ck) in fin.iter().enumerate() {
                if *ck == C64::new(0.0, 0.0) {
                    continue;
                }
                for (acc, y) in s.iter_mut().zip(&shifted[k * n..(k + 1) * n]) {
                    *acc += ck * *y;
                }
            }
            for (acc, p) in s.iter_mut().zip(&phase) {
                *acc *= p;
            }
            for (j, o) in fout.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (a, b) in basis.row(j).iter().zip(s.iter()) {
                    acc += b * *a;
                }
                *o = acc * h;
            }
        });
    }
    Ok(v.into_vec())
}

/// Per axis and order, the largest coefficient magnitude carried by that
/// order relative to the largest coefficient overall.
fn order_weights(c: &[C64], m: usize, d: usize) -> Vec<Vec<f64>> {
    let top = c.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let shape = vec![m; d];
    let mut w = vec![vec![0.0f64; m]; d];
    if top == 0.0 {
        return w;
    }
    for (flat, v) in c.iter().enumerate() {
        let r = v.norm() / top;
        for (a, k) in unravel(&shape, flat).into_iter().enumerate() {
            w[a][k] = w[a][k].max(r);
        }
    }
    w
}

/// Memo of `ρ(z)` matrices keyed by the exact bit pattern of `z`.
/// Safe for concurrent reads and inserts.
pub struct RhoCache {
    basis: HermiteBasis,
    map: RwLock<BTreeMap<Vec<u64>, Arc<CMatrix>>>,
}

impl RhoCache {
    pub fn new(basis: &HermiteBasis) -> Self {
        Self { basis: basis.clone(), map: RwLock::new(BTreeMap::new()) }
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn get(&self, z: &[f64]) -> Result<Arc<CMatrix>> {
        let key: Vec<u64> = z.iter().map(|v| v.to_bits()).collect();
        if let Some(m) = self.map.read().get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(rho_point_matrix(z, &self.basis)?.entries);
        self.map.write().entry(key).or_insert_with(|| m.clone());
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn build_kernel(
    f: &PhaseFunction,
    config: &ConfigGrid,
    u_target: Lattice1,
    tau_target: Lattice1,
    reindex: impl Fn(usize, usize) -> (usize, usize) + Sync + Send,
) -> Result<KernelFunction> {
    let g = *f.grid();
    let d = g.d;
    if config.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: config.d });
    }
    if config.l > g.l * (1.0 + 1e-12) {
        return Err(Error::SupportOverflow(format!("configuration half-width {} exceeds the phase-space half-width {}", config.l, g.l)));
    }
    let resampler = Resampler::new(g.axis(), u_target);
    let dft = UniformDft::new(g.axis(), tau_target, -1.0, Some(g.band()));
    let w = g.step();
    let mut v = f.values().clone();
    for a in 0..d {
        v = v.map_axis(a, u_target.len, |fin, fout, s| resampler.apply(fin, fout, s));
        v = v.map_axis(d + a, tau_target.len, |fin, fout, s| {
            dft.apply(fin, fout, s);
            for o in fout.iter_mut() {
                *o *= w;
            }
        });
    }
    let kg = KernelGrid { config: *config };
    let src_shape = v.shape().to_vec();
    let out_shape = kg.shape();
    let values = par::map_indexed(kg.len(), |flat| {
        let idx = unravel(&out_shape, flat);
        let mut src = vec![0usize; 2 * d];
        for a in 0..d {
            let (u, tau) = reindex(idx[a], idx[d + a]);
            src[a] = u;
            src[d + a] = tau;
        }
        v.as_slice()[ravel(&src_shape, &src)]
    });
    Sampled::new(kg, NdArray::from_vec(&out_shape, values)?)
}

/// `k_F(t,x) = ∫F(t−x,ξ)e^{πi(t+x)·ξ}dξ`, the kernel of `ρ(F)`.
pub fn kernel_from_phase_function(f: &PhaseFunction, config: &ConfigGrid) -> Result<KernelFunction> {
    let n = config.n;
    let h = config.step();
    let diff = Lattice1::new(-((n - 1) as f64) * h, h, 2 * n - 1);
    let mid = Lattice1::new(config.l, -0.5 * h, 2 * n - 1);
    build_kernel(f, config, diff, mid, move |i, m| (i + n - 1 - m, i + m))
}

/// `K_a(t,x) = F^ξa((x+t)/2, x−t)`, the kernel of the Weyl quantization `L_a`.
pub fn weyl_kernel(a: &PhaseFunction, config: &ConfigGrid) -> Result<KernelFunction> {
    let n = config.n;
    let h = config.step();
    let mid = Lattice1::new(-config.l, 0.5 * h, 2 * n - 1);
    let diff = Lattice1::new(-((n - 1) as f64) * h, h, 2 * n - 1);
    build_kernel(a, config, mid, diff, move |i, m| (i + m, m + n - 1 - i))
}

/// Entries `∫∫K(t,x)h_k̲(x)h_j̲(t)dxdt` by tensor quadrature.
pub fn operator_from_kernel(k: &KernelFunction, basis: &HermiteBasis) -> Result<OperatorMatrix> {
    let n = basis.dim();
    let entries = CMatrix::from_vec(n, n, basis.analyze_kernel(k)?)?;
    OperatorMatrix::new(basis.clone(), entries)
}

/// Weyl quantization `L_a = ρ(F_σa)`.
pub fn quantize(a: &PhaseFunction, basis: &HermiteBasis) -> Result<OperatorMatrix> {
    operator_from_kernel(&weyl_kernel(a, basis.grid())?, basis)
}

/// Integrated representation `ρ(F) = ∫F(z)ρ(z)dz`.
pub fn integrated_rep(f: &PhaseFunction, basis: &HermiteBasis) -> Result<OperatorMatrix> {
    operator_from_kernel(&kernel_from_phase_function(f, basis.grid())?, basis)
}

/// `tr ρ(F) = ∫k_F(t,t)dt` by quadrature of the kernel diagonal.
pub fn trace_of_rep(f: &PhaseFunction, config: &ConfigGrid) -> Result<C64> {
    let k = kernel_from_phase_function(f, config)?;
    let d = config.d;
    let n = config.n;
    let shape = k.grid().shape();
    let mut acc = C64::new(0.0, 0.0);
    for flat in 0..n.pow(d as u32) {
        let t = unravel(&vec![n; d], flat);
        let idx: Vec<usize> = t.iter().chain(t.iter()).copied().collect();
        acc += k.values().as_slice()[ravel(&shape, &idx)];
    }
    Ok(acc * config.cell())
}

fn support_box(f: &PhaseFunction, thr: f64) -> Option<Vec<(usize, usize)>> {
    let shape = f.grid().shape();
    let mut bx: Option<Vec<(usize, usize)>> = None;
    for (flat, v) in f.values().as_slice().iter().enumerate() {
        if v.norm() <= thr {
            continue;
        }
        let idx = unravel(&shape, flat);
        match &mut bx {
            None => bx = Some(idx.iter().map(|&i| (i, i)).collect()),
            Some(b) => {
                for (r, &i) in b.iter_mut().zip(&idx) {
                    r.0 = r.0.min(i);
                    r.1 = r.1.max(i);
                }
            }
        }
    }
    bx
}

/// Relative magnitude below which samples are skipped in twisted convolution.
const TWIST_PRUNE: f64 = 1e-16;

/// `F×G(z) = ∫F(z′)G(z−z′)e^{πiσ(z′,z)}dz′` by direct lattice quadrature.
/// Samples below `1e−16·max` are skipped; outputs outside the sum of the
/// two supports are zero.
pub fn twisted_convolve(f: &PhaseFunction, g: &PhaseFunction) -> Result<PhaseFunction> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *f.grid();
    let (d, n) = (grid.d, grid.n);
    let dims = 2 * d;
    let half = n / 2;
    let (fb, gb) = match (support_box(f, TWIST_PRUNE * f.sup_norm()), support_box(g, TWIST_PRUNE * g.sup_norm())) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(PhaseFunction::zeros(grid)),
    };
    let thr = TWIST_PRUNE * f.sup_norm();
    let shape = grid.shape();
    let atoms: Vec<(Vec<usize>, C64)> =
        f.values().as_slice().iter().enumerate().filter(|(_, v)| v.norm() > thr).map(|(flat, v)| (unravel(&shape, flat), *v)).collect();
    let table: Vec<C64> = (0..n * n)
        .map(|k| {
            let (a, b) = (k / n, k % n);
            cis_turns(0.5 * grid.coord(a) * grid.coord(b))
        })
        .collect();
    let out_box: Vec<(usize, usize)> = (0..dims)
        .map(|a| {
            let lo = (fb[a].0 + gb[a].0).saturating_sub(half);
            let hi = (fb[a].1 + gb[a].1).saturating_sub(half).min(n - 1);
            (lo, hi.max(lo))
        })
        .collect();
    let box_shape: Vec<usize> = out_box.iter().map(|(lo, hi)| hi - lo + 1).collect();
    let count: usize = box_shape.iter().product();
    let gv = g.values();
    let vals = par::map_indexed(count, |k| {
        let rel = unravel(&box_shape, k);
        let o: Vec<usize> = rel.iter().zip(&out_box).map(|(&r, b)| r + b.0).collect();
        let mut acc = C64::new(0.0, 0.0);
        let mut gi = vec![0usize; dims];
        'atoms: for (ip, fv) in &atoms {
            for a in 0..dims {
                let s = o[a] + half;
                if s < ip[a] {
                    continue 'atoms;
                }
                let idx = s - ip[a];
                if idx < gb[a].0 || idx > gb[a].1 {
                    continue 'atoms;
                }
                gi[a] = idx;
            }
            let gval = gv.as_slice()[ravel(&shape, &gi)];
            let mut ph = C64::new(1.0, 0.0);
            for a in 0..d {
                ph *= table[o[a] * n + ip[d + a]] * table[ip[a] * n + o[d + a]].conj();
            }
            acc += fv * gval * ph;
        }
        acc
    });
    let mut out = NdArray::zeros(&shape);
    let cell = grid.cell();
    for (k, v) in vals.into_iter().enumerate() {
        let rel = unravel(&box_shape, k);
        let o: Vec<usize> = rel.iter().zip(&out_box).map(|(&r, b)| r + b.0).collect();
        out.set(&o, v * cell);
    }
    Sampled::new(grid, out)
}

/// `F×δ_w(z) = F(z−w)e^{πiσ(z,w)}`.
pub fn twist_atom_right(f: &PhaseFunction, w: &[f64]) -> Result<PhaseFunction> {
    let shifted = f.translate(w)?;
    let w = w.to_vec();
    Ok(shifted.modulate(move |z| cis_turns(0.5 * symplectic_form(z, &w).unwrap_or(0.0))))
}

/// `δ_w×F(z) = F(z−w)e^{πiσ(w,z)}`.
pub fn twist_atom_left(w: &[f64], f: &PhaseFunction) -> Result<PhaseFunction> {
    let shifted = f.translate(w)?;
    let w = w.to_vec();
    Ok(shifted.modulate(move |z| cis_turns(0.5 * symplectic_form(&w, z).unwrap_or(0.0))))
}

/// `δ_{−w}×F×δ_w(z) = F(z)e^{2πiσ(z,w)}`.
pub fn conjugate_by_atoms(f: &PhaseFunction, w: &[f64]) -> Result<PhaseFunction> {
    if w.len() != 2 * f.grid().d {
        return Err(Error::DimensionMismatch { expected: 2 * f.grid().d, got: w.len() });
    }
    let w = w.to_vec();
    Ok(f.modulate(move |z| cis_turns(symplectic_form(z, &w).unwrap_or(0.0))))
}

/// `A(f,g)(x,ξ) = ∫f(t+x/2)conj(g(t−x/2))e^{−2πiξ·t}dt` sampled on `phase`.
pub fn cross_ambiguity(f: &WaveFunction, g: &WaveFunction, phase: &PhaseGrid) -> Result<PhaseFunction> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let cg = *f.grid();
    let d = cg.d;
    if phase.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: phase.d });
    }
    if phase.l > 2.0 * cg.l {
        return Err(Error::SupportOverflow(format!(
            "ambiguity grid half-width {} needs shifts beyond the configuration half-width {}",
            phase.l, cg.l
        )));
    }
    let fp = f.zero_padded();
    let gp = g.zero_padded().conj();
    let pg = *fp.grid();
    let dft = UniformDft::new(pg.axis(), phase.axis(), -1.0, Some(cg.band()));
    let np = phase.n;
    let block = np.pow(d as u32);
    let xshape = vec![np; d];
    let blocks = par::map_indexed(block, |xflat| -> Result<Vec<C64>> {
        let xi = unravel(&xshape, xflat);
        let x: Vec<f64> = xi.iter().map(|&i| phase.coord(i)).collect();
        let minus: Vec<f64> = x.iter().map(|v| -0.5 * v).collect();
        let plus: Vec<f64> = x.iter().map(|v| 0.5 * v).collect();
        let prod = fp.translate(&minus)?.mul(&gp.translate(&plus)?)?;
        let mut v = prod.into_values();
        for a in 0..d {
            v = v.map_axis(a, np, |fin, fout, s| dft.apply(fin, fout, s));
        }
        let w = pg.cell();
        Ok(v.into_vec().into_iter().map(|c| c * w).collect())
    });
    let mut data = Vec::with_capacity(block * block);
    for b in blocks {
        data.extend(b?);
    }
    Sampled::new(*phase, NdArray::from_vec(&phase.shape(), data)?)
}

/// `F_W T(z) = tr(ρ(z)*T) = Σ conj(ρ(z)_{j̲k̲})T_{j̲k̲}` at each point, through the cache.
pub fn fourier_wigner(t: &OperatorMatrix, cache: &RhoCache, points: &[Vec<f64>]) -> Result<Vec<C64>> {
    if *t.basis() != *cache.basis() {
        return Err(Error::GridMismatch);
    }
    let vals = par::map_indexed(points.len(), |k| -> Result<C64> {
        let r = cache.get(&points[k])?;
        Ok(r.frobenius_inner(t.entries()))
    });
    vals.into_iter().collect()
}

/// [`fourier_wigner`] on every point of a phase grid, using a low-rank
/// factorization of `T` and matrix-free application of `ρ(z)`.
pub fn fourier_wigner_grid(t: &OperatorMatrix, grid: &PhaseGrid) -> Result<PhaseFunction> {
    let basis = t.basis();
    if grid.d != basis.d() {
        return Err(Error::DimensionMismatch { expected: basis.d(), got: grid.d });
    }
    let svd = crate::linalg::svd(t.entries());
    let rank = svd.rank(1e-15);
    let factors: Vec<(f64, Vec<C64>, Vec<C64>)> = (0..rank).map(|l| (svd.s[l], svd.u.column(l), svd.v.column(l))).collect();
    let vals = par::map_indexed(grid.len(), |flat| -> Result<C64> {
        let z = grid.point(flat);
        let mut acc = C64::new(0.0, 0.0);
        for (s, u, v) in &factors {
            let rv = rho_apply_weighted(&z, basis, v, s / factors[0].0)?;
            let dot: C64 = rv.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
            acc += dot * *s;
        }
        Ok(acc)
    });
    let data: Result<Vec<C64>> = vals.into_iter().collect();
    Sampled::new(*grid, NdArray::from_vec(&grid.shape(), data?)?)
}

/// Phase factor `e^{iπσ(z,z′)}` in `ρ(z)ρ(z′) = e^{iπσ(z,z′)}ρ(z+z′)`.
pub fn cocycle(z: &[f64], zp: &[f64]) -> Result<C64> {
    Ok(cis_turns(0.5 * symplectic_form(z, zp)?))
}
