//! Singular spectra, Schatten norms, parity conjugation and Werner's
//! operator convolution `T₁⋆T₂(w) = tr[ρ(−w)T₁ρ(w)PT₂P]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::array::NdArray;
use crate::error::{arg, Error, Result};
use crate::fft::cis_turns;
use crate::grid::{Geometry, PhaseFunction, PhaseGrid, Sampled};
use crate::linalg::{hermitian_eigenvalues, svd, CMatrix};
use crate::par;
use crate::weyl::{check_shift, rho_apply_weighted, OperatorMatrix, RhoCache};

/// Non-negative singular values in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(arg("singular values must be finite and non-negative"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(arg("singular values must be sorted non-increasing"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest singular value (operator norm).
    pub fn s0(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `ℓ^p` norm of the spectrum; `p = ∞` gives `s₀`.
    pub fn schatten(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let s0 = self.s0();
        if p.is_infinite() || s0 == 0.0 {
            return Ok(s0);
        }
        let sum: f64 = self.values.iter().map(|s| (s / s0).powf(p)).sum();
        Ok(s0 * sum.powf(1.0 / p))
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(arg(format!("Schatten exponent must be >= 1, got {p}")));
    }
    Ok(())
}

/// One Schatten norm together with the spectrum it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct SchattenReport {
    pub p: f64,
    pub norm: f64,
    pub spectrum: SingularSpectrum,
}

pub fn matrix_spectrum(m: &CMatrix) -> Result<SingularSpectrum> {
    if !m.is_finite() {
        return Err(arg("matrix has non-finite entries"));
    }
    SingularSpectrum::new(svd(m).s)
}

pub fn singular_values(t: &OperatorMatrix) -> Result<SingularSpectrum> {
    matrix_spectrum(t.entries())
}

pub fn schatten_norm(t: &OperatorMatrix, p: f64) -> Result<SchattenReport> {
    check_exponent(p)?;
    let spectrum = singular_values(t)?;
    let norm = spectrum.schatten(p)?;
    Ok(SchattenReport { p, norm, spectrum })
}

/// `PTP` with the exact Hermite parity `P = diag((−1)^{|k̲|})`.
pub fn parity_conjugate(t: &OperatorMatrix) -> OperatorMatrix {
    let b = t.basis();
    let signs: Vec<f64> = (0..b.dim()).map(|k| b.parity(k)).collect();
    let e = t.entries();
    let m = CMatrix::from_fn(e.rows(), e.cols(), |j, k| e[(j, k)] * (signs[j] * signs[k]));
    OperatorMatrix::new(b.clone(), m).expect("same shape")
}

/// `ρ(−w)Tρ(w)` with both factors taken from the cache.
pub fn conjugate_by_rho(t: &OperatorMatrix, w: &[f64], cache: &RhoCache) -> Result<OperatorMatrix> {
    if t.basis() != cache.basis() {
        return Err(Error::GridMismatch);
    }
    let neg: Vec<f64> = w.iter().map(|v| -v).collect();
    let left = cache.get(&neg)?;
    let right = cache.get(w)?;
    let m = left.matmul(t.entries())?.matmul(&right)?;
    OperatorMatrix::new(t.basis().clone(), m)
}

/// Positive semidefiniteness with threshold `λ_min ≥ −1e−10·s₀`.
pub fn is_positive(t: &OperatorMatrix) -> bool {
    let e = t.entries();
    let s0 = e.frobenius_norm().max(f64::MIN_POSITIVE);
    if e.hermitian_defect() > 1e-10 * s0 {
        return false;
    }
    let ev = hermitian_eigenvalues(e);
    let top = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ev.first().map_or(true, |&l| l >= -1e-10 * top)
}

/// Samples of `T₁⋆T₂` plus the positivity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct WernerOutput {
    pub values: PhaseFunction,
    /// Both inputs positive semidefinite, so the output must be real and non-negative.
    pub positive_inputs: bool,
    pub max_imaginary: f64,
    pub min_real: f64,
}

impl WernerOutput {
    /// For positive inputs: imaginary residue and negativity both within `tol`.
    pub fn positivity_consistent(&self, tol: f64) -> bool {
        !self.positive_inputs || (self.max_imaginary <= tol && self.min_real >= -tol)
    }
}

/// Low-rank factors `(s_l, u_l, v_l)` of `T` with `s_l > 1e−15·s₀`.
fn factors(t: &CMatrix) -> Vec<(f64, Vec<C64>, Vec<C64>)> {
    let f = svd(t);
    let rank = f.rank(1e-15);
    (0..rank).map(|l| (f.s[l], f.u.column(l), f.v.column(l))).collect()
}

/// `T₁⋆T₂(w)` at arbitrary points.
pub fn werner_points(t1: &OperatorMatrix, t2: &OperatorMatrix, points: &[Vec<f64>]) -> Result<Vec<C64>> {
    if t1.basis() != t2.basis() {
        return Err(Error::GridMismatch);
    }
    let basis = t1.basis();
    let y = parity_conjugate(t2);
    let fac = factors(t1.entries());
    let vals = par::map_indexed(points.len(), |k| -> Result<C64> {
        let neg: Vec<f64> = points[k].iter().map(|v| -v).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (s, u, v) in &fac {
            let rel = s / fac[0].0;
            let ru = rho_apply_weighted(&neg, basis, u, rel)?;
            let rv = rho_apply_weighted(&neg, basis, v, rel)?;
            let yu = y.entries().matvec(&ru)?;
            let dot: C64 = rv.iter().zip(&yu).map(|(a, b)| a.conj() * b).sum();
            acc += dot * *s;
        }
        Ok(acc)
    });
    vals.into_iter().collect()
}

/// `T₁⋆T₂` on every point of `eval`.
pub fn werner_convolve(t1: &OperatorMatrix, t2: &OperatorMatrix, eval: &PhaseGrid) -> Result<WernerOutput> {
    if eval.d != t1.basis().d() {
        return Err(Error::DimensionMismatch { expected: t1.basis().d(), got: eval.d });
    }
    let vals = match werner_lattice(t1, t2, eval)? {
        Some(v) => v,
        None => {
            let points: Vec<Vec<f64>> = (0..eval.len()).map(|k| eval.point(k)).collect();
            werner_points(t1, t2, &points)?
        }
    };
    let max_imaginary = vals.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    let min_real = vals.iter().fold(f64::INFINITY, |a, v| a.min(v.re));
    let positive_inputs = is_positive(t1) && is_positive(t2);
    let values = Sampled::new(*eval, NdArray::from_vec(&eval.shape(), vals)?)?;
    Ok(WernerOutput { values, positive_inputs, max_imaginary, min_real })
}

/// Kernel `K(t_i, t_l) = Σ T_jk h_j(t_i)h_k(t_l)` on the configuration lattice.
fn grid_kernel(t: &OperatorMatrix) -> CMatrix {
    let basis = t.basis();
    let (m, n) = (basis.m(), basis.grid().n);
    let e = t.entries();
    let mut half = CMatrix::zeros(m, n);
    for j in 0..m {
        for k in 0..m {
            let c = e[(j, k)];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (l, hk) in basis.row(k).iter().enumerate() {
                half[(j, l)] += c * *hk;
            }
        }
    }
    CMatrix::from_fn(n, n, |i, l| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            acc += half[(j, l)] * basis.row(j)[i];
        }
        acc
    })
}

/// `T₁⋆T₂` for `d = 1` when every `x` of `eval` is a configuration lattice
/// shift: `ρ(−w)T₁ρ(w)` has kernel `K₁(t+x, s+x)e^{−2πiξ(t−s)}`, so each row
/// of the output is a short Fourier sum over the diagonal offsets `t − s`.
fn werner_lattice(t1: &OperatorMatrix, t2: &OperatorMatrix, eval: &PhaseGrid) -> Result<Option<Vec<C64>>> {
    let basis = t1.basis();
    if basis.d() != 1 || t2.basis() != basis {
        return Ok(None);
    }
    let grid = basis.grid();
    let (m, n, h) = (basis.m(), grid.n, grid.step());
    let xs = eval.axis();
    let mut shifts = Vec::with_capacity(xs.len);
    for i in 0..xs.len {
        let q = xs.point(i) / h;
        if (q - q.round()).abs() > 1e-9 {
            return Ok(None);
        }
        shifts.push(q.round() as i64);
    }
    let e = t1.entries();
    let top = e.max_abs();
    let mut weights = vec![0.0f64; m];
    if top > 0.0 {
        for j in 0..m {
            for k in 0..m {
                let r = e[(j, k)].norm() / top;
                weights[j] = weights[j].max(r);
                weights[k] = weights[k].max(r);
            }
        }
    }
    for i in 0..xs.len {
        for j in 0..xs.len {
            check_shift(basis, -xs.point(i), -xs.point(j), &weights)?;
        }
    }
    let k1 = grid_kernel(t1);
    let ky = grid_kernel(&parity_conjugate(t2));
    let ni = n as i64;
    let rows = par::map_indexed(xs.len, |a| {
        let sh = shifts[a];
        let mut diag = vec![C64::new(0.0, 0.0); 2 * n - 1];
        for i in 0..ni {
            if i + sh < 0 || i + sh >= ni {
                continue;
            }
            for l in 0..ni {
                if l + sh < 0 || l + sh >= ni {
                    continue;
                }
                diag[(i - l + ni - 1) as usize] += k1[((i + sh) as usize, (l + sh) as usize)] * ky[(l as usize, i as usize)];
            }
        }
        (0..xs.len)
            .map(|b| {
                let xi = xs.point(b);
                let mut acc = C64::new(0.0, 0.0);
                for (u, v) in diag.iter().enumerate() {
                    if *v != C64::new(0.0, 0.0) {
                        acc += v * cis_turns(-xi * (u as f64 - (ni - 1) as f64) * h);
                    }
                }
                acc * (h * h)
            })
            .collect::<Vec<C64>>()
    });
    Ok(Some(rows.into_iter().flatten().collect()))
}

/// Default Werner evaluation lattice: 64 points per axis on the central
/// half `[−L/2, L/2)` of the phase grid (a sub-lattice when `N ≥ 128`).
pub fn default_werner_grid(phase: &PhaseGrid) -> PhaseGrid {
    PhaseGrid { d: phase.d, l: 0.5 * phase.l, n: (phase.n / 2).min(64) }
}

/// Both sides of `‖T₁⋆T₂‖_{L^r} ≤ ‖T₁‖_{S^p}‖T₂‖_{S^q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `1 − lhs/rhs` (zero when both sides vanish).
    pub slack: f64,
    pub satisfied: bool,
}

fn reciprocal(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

pub fn young_check(t1: &OperatorMatrix, t2: &OperatorMatrix, p: f64, q: f64, r: f64, eval: &PhaseGrid) -> Result<YoungReport> {
    for e in [p, q, r] {
        check_exponent(e)?;
    }
    let gap = reciprocal(p) + reciprocal(q) - 1.0 - reciprocal(r);
    if gap.abs() > 1e-12 {
        return Err(arg(format!("exponents violate 1/p + 1/q = 1 + 1/r (defect {gap:e})")));
    }
    let conv = werner_convolve(t1, t2, eval)?;
    let lhs = conv.values.lp_norm(r)?;
    let rhs = singular_values(t1)?.schatten(p)? * singular_values(t2)?.schatten(q)?;
    Ok(young_from_sides(p, q, r, lhs, rhs))
}

pub(crate) fn young_from_sides(p: f64, q: f64, r: f64, lhs: f64, rhs: f64) -> YoungReport {
    let slack = if rhs > 0.0 {
        1.0 - lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::NEG_INFINITY
    };
    YoungReport { p, q, r, lhs, rhs, slack, satisfied: lhs <= rhs * (1.0 + 1e-6) }
}

/// Both sides of `‖ATB‖_{S^p} ≤ ‖A‖‖T‖_{S^p}‖B‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealReport {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

pub fn ideal_bound_check(a: &OperatorMatrix, t: &OperatorMatrix, b: &OperatorMatrix, p: f64) -> Result<IdealReport> {
    check_exponent(p)?;
    let prod = a.compose(t)?.compose(b)?;
    let lhs = singular_values(&prod)?.schatten(p)?;
    let rhs = singular_values(a)?.s0() * singular_values(t)?.schatten(p)? * singular_values(b)?.s0();
    Ok(IdealReport { p, lhs, rhs, satisfied: lhs <= rhs * (1.0 + 1e-8) })
}
