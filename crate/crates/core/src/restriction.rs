//! Compactly supported measures and density symbols, classical and quantum
//! extension/restriction operators, and the Schatten–Lebesgue equivalence
//! experiments built on them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Error, Result};
use crate::fft::cis_turns;
use crate::grid::{euclid_convolve, symplectic_fourier, Geometry, PhaseFunction, PhaseGrid};
use crate::hermite::HermiteBasis;
use crate::par;
use crate::schatten::singular_values;
use crate::weyl::{fourier_wigner, quantize, OperatorMatrix, RhoCache};

/// Point mass `w·δ_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub z: Vec<f64>,
    pub w: f64,
}

/// Finite non-negative atomic measure with a declared support ball.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactMeasure {
    atoms: Vec<Atom>,
    center: Vec<f64>,
    radius: f64,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl CompactMeasure {
    /// Validates the atoms; `radius` must be at least 1 and cover every atom.
    pub fn new(atoms: Vec<Atom>, center: Vec<f64>, radius: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(arg("a measure needs at least one atom"));
        }
        let dims = center.len();
        if dims == 0 || dims % 2 != 0 {
            return Err(arg("the center must be a point of an even-dimensional phase space"));
        }
        if !(radius.is_finite() && radius >= 1.0) {
            return Err(arg(format!("support radius must be finite and >= 1, got {radius}")));
        }
        for a in &atoms {
            if a.z.len() != dims {
                return Err(Error::DimensionMismatch { expected: dims, got: a.z.len() });
            }
            if !(a.w.is_finite() && a.w >= 0.0) {
                return Err(arg(format!("atom weights must be finite and non-negative, got {}", a.w)));
            }
            let r = dist(&a.z, &center);
            if r > radius * (1.0 + 1e-12) {
                return Err(Error::SupportOverflow(format!("atom at distance {r} outside the radius {radius}")));
            }
        }
        Ok(Self { atoms, center, radius })
    }

    /// Support radius computed from the atoms, clamped to at least 1.
    pub fn from_atoms(atoms: Vec<Atom>, center: Vec<f64>) -> Result<Self> {
        let r = atoms.iter().map(|a| dist(&a.z, &center)).fold(1.0, f64::max);
        Self::new(atoms, center, r)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn d(&self) -> usize {
        self.center.len() / 2
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(|a| a.z.clone()).collect()
    }

    /// Whether the atom set is invariant under `z ↦ −z` (weights included).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.atoms
            .iter()
            .all(|a| self.atoms.iter().any(|b| (b.w - a.w).abs() <= tol && a.z.iter().zip(&b.z).all(|(x, y)| (x + y).abs() <= tol)))
    }
}

/// Constructors for [`make_measure`].
#[derive(Debug, Clone)]
pub enum MeasureKind {
    /// Equal-weight arc-length atoms `2πr/n` on a circle in the first
    /// position–momentum plane.
    Circle {
        center: Vec<f64>,
        radius: f64,
        n_atoms: usize,
    },
    Atoms {
        atoms: Vec<Atom>,
        center: Vec<f64>,
    },
    /// Lattice atoms carrying `sample·h^{2d}`; samples must be real and non-negative.
    Density {
        density: PhaseFunction,
        center: Vec<f64>,
    },
}

pub fn make_measure(kind: MeasureKind) -> Result<CompactMeasure> {
    match kind {
        MeasureKind::Circle { center, radius, n_atoms } => {
            if n_atoms == 0 {
                return Err(arg("a circle needs at least one atom"));
            }
            if !(radius.is_finite() && radius > 0.0) {
                return Err(arg(format!("circle radius must be positive, got {radius}")));
            }
            let d = center.len() / 2;
            let w = 2.0 * PI * radius / n_atoms as f64;
            let atoms = (0..n_atoms)
                .map(|j| {
                    let (s, c) = (2.0 * PI * j as f64 / n_atoms as f64).sin_cos();
                    let mut z = center.clone();
                    z[0] += radius * c;
                    z[d] += radius * s;
                    Atom { z, w }
                })
                .collect();
            CompactMeasure::from_atoms(atoms, center)
        }
        MeasureKind::Atoms { atoms, center } => CompactMeasure::from_atoms(atoms, center),
        MeasureKind::Density { density, center } => {
            let grid = *density.grid();
            let cell = grid.cell();
            let top = density.sup_norm();
            let mut atoms = Vec::new();
            for (flat, v) in density.values().as_slice().iter().enumerate() {
                if v.re < -1e-12 * top || v.im.abs() > 1e-12 * top {
                    return Err(arg("density samples must be real and non-negative"));
                }
                if v.re > 0.0 {
                    atoms.push(Atom { z: grid.point(flat), w: v.re * cell });
                }
            }
            CompactMeasure::from_atoms(atoms, center)
        }
    }
}

/// Grid-sampled surrogate of a compactly supported distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySymbol {
    f: PhaseFunction,
    center: Vec<f64>,
    radius: f64,
}

impl DensitySymbol {
    /// Samples outside the declared ball must be at most `1e−12` of the maximum.
    pub fn new(f: PhaseFunction, center: Vec<f64>, radius: f64) -> Result<Self> {
        let grid = *f.grid();
        if center.len() != grid.dims() {
            return Err(Error::DimensionMismatch { expected: grid.dims(), got: center.len() });
        }
        if !(radius.is_finite() && radius >= 1.0) {
            return Err(arg(format!("support radius must be finite and >= 1, got {radius}")));
        }
        let top = f.sup_norm();
        for (flat, v) in f.values().as_slice().iter().enumerate() {
            if v.norm() > 1e-12 * top && dist(&grid.point(flat), &center) > radius {
                return Err(Error::SupportOverflow(format!(
                    "density has magnitude {:e} outside the declared ball of radius {radius}",
                    v.norm()
                )));
            }
        }
        Ok(Self { f, center, radius })
    }

    pub fn function(&self) -> &PhaseFunction {
        &self.f
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// `E_σf(w) = Σ_j w_j f(z_j)e^{−2πiσ(w,z_j)}` on every point of `out`.
pub fn extension_classical(f: &[C64], mu: &CompactMeasure, out: &PhaseGrid) -> Result<PhaseFunction> {
    check_samples(f, mu)?;
    if out.d != mu.d() {
        return Err(Error::DimensionMismatch { expected: mu.d(), got: out.d });
    }
    let d = out.d;
    let coeff: Vec<(C64, &[f64])> = mu.atoms.iter().zip(f).map(|(a, v)| (v * a.w, a.z.as_slice())).collect();
    Ok(PhaseFunction::from_fn(*out, |w| {
        let mut acc = C64::new(0.0, 0.0);
        for (c, z) in &coeff {
            // σ(w, z) = x_z·ξ_w − x_w·ξ_z
            let s: f64 = (0..d).map(|k| z[k] * w[d + k] - w[k] * z[d + k]).sum();
            acc += c * cis_turns(-s);
        }
        acc
    }))
}

/// `E_W(f) = Σ_j w_j f(z_j)ρ(z_j)`.
pub fn extension_quantum(f: &[C64], mu: &CompactMeasure, cache: &RhoCache) -> Result<OperatorMatrix> {
    check_samples(f, mu)?;
    let basis = cache.basis();
    let mut acc = OperatorMatrix::zeros(basis).into_entries();
    for (a, v) in mu.atoms.iter().zip(f) {
        let r = cache.get(&a.z)?;
        acc.axpy(v * a.w, &r)?;
    }
    OperatorMatrix::new(basis.clone(), acc)
}

fn check_samples(f: &[C64], mu: &CompactMeasure) -> Result<()> {
    if f.len() != mu.atoms.len() {
        return Err(Error::DimensionMismatch { expected: mu.atoms.len(), got: f.len() });
    }
    Ok(())
}

/// `F_σg(z_j)` at every atom, by the exact finite sum over the samples of `g`.
pub fn restriction_classical_values(g: &PhaseFunction, mu: &CompactMeasure) -> Result<Vec<C64>> {
    let grid = *g.grid();
    if grid.d != mu.d() {
        return Err(Error::DimensionMismatch { expected: mu.d(), got: grid.d });
    }
    let d = grid.d;
    let cell = grid.cell();
    let samples: Vec<(Vec<f64>, C64)> =
        g.values().as_slice().iter().enumerate().filter(|(_, v)| v.norm() > 0.0).map(|(flat, v)| (grid.point(flat), *v)).collect();
    Ok(par::map_indexed(mu.atoms.len(), |j| {
        let w = &mu.atoms[j].z;
        let mut acc = C64::new(0.0, 0.0);
        for (z, v) in &samples {
            let s: f64 = (0..d).map(|k| z[k] * w[d + k] - w[k] * z[d + k]).sum();
            acc += v * cis_turns(-s);
        }
        acc * cell
    }))
}

/// `(Σ_j w_j|v_j|^q)^{1/q}`, or `max_j |v_j|` for `q = ∞`.
pub fn lq_mu(values: &[C64], mu: &CompactMeasure, q: f64) -> Result<f64> {
    check_samples(values, mu)?;
    if q.is_nan() || q < 1.0 {
        return Err(arg(format!("L^q exponent must be >= 1, got {q}")));
    }
    if q.is_infinite() {
        return Ok(values.iter().zip(&mu.atoms).filter(|(_, a)| a.w > 0.0).fold(0.0, |m, (v, _)| m.max(v.norm())));
    }
    let s: f64 = values.iter().zip(&mu.atoms).map(|(v, a)| a.w * v.norm().powf(q)).sum();
    Ok(s.powf(1.0 / q))
}

/// `‖F_σg‖_{L^q(μ)}`.
pub fn restriction_classical(g: &PhaseFunction, mu: &CompactMeasure, q: f64) -> Result<f64> {
    lq_mu(&restriction_classical_values(g, mu)?, mu, q)
}

/// `F_WT(z_j)` at every atom.
pub fn restriction_quantum_values(t: &OperatorMatrix, mu: &CompactMeasure, cache: &RhoCache) -> Result<Vec<C64>> {
    fourier_wigner(t, cache, &mu.points())
}

/// `‖F_WT‖_{L^q(μ)}`.
pub fn restriction_quantum(t: &OperatorMatrix, mu: &CompactMeasure, q: f64, cache: &RhoCache) -> Result<f64> {
    lq_mu(&restriction_quantum_values(t, mu, cache)?, mu, q)
}

/// Two sides of a duality identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityPair {
    pub lhs: C64,
    pub rhs: C64,
}

impl DualityPair {
    pub fn defect(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// `∫conj(F_σg)f dμ` against `∫conj(g)E_σ(f)dz`.
pub fn classical_duality(g: &PhaseFunction, f: &[C64], mu: &CompactMeasure) -> Result<DualityPair> {
    let r = restriction_classical_values(g, mu)?;
    let lhs: C64 = r.iter().zip(f).zip(&mu.atoms).map(|((a, b), at)| a.conj() * b * at.w).sum();
    let e = extension_classical(f, mu, g.grid())?;
    let rhs = e.inner(g)?;
    Ok(DualityPair { lhs, rhs })
}

/// `∫conj(F_WT)f dμ` against `tr(E_W(f)T*)`.
pub fn quantum_duality(t: &OperatorMatrix, f: &[C64], mu: &CompactMeasure, cache: &RhoCache) -> Result<DualityPair> {
    let r = restriction_quantum_values(t, mu, cache)?;
    let lhs: C64 = r.iter().zip(f).zip(&mu.atoms).map(|((a, b), at)| a.conj() * b * at.w).sum();
    let e = extension_quantum(f, mu, cache)?;
    let rhs = e.compose(&t.adjoint())?.trace();
    Ok(DualityPair { lhs, rhs })
}

/// Order of the seminorm of `F_σφ` in the smoothed-symbol bound: `4d + 2`.
pub fn smoothing_seminorm_order(d: usize) -> u32 {
    (4 * d + 2) as u32
}

/// Both sides of `‖L_{a∗φ}‖_{S^p} ≤ C·(Σ‖∂^α(z^βF_σφ)‖₂)·‖a‖_{L^p}` with `C` measured.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedReport {
    pub p: f64,
    pub schatten: f64,
    pub seminorm: f64,
    pub symbol_norm: f64,
    /// `schatten / (seminorm · symbol_norm)`, zero when `a = 0`.
    pub empirical_constant: f64,
    /// `‖L_{a∗φ}‖_{S²}` and `‖a∗φ‖_{L²}`.
    pub hilbert_schmidt: (f64, f64),
}

pub fn smoothed_symbol_bound(a: &PhaseFunction, phi: &DensitySymbol, p: f64, basis: &HermiteBasis) -> Result<SmoothedReport> {
    let smoothed = euclid_convolve(a, phi.function())?;
    let tail = smoothed.tail_fraction();
    if tail > 1e-6 {
        return Err(Error::SupportOverflow(format!("a∗φ reaches the grid boundary (tail {tail:e})")));
    }
    let m = quantize(&smoothed, basis)?;
    let spec = singular_values(&m)?;
    let schatten = spec.schatten(p)?;
    let seminorm = symplectic_fourier(phi.function()).schwartz_seminorm(smoothing_seminorm_order(basis.d()))?;
    let symbol_norm = a.lp_norm(p)?;
    let denom = seminorm * symbol_norm;
    let empirical_constant = if denom > 0.0 { schatten / denom } else { 0.0 };
    if !empirical_constant.is_finite() {
        return Err(Error::NonFinite("smoothed-symbol constant"));
    }
    Ok(SmoothedReport {
        p,
        schatten,
        seminorm,
        symbol_norm,
        empirical_constant,
        hilbert_schmidt: (spec.schatten(2.0)?, smoothed.l2_norm()),
    })
}

/// Largest `F_σu` boundary-tail fraction accepted by the equivalence experiment.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Ratios `‖L_{F_σu}‖_{S^p} / ‖F_σu‖_{L^p}` (forward) and their reciprocals (backward).
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub family: String,
    pub radius: f64,
    pub ps: Vec<f64>,
    pub schatten: Vec<f64>,
    pub lebesgue: Vec<f64>,
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
    pub tail: f64,
    /// `L^p` norms were taken over the finite box only because `F_σu` does not decay.
    pub box_truncated: bool,
}

impl EquivalenceReport {
    fn assemble(
        family: String,
        radius: f64,
        ps: &[f64],
        spec: &crate::schatten::SingularSpectrum,
        fu: &PhaseFunction,
        box_truncated: bool,
    ) -> Result<Self> {
        let mut schatten = Vec::with_capacity(ps.len());
        let mut lebesgue = Vec::with_capacity(ps.len());
        for &p in ps {
            schatten.push(spec.schatten(p)?);
            lebesgue.push(fu.lp_norm(p)?);
        }
        let forward: Vec<f64> = schatten.iter().zip(&lebesgue).map(|(s, l)| s / l).collect();
        let backward: Vec<f64> = forward.iter().map(|r| 1.0 / r).collect();
        if forward.iter().chain(&backward).any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::NonFinite("equivalence ratio"));
        }
        Ok(Self { family, radius, ps: ps.to_vec(), schatten, lebesgue, forward, backward, tail: fu.tail_fraction(), box_truncated })
    }

    /// Forward ratio at `p = 2`, if the exponent was requested.
    pub fn plancherel_ratio(&self) -> Option<f64> {
        self.ps.iter().position(|&p| p == 2.0).map(|k| self.forward[k])
    }
}

/// Tolerance on the `p = 2` ratio.
pub const PLANCHEREL_TOL: f64 = 1e-3;

/// Runs the equivalence measurement for one density symbol.
pub fn equivalence_experiment(u: &DensitySymbol, ps: &[f64], basis: &HermiteBasis) -> Result<EquivalenceReport> {
    equivalence_experiment_labeled(u, ps, basis, "density")
}

pub fn equivalence_experiment_labeled(u: &DensitySymbol, ps: &[f64], basis: &HermiteBasis, family: &str) -> Result<EquivalenceReport> {
    let fu = symplectic_fourier(u.function());
    let tail = fu.tail_fraction();
    if tail > TAIL_LIMIT {
        return Err(Error::Accuracy { what: "F_σu is not decayed inside the grid".into(), measured: tail });
    }
    let l = quantize(&fu, basis)?;
    let spec = singular_values(&l)?;
    let rep = EquivalenceReport::assemble(family.into(), u.radius(), ps, &spec, &fu, false)?;
    if let Some(r) = rep.plancherel_ratio() {
        if (r - 1.0).abs() > PLANCHEREL_TOL {
            return Err(Error::Accuracy { what: "p = 2 equivalence ratio".into(), measured: r });
        }
    }
    Ok(rep)
}

/// Equivalence measurement for an atomic measure: `ρ(μ) = E_W(1)` against
/// `F_σμ = E_σ(1)` on the box of `grid`. Always box-truncated.
pub fn equivalence_experiment_atomic(mu: &CompactMeasure, ps: &[f64], grid: &PhaseGrid, cache: &RhoCache) -> Result<EquivalenceReport> {
    let ones = vec![C64::new(1.0, 0.0); mu.atoms().len()];
    let fu = extension_classical(&ones, mu, grid)?;
    let t = extension_quantum(&ones, mu, cache)?;
    let spec = singular_values(&t)?;
    EquivalenceReport::assemble("atoms (box-truncated)".into(), mu.radius(), ps, &spec, &fu, true)
}

/// Steepness of the cut-off Gaussian profile: it has dropped to `1e−13` at the unit radius.
pub const BUMP_KAPPA: f64 = 13.0 * core::f64::consts::LN_10 / PI;

/// `exp(−πκ|z|²)` for `|z| ≤ 1`, zero outside.
pub fn bump(z: &[f64]) -> f64 {
    let r2: f64 = z.iter().map(|v| v * v).sum();
    if r2 > 1.0 {
        0.0
    } else {
        (-PI * BUMP_KAPPA * r2).exp()
    }
}

/// Parameters of a modulated bump `e^{2πiσ(ζ,z)}φ((z−c)/s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpParams {
    pub center: Vec<f64>,
    pub scale: f64,
    pub modulation: Vec<f64>,
}

impl BumpParams {
    pub fn sample(&self, grid: &PhaseGrid) -> PhaseFunction {
        let p = self.clone();
        let d = grid.d;
        PhaseFunction::from_fn(*grid, move |z| {
            let y: Vec<f64> = z.iter().zip(&p.center).map(|(a, c)| (a - c) / p.scale).collect();
            let b = bump(&y);
            if b == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let zeta = &p.modulation;
            let s: f64 = (0..d).map(|k| z[k] * zeta[d + k] - zeta[k] * z[d + k]).sum();
            cis_turns(s) * b
        })
    }

    /// As a density symbol declared on `B(0, R)`.
    pub fn symbol(&self, grid: &PhaseGrid, radius: f64) -> Result<DensitySymbol> {
        DensitySymbol::new(self.sample(grid), vec![0.0; 2 * grid.d], radius)
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, dims: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

/// Smallest bump dilation used by the seeded families.
pub const MIN_BUMP_SCALE: f64 = 0.9;
/// Largest modulation magnitude used by the seeded families.
pub const MAX_MODULATION: f64 = 0.3;

/// Seeded family of `k` modulated bumps supported in `B(0, R)`.
pub fn bump_family(d: usize, radius: f64, k: usize, seed: u64, stream: u64) -> Vec<BumpParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..k)
        .map(|_| {
            let lo = MIN_BUMP_SCALE.min(radius);
            let scale = if radius > lo { rng.gen_range(lo..=radius) } else { radius };
            let center = uniform_in_ball(&mut rng, 2 * d, radius - scale);
            let modulation = uniform_in_ball(&mut rng, 2 * d, MAX_MODULATION);
            BumpParams { center, scale, modulation }
        })
        .collect()
}

/// Largest atom distance used for atom clouds, bounded by the ρ-leakage limit.
pub const ATOM_CLOUD_REACH: f64 = 2.0;

/// Seeded cloud of `n` atoms with weights in `(0, 1]` inside `B(0, min(R, 2))`.
pub fn atom_cloud(d: usize, radius: f64, n: usize, seed: u64, stream: u64) -> Result<CompactMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let reach = radius.min(ATOM_CLOUD_REACH);
    let atoms = (0..n).map(|_| Atom { z: uniform_in_ball(&mut rng, 2 * d, reach), w: 1.0 - rng.gen_range(0.0..1.0) }).collect();
    CompactMeasure::new(atoms, vec![0.0; 2 * d], radius)
}

/// Ordinary least-squares line `y = a + b·x`; returns `(a, b, sse)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let sse = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (a, b, sse)
}

/// Residual sum of squares of `y ≈ a + g(x)` with only the intercept free.
pub fn fixed_rate_sse(x: &[f64], y: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let r: Vec<f64> = x.iter().zip(y).map(|(u, v)| v - g(*u)).collect();
    let m = r.iter().sum::<f64>() / r.len() as f64;
    r.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Settings of [`radius_growth_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    pub radii: Vec<f64>,
    pub family_size: usize,
    pub ps: Vec<f64>,
    pub seed: u64,
    pub bootstrap: usize,
    /// Atom clouds per radius (zero disables the box-truncated family).
    pub atom_clouds: usize,
    pub atoms_per_cloud: usize,
}

impl GrowthConfig {
    pub fn new(radii: Vec<f64>, ps: Vec<f64>, seed: u64) -> Self {
        Self { radii, family_size: 32, ps, seed, bootstrap: 1000, atom_clouds: 0, atoms_per_cloud: 16 }
    }
}

/// One `(family, R, p)` row of a growth table.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub family: String,
    pub radius: f64,
    pub p: f64,
    pub forward_min: f64,
    pub forward_max: f64,
    pub backward_min: f64,
    pub backward_max: f64,
}

/// Fitted growth of the max-ratios in `R` for one exponent and direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub p: f64,
    pub direction: &'static str,
    pub slope: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Intercept-only fit with the polynomial ceiling rate `(5d+2)·log R`.
    pub sse_polynomial: f64,
    /// Intercept-only fit with the Gaussian rate `πR²/2`.
    pub sse_gaussian: f64,
}

impl SlopeFit {
    pub fn gaussian_fits_better(&self) -> bool {
        self.sse_gaussian < self.sse_polynomial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub slopes: Vec<SlopeFit>,
    pub reports: Vec<EquivalenceReport>,
    pub seed: u64,
}

/// Ratio growth of seeded modulated-bump families (and optionally atom
/// clouds) over the requested radii.
pub fn radius_growth_study(cfg: &GrowthConfig, grid: &PhaseGrid, basis: &HermiteBasis) -> Result<GrowthTable> {
    if cfg.radii.is_empty() || cfg.family_size == 0 {
        return Err(arg("growth study needs radii and a non-empty family"));
    }
    for &r in &cfg.radii {
        if !(r >= 1.0 && r <= grid.l / 2.0) {
            return Err(Error::SupportOverflow(format!("radius {r} outside [1, L/2 = {}]", grid.l / 2.0)));
        }
    }
    let d = grid.d;
    let jobs: Vec<(usize, BumpParams)> = cfg
        .radii
        .iter()
        .enumerate()
        .flat_map(|(ri, &r)| bump_family(d, r, cfg.family_size, cfg.seed, ri as u64).into_iter().map(move |b| (ri, b)))
        .collect();
    let reports = par::map_indexed(jobs.len(), |k| -> Result<EquivalenceReport> {
        let (ri, b) = &jobs[k];
        let u = b.symbol(grid, cfg.radii[*ri])?;
        equivalence_experiment_labeled(&u, &cfg.ps, basis, "modulated bump")
    });
    let reports: Vec<EquivalenceReport> = reports.into_iter().collect::<Result<_>>()?;

    let mut atomic = Vec::new();
    if cfg.atom_clouds > 0 {
        let cache = RhoCache::new(basis);
        for (ri, &r) in cfg.radii.iter().enumerate() {
            for c in 0..cfg.atom_clouds {
                let stream = 1_000_000 + (ri * cfg.atom_clouds + c) as u64;
                let mu = atom_cloud(d, r, cfg.atoms_per_cloud, cfg.seed, stream)?;
                atomic.push(equivalence_experiment_atomic(&mu, &cfg.ps, grid, &cache)?);
            }
        }
    }

    let mut rows = Vec::new();
    for (fam, set) in [("modulated bump", &reports), ("atoms (box-truncated)", &atomic)] {
        for &r in &cfg.radii {
            let members: Vec<&EquivalenceReport> = set.iter().filter(|e| e.radius == r).collect();
            if members.is_empty() {
                continue;
            }
            for (k, &p) in cfg.ps.iter().enumerate() {
                let fw = members.iter().map(|e| e.forward[k]);
                let bw = members.iter().map(|e| e.backward[k]);
                rows.push(GrowthRow {
                    family: fam.into(),
                    radius: r,
                    p,
                    forward_min: fw.clone().fold(f64::INFINITY, f64::min),
                    forward_max: fw.fold(0.0, f64::max),
                    backward_min: bw.clone().fold(f64::INFINITY, f64::min),
                    backward_max: bw.fold(0.0, f64::max),
                });
            }
        }
    }

    let ceiling = (5 * d + 2) as f64;
    let logr: Vec<f64> = cfg.radii.iter().map(|r| r.ln()).collect();
    let mut slopes = Vec::new();
    if cfg.radii.len() >= 2 {
        for (k, &p) in cfg.ps.iter().enumerate() {
            for direction in ["forward", "backward"] {
                let pick = |e: &EquivalenceReport| if direction == "forward" { e.forward[k] } else { e.backward[k] };
                let by_radius: Vec<Vec<f64>> =
                    cfg.radii.iter().map(|&r| reports.iter().filter(|e| e.radius == r).map(pick).collect()).collect();
                let maxima: Vec<f64> = by_radius.iter().map(|v| v.iter().fold(0.0, |a: f64, b| a.max(*b)).ln()).collect();
                let (_, slope, _) = fit_line(&logr, &maxima);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
                rng.set_stream((k * 2 + usize::from(direction == "backward")) as u64);
                let mut boot: Vec<f64> = (0..cfg.bootstrap)
                    .map(|_| {
                        let m: Vec<f64> =
                            by_radius.iter().map(|v| (0..v.len()).map(|_| v[rng.gen_range(0..v.len())]).fold(0.0, f64::max).ln()).collect();
                        fit_line(&logr, &m).1
                    })
                    .collect();
                boot.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
                let (ci_lo, ci_hi) = if boot.is_empty() { (slope, slope) } else { (quantile(&boot, 0.025), quantile(&boot, 0.975)) };
                slopes.push(SlopeFit {
                    p,
                    direction,
                    slope,
                    ci_lo,
                    ci_hi,
                    sse_polynomial: fixed_rate_sse(&cfg.radii, &maxima, |r| ceiling * r.ln()),
                    sse_gaussian: fixed_rate_sse(&cfg.radii, &maxima, |r| PI * r * r / 2.0),
                });
            }
        }
    }
    let mut all = reports;
    all.extend(atomic);
    Ok(GrowthTable { rows, slopes, reports: all, seed: cfg.seed })
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let t = pos - lo as f64;
    sorted[lo] * (1.0 - t) + sorted[hi] * t
}

/// Singular-value tail profile against the decay of `F_σu` on annuli.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport {
    /// `(k, s_k/s₀)` at `k = M^d/8, M^d/4, M^d/2, M^d − 1`.
    pub singular_tail: Vec<(usize, f64)>,
    /// `(r, max_{r ≤ |w| < r+1} |F_σu(w)| / max|F_σu|)` for integer `r`.
    pub annulus_decay: Vec<(f64, f64)>,
    /// Descriptive label: `"zero"`, `"decaying"` or `"non-vanishing"`.
    pub profile: &'static str,
}

/// Symbol side of a compactness diagnostic.
pub enum DiagnosticInput<'a> {
    Density(&'a DensitySymbol),
    Measure(&'a CompactMeasure),
}

/// Diagnostic only: compactness is not decidable at finite truncation.
pub fn compactness_diagnostic(u: DiagnosticInput<'_>, grid: &PhaseGrid, basis: &HermiteBasis) -> Result<CompactnessReport> {
    let (fu, op) = match u {
        DiagnosticInput::Density(s) => {
            let fu = symplectic_fourier(s.function());
            let op = quantize(&fu, basis)?;
            (fu, op)
        }
        DiagnosticInput::Measure(mu) => {
            let ones = vec![C64::new(1.0, 0.0); mu.atoms().len()];
            let cache = RhoCache::new(basis);
            (extension_classical(&ones, mu, grid)?, extension_quantum(&ones, mu, &cache)?)
        }
    };
    let spec = singular_values(&op)?;
    let s = spec.values();
    let n = s.len();
    let s0 = spec.s0();
    let ratio = |k: usize| if s0 > 0.0 { s[k] / s0 } else { 0.0 };
    let mut ks = vec![n / 8, n / 4, n / 2, n - 1];
    ks.dedup();
    let singular_tail = ks.into_iter().map(|k| (k, ratio(k))).collect::<Vec<_>>();
    let top = fu.sup_norm();
    let rings = grid.l.floor() as usize;
    let mut ring_max = vec![0.0f64; rings];
    for (flat, v) in fu.values().as_slice().iter().enumerate() {
        let r: f64 = grid.point(flat).iter().map(|x| x * x).sum::<f64>().sqrt();
        let k = r.floor() as usize;
        if k < rings {
            ring_max[k] = ring_max[k].max(v.norm());
        }
    }
    let annulus_decay: Vec<(f64, f64)> =
        ring_max.iter().enumerate().map(|(k, m)| (k as f64, if top > 0.0 { m / top } else { 0.0 })).collect();
    let profile = if top == 0.0 && s0 == 0.0 {
        "zero"
    } else {
        let outer = annulus_decay.last().map_or(0.0, |a| a.1);
        let last_sv = singular_tail.last().map_or(0.0, |a| a.1);
        if outer > 0.5 || last_sv > 0.5 {
            "non-vanishing"
        } else {
            "decaying"
        }
    };
    Ok(CompactnessReport { singular_tail, annulus_decay, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ConfigGrid;
    use crate::hermite::SYMPLECTIC_SCALE;

    fn grid() -> PhaseGrid {
        PhaseGrid::new(1, 8.0, 256).unwrap()
    }

    fn basis() -> HermiteBasis {
        HermiteBasis::with_scale(ConfigGrid::new(1, 8.0, 256).unwrap(), 64, SYMPLECTIC_SCALE).unwrap()
    }

    #[test]
    fn circle_mass_and_single_atom_radius() {
        let c = make_measure(MeasureKind::Circle { center: vec![0.0, 0.0], radius: 1.0, n_atoms: 256 }).unwrap();
        assert!((c.mass() - 2.0 * PI).abs() < 1e-12);
        assert!(c.is_symmetric(1e-12));
        let a = make_measure(MeasureKind::Atoms { atoms: vec![Atom { z: vec![0.2, 0.1], w: 1.0 }], center: vec![0.2, 0.1] }).unwrap();
        assert_eq!(a.radius(), 1.0);
        assert!(CompactMeasure::new(vec![Atom { z: vec![0.0, 0.0], w: -1.0 }], vec![0.0, 0.0], 1.0).is_err());
        assert!(make_measure(MeasureKind::Atoms { atoms: vec![], center: vec![0.0, 0.0] }).is_err());
    }

    #[test]
    fn family_is_supported_in_ball_and_seeded() {
        let a = bump_family(1, 2.0, 8, 7, 1);
        let b = bump_family(1, 2.0, 8, 7, 1);
        assert_eq!(a, b);
        for m in &a {
            let u = m.symbol(&grid(), 2.0).unwrap();
            assert!(u.radius() == 2.0);
        }
    }

    #[test]
    fn single_bump_equivalence_ratios() {
        let b = BumpParams { center: vec![0.1, -0.05], scale: 0.9, modulation: vec![0.2, 0.1] };
        let u = b.symbol(&grid(), 1.0).unwrap();
        let rep = equivalence_experiment(&u, &[1.0, 4.0 / 3.0, 2.0, 4.0, f64::INFINITY], &basis()).unwrap();
        assert!((rep.plancherel_ratio().unwrap() - 1.0).abs() < 1e-3);
        assert!(rep.forward.iter().all(|r| r.is_finite() && *r > 0.0));
    }
}
