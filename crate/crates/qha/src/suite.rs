//! The identity suite behind `qha verify`: every structural identity and
//! inequality of the workbench, measured against closed forms or direct
//! sums and compared with a fixed tolerance.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use qha_core::grid::{euclid_convolve, symplectic_form, symplectic_fourier, ConfigGrid, Geometry, PhaseFunction, PhaseGrid, WaveFunction};
use qha_core::hermite::HermiteBasis;
use qha_core::linalg::CMatrix;
use qha_core::restriction::{
    bump_family, classical_duality, equivalence_experiment, make_measure, quantum_duality, smoothed_symbol_bound, BumpParams,
    CompactMeasure, MeasureKind,
};
use qha_core::schatten::{
    default_werner_grid, ideal_bound_check, is_positive, matrix_spectrum, singular_values, werner_convolve, young_check,
};
use qha_core::weyl::{
    cross_ambiguity, integrated_rep, kernel_from_phase_function, quantize, rho_point_matrix, trace_of_rep, twisted_convolve,
    OperatorMatrix, RhoCache,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Cell, Table};

/// One measured identity; it passes when `measured ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub identity: &'static str,
    pub anchor: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    /// Per-case scalars behind `measured`, in a fixed order.
    pub scalars: Vec<f64>,
    pub note: String,
}

impl Check {
    fn at_most(identity: &'static str, anchor: &'static str, measured: f64, tolerance: f64) -> Self {
        Self { identity, anchor, measured, tolerance, scalars: Vec::new(), note: String::new() }
    }

    fn with_scalars(mut self, scalars: Vec<f64>) -> Self {
        self.scalars = scalars;
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }

    fn failed(identity: &'static str, anchor: &'static str, tolerance: f64, err: impl ToString) -> Self {
        Self::at_most(identity, anchor, f64::NAN, tolerance).with_note(err.to_string())
    }
}

/// Grids, basis and seed shared by every check.
pub struct Context {
    pub phase: PhaseGrid,
    pub config: ConfigGrid,
    pub basis: HermiteBasis,
    pub cache: RhoCache,
    pub seed: u64,
}

impl Context {
    pub fn new(phase: PhaseGrid, basis: HermiteBasis, seed: u64) -> Self {
        let cache = RhoCache::new(&basis);
        Self { phase, config: *basis.grid(), basis, cache, seed }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

type Outcome = qha_core::Result<Check>;

fn gaussian(g: PhaseGrid, a: f64, c: [f64; 2], k: [f64; 2]) -> PhaseFunction {
    PhaseFunction::from_fn(g, move |z| {
        let (x, y) = (z[0] - c[0], z[1] - c[1]);
        C64::from_polar((-PI * a * (x * x + y * y)).exp(), 2.0 * PI * (k[0] * z[0] + k[1] * z[1]))
    })
}

fn uniform2(rng: &mut ChaCha8Rng, r: f64) -> [f64; 2] {
    [rng.gen_range(-r..r), rng.gen_range(-r..r)]
}

fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).expect("same shape").frobenius_norm() / b.frobenius_norm()
}

fn sup_diff(a: &PhaseFunction, b: &PhaseFunction) -> qha_core::Result<f64> {
    a.max_abs_diff(b)
}

/// Random matrix supported on the leading `active × active` block.
fn low_order_operator(basis: &HermiteBasis, rng: &mut ChaCha8Rng, active: usize, positive: bool) -> OperatorMatrix {
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..active {
        for j in 0..active {
            m[(i, j)] = random_complex(rng);
        }
    }
    if positive {
        m = m.matmul(&m.adjoint()).expect("square");
    }
    OperatorMatrix::new(basis.clone(), m).expect("finite entries")
}

/// Leading Hermite orders whose phase-space footprint stays inside the
/// truncated system after a shift of length `reach` (d = 1 basis).
pub fn reliable_block(basis: &HermiteBasis, reach: f64) -> usize {
    let s = basis.scale();
    let radius = |k: usize| {
        let r = ((2 * k + 1) as f64).sqrt();
        (s * r).max(r / (2.0 * PI * s))
    };
    let outer = radius(basis.m() - 1);
    (0..basis.m()).take_while(|&k| radius(k) + reach <= outer - 0.5).count()
}

pub const HERMITE_GRAM: &str = "hermite_gram";
pub const HERMITE_EIGEN: &str = "hermite_eigenrelation";
pub const HERMITE_DECAY: &str = "hermite_decay_bound";
pub const FOURIER_PLANCHEREL: &str = "symplectic_fourier_plancherel";
pub const FOURIER_INVOLUTION: &str = "symplectic_fourier_involution";
pub const GAUSSIAN_CONVOLUTION: &str = "gaussian_convolution";
pub const WEYL_PLANCHEREL: &str = "weyl_plancherel";
pub const HERMITIAN_QUANTIZATION: &str = "real_symbol_hermitian";
pub const TRACE_FORMULA: &str = "trace_formula";
pub const PROJECTIVE_LAW: &str = "projective_law";
pub const HOMOMORPHISM: &str = "twisted_homomorphism";
pub const PAIRING: &str = "kernel_pairing";
pub const AMBIGUITY: &str = "ambiguity_ground_state";
pub const MOYAL: &str = "moyal_identity";
pub const PARITY_REAL: &str = "ambiguity_parity_real";
pub const PARITY_COMPLEX: &str = "ambiguity_parity_complex";
pub const RANK_ONE: &str = "rank_one_schatten";
pub const RHO_SPECTRUM: &str = "truncated_rho_spectrum";
pub const IDEAL: &str = "ideal_bound";
pub const STAR: &str = "star_identity";
pub const STAR_DENSITY: &str = "star_density_cutoff";
pub const YOUNG: &str = "young_inequality";
pub const YOUNG_EQUALITY: &str = "young_equality_case";
pub const WERNER_POSITIVITY: &str = "werner_commutative_positive";
pub const TRANSLATION: &str = "schatten_translation_invariance";
pub const INVERSE: &str = "inverse_estimate";
pub const DUALITY_CLASSICAL: &str = "restriction_duality_classical";
pub const DUALITY_QUANTUM: &str = "restriction_duality_quantum";
pub const EQUIVALENCE_P2: &str = "equivalence_p2_ratio";
pub const SMOOTHED_HS: &str = "smoothed_symbol_hilbert_schmidt";

pub fn hermite_gram(ctx: &Context) -> Outcome {
    Ok(Check::at_most(HERMITE_GRAM, "⟨h_j,h_k⟩ = δ_jk", ctx.basis.gram_deviation(), 1e-8))
}

pub fn hermite_eigenrelation(ctx: &Context, k_max: usize) -> Outcome {
    let b = &ctx.basis;
    let worst = (0..b.dim()).filter(|&f| b.multi_index(f).iter().sum::<usize>() <= k_max).map(|f| b.eigen_residual(f)).fold(0.0, f64::max);
    Ok(Check::at_most(HERMITE_EIGEN, "H h_k = (n+2|k|) h_k", worst, 1e-6))
}

fn schwartz_sample(k: usize, grid: ConfigGrid) -> WaveFunction {
    let a = 0.4 + 0.15 * k as f64;
    let c = -0.8 + 0.17 * k as f64;
    let freq = 0.05 * k as f64;
    WaveFunction::from_fn(grid, move |t| {
        let x = t[0] - c;
        C64::from_polar((1.0 + 0.3 * x - 0.1 * x * x) * (-a * x * x).exp(), 2.0 * PI * freq * t[0])
    })
}

/// Largest `sup_k |c_k|(n+2k)^N / ‖H^N φ‖₂` over samples and `N ≤ 4`; the bound is `1`.
pub fn hermite_decay(ctx: &Context, samples: usize) -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..samples {
        let f = schwartz_sample(k, ctx.config);
        let rep = ctx.basis.decay_report(&f, &[0, 1, 2, 3, 4])?;
        worst = rep.entries.iter().map(|e| e.empirical_constant).fold(worst, f64::max);
    }
    Ok(Check::at_most(HERMITE_DECAY, "|c_k| ≤ (n+2|k|)^{−N}‖H^N φ‖₂", worst, 1.0))
}

pub fn fourier_plancherel(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(1);
    let f = gaussian(ctx.phase, rng.gen_range(0.6..1.5), uniform2(&mut rng, 1.0), uniform2(&mut rng, 0.5));
    let n = f.l2_norm();
    let ff = symplectic_fourier(&f);
    Ok(Check::at_most(FOURIER_PLANCHEREL, "‖F_σf‖₂ = ‖f‖₂", (ff.l2_norm() - n).abs() / n, 1e-10))
}

pub fn fourier_involution(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(2);
    let f = gaussian(ctx.phase, rng.gen_range(0.6..1.5), uniform2(&mut rng, 1.0), uniform2(&mut rng, 0.5));
    let err = sup_diff(&symplectic_fourier(&symplectic_fourier(&f)), &f)?;
    Ok(Check::at_most(FOURIER_INVOLUTION, "F_σF_σf = f", err, 1e-10))
}

pub fn gaussian_convolution(ctx: &Context) -> Outcome {
    let (a, b) = (1.5, 0.7);
    let f = gaussian(ctx.phase, a, [0.0, 0.0], [0.0, 0.0]);
    let g = gaussian(ctx.phase, b, [0.0, 0.0], [0.0, 0.0]);
    let c = a * b / (a + b);
    let want = PhaseFunction::from_fn(ctx.phase, move |z| C64::new((-PI * c * (z[0] * z[0] + z[1] * z[1])).exp() / (a + b), 0.0));
    let err = sup_diff(&euclid_convolve(&f, &g)?, &want)?;
    Ok(Check::at_most(GAUSSIAN_CONVOLUTION, "e^{−πa|z|²}∗e^{−πb|z|²} = e^{−πab|z|²/(a+b)}/(a+b)", err, 1e-10))
}

/// Sum of three modulated Gaussian packets, negligible outside `[−2,2]²`
/// and inside the lattice band.
pub fn random_packet_symbol(grid: PhaseGrid, rng: &mut ChaCha8Rng) -> PhaseFunction {
    let parts: Vec<(C64, f64, [f64; 2], [f64; 2])> =
        (0..3).map(|_| (random_complex(rng), rng.gen_range(4.5..6.0), uniform2(rng, 0.5), uniform2(rng, 0.35))).collect();
    PhaseFunction::from_fn(grid, move |z| {
        parts
            .iter()
            .map(|(c, a, m, k)| {
                let (x, y) = (z[0] - m[0], z[1] - m[1]);
                c * C64::from_polar((-PI * a * (x * x + y * y)).exp(), 2.0 * PI * (k[0] * z[0] + k[1] * z[1]))
            })
            .sum()
    })
}

/// Scalars: the ratios `‖quantize(a)‖_{S²}/‖a‖_{L²}`.
pub fn weyl_plancherel(ctx: &Context, symbols: usize) -> Outcome {
    let mut rng = ctx.rng(3);
    let mut ratios = Vec::with_capacity(symbols);
    for _ in 0..symbols {
        let a = random_packet_symbol(ctx.phase, &mut rng);
        let q = quantize(&a, &ctx.basis)?;
        ratios.push(q.frobenius_norm() / a.l2_norm());
    }
    let worst = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    Ok(Check::at_most(WEYL_PLANCHEREL, "‖L_a‖_{S²} = ‖a‖_{L²}", worst, 1e-3).with_scalars(ratios))
}

pub fn hermitian_quantization(ctx: &Context) -> Outcome {
    let a = PhaseFunction::from_fn(ctx.phase, |z| C64::new((z[0] * z[1]).cos() * (-(z[0] * z[0] + z[1] * z[1])).exp(), 0.0));
    let q = quantize(&a, &ctx.basis)?;
    Ok(Check::at_most(HERMITIAN_QUANTIZATION, "a real ⇒ L_a = L_a*", q.entries().hermitian_defect(), 1e-8))
}

/// Gaussian plus `extra` random Schwartz-type functions.
pub fn trace_formula(ctx: &Context, extra: usize) -> Outcome {
    let mut rng = ctx.rng(4);
    let mut worst = (trace_of_rep(&gaussian(ctx.phase, 1.0, [0.0, 0.0], [0.0, 0.0]), &ctx.config)? - 1.0).norm();
    for _ in 0..extra {
        let (a, c, k) = (rng.gen_range(0.7..2.0), uniform2(&mut rng, 0.8), uniform2(&mut rng, 0.5));
        let cubic = rng.gen_range(-0.3..0.3);
        let f = PhaseFunction::from_fn(ctx.phase, move |z| {
            let (x, y) = (z[0] - c[0], z[1] - c[1]);
            let poly = 1.0 + cubic * x * y * (x + y);
            C64::from_polar(poly * (-PI * a * (x * x + y * y)).exp(), 2.0 * PI * (k[0] * z[0] + k[1] * z[1]))
        });
        let at_origin = (1.0 - cubic * c[0] * c[1] * (c[0] + c[1])) * (-PI * a * (c[0] * c[0] + c[1] * c[1])).exp();
        worst = worst.max((trace_of_rep(&f, &ctx.config)? - at_origin).norm());
    }
    Ok(Check::at_most(TRACE_FORMULA, "tr ρ(F) = F(0)", worst, 1e-6))
}

/// Residual of `ρ(z+z′) = e^{−iπσ(z,z′)}ρ(z)ρ(z′)` on the block reliable for shifts up to 2.
pub fn projective_law(ctx: &Context, pairs: usize) -> Outcome {
    let mut rng = ctx.rng(5);
    let k = reliable_block(&ctx.basis, 2.0);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let (z, zp) = (uniform2(&mut rng, 0.7), uniform2(&mut rng, 0.7));
        let sum = [z[0] + zp[0], z[1] + zp[1]];
        let lhs = rho_point_matrix(&sum, &ctx.basis)?;
        let prod = ctx.cache.get(&z)?.matmul(&*ctx.cache.get(&zp)?)?;
        let rhs = prod.scale(C64::from_polar(1.0, -PI * symplectic_form(&z, &zp)?));
        worst = worst.max(rel_diff(&rhs.block(k, k), &lhs.entries().block(k, k)));
    }
    Ok(Check::at_most(PROJECTIVE_LAW, "ρ(z)ρ(z′) = e^{iπσ(z,z′)}ρ(z+z′)", worst, 1e-4))
}

pub fn homomorphism(ctx: &Context, pairs: usize) -> Outcome {
    let mut rng = ctx.rng(6);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let f = gaussian(ctx.phase, rng.gen_range(0.8..1.6), uniform2(&mut rng, 0.4), uniform2(&mut rng, 0.3));
        let g = gaussian(ctx.phase, rng.gen_range(0.8..1.6), uniform2(&mut rng, 0.4), uniform2(&mut rng, 0.3));
        let lhs = integrated_rep(&twisted_convolve(&f, &g)?, &ctx.basis)?;
        let rhs = integrated_rep(&f, &ctx.basis)?.compose(&integrated_rep(&g, &ctx.basis)?)?;
        worst = worst.max(rel_diff(lhs.entries(), rhs.entries()));
    }
    Ok(Check::at_most(HOMOMORPHISM, "ρ(F×G) = ρ(F)ρ(G)", worst, 1e-4))
}

pub fn pairing(ctx: &Context) -> Outcome {
    let u = gaussian(ctx.phase, 1.2, [0.3, -0.2], [0.2, 0.1]);
    let f = gaussian(ctx.phase, 0.9, [-0.1, 0.25], [-0.1, 0.3]);
    let ku = kernel_from_phase_function(&u, &ctx.config)?;
    let kf = kernel_from_phase_function(&f, &ctx.config)?;
    let lhs: C64 = ku.values().as_slice().iter().zip(kf.values().as_slice()).map(|(a, b)| a * b).sum::<C64>() * ku.grid().cell();
    let pf = f.reflect_axes(&[1]);
    let rhs: C64 = u.values().as_slice().iter().zip(pf.values().as_slice()).map(|(a, b)| a * b).sum::<C64>() * ctx.phase.cell();
    Ok(Check::at_most(PAIRING, "∫∫k_u k_F = ∫u(x,ξ)F(x,−ξ)", (lhs - rhs).norm(), 1e-6))
}

/// `A(h₀,h₀)` for the unit-width ground state `π^{−1/4}e^{−t²/2}`.
pub fn ambiguity_ground_state(ctx: &Context) -> Outcome {
    let h0 = WaveFunction::from_fn(ctx.config, |t| C64::new(PI.powf(-0.25) * (-t[0] * t[0] / 2.0).exp(), 0.0));
    let a = cross_ambiguity(&h0, &h0, &ctx.phase)?;
    let want = PhaseFunction::from_fn(ctx.phase, |z| C64::new((-z[0] * z[0] / 4.0 - PI * PI * z[1] * z[1]).exp(), 0.0));
    Ok(Check::at_most(AMBIGUITY, "A(h₀,h₀)(x,ξ) = e^{−x²/4−π²ξ²}", sup_diff(&a, &want)?, 1e-7))
}

fn packet(grid: ConfigGrid, c: f64, a: f64, k: f64, phase: f64) -> WaveFunction {
    WaveFunction::from_fn(grid, move |t| {
        let x = t[0] - c;
        C64::from_polar((-a * x * x).exp() * (1.0 + 0.2 * x), 2.0 * PI * k * t[0] + phase)
    })
}

pub fn moyal(ctx: &Context) -> Outcome {
    let f = packet(ctx.config, 0.3, 0.8, 0.2, 0.0);
    let g = packet(ctx.config, -0.4, 1.3, -0.1, 0.5);
    let a = cross_ambiguity(&f, &g, &ctx.phase)?;
    let want = f.l2_norm() * g.l2_norm();
    Ok(Check::at_most(MOYAL, "‖A(f,g)‖₂ = ‖f‖₂‖g‖₂", (a.l2_norm() - want).abs(), 1e-6))
}

pub fn parity_real(ctx: &Context) -> Outcome {
    let g1 = WaveFunction::from_fn(ctx.config, |t| C64::new((-(t[0] - 0.4).powi(2)).exp(), 0.0));
    let g2 = WaveFunction::from_fn(ctx.config, |t| C64::new((1.0 + t[0]) * (-1.5 * (t[0] + 0.1).powi(2)).exp(), 0.0));
    let lhs = cross_ambiguity(&g2.reflect(), &g1.reflect(), &ctx.phase)?;
    let rhs = cross_ambiguity(&g1, &g2, &ctx.phase)?.reflect_axes(&[1]);
    Ok(Check::at_most(PARITY_REAL, "A(ǧ₂,ǧ₁) = P_ξA(g₁,g₂), real g", sup_diff(&lhs, &rhs)?, 1e-8))
}

pub fn parity_complex(ctx: &Context) -> Outcome {
    let g1 = packet(ctx.config, 0.3, 0.8, 0.25, 0.0);
    let g2 = packet(ctx.config, -0.4, 1.3, -0.15, 0.5);
    let lhs = cross_ambiguity(&g2.reflect(), &g1.reflect(), &ctx.phase)?;
    let rhs = cross_ambiguity(&g1.conj(), &g2.conj(), &ctx.phase)?.reflect_axes(&[1]);
    Ok(Check::at_most(PARITY_COMPLEX, "A(ǧ₂,ǧ₁) = P_ξA(ḡ₁,ḡ₂)", sup_diff(&lhs, &rhs)?, 1e-8))
}

pub const RANK_ONE_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];

pub fn rank_one(ctx: &Context, pairs: usize) -> Outcome {
    let mut rng = ctx.rng(7);
    let n = ctx.basis.dim();
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let f: Vec<C64> = (0..n).map(|_| random_complex(&mut rng)).collect();
        let g: Vec<C64> = (0..n).map(|_| random_complex(&mut rng)).collect();
        let norm = |v: &[C64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let want = norm(&f) * norm(&g);
        let s = matrix_spectrum(&CMatrix::outer(&f, &g))?;
        for p in RANK_ONE_EXPONENTS {
            worst = worst.max((s.schatten(p)? - want).abs() / want);
        }
    }
    Ok(Check::at_most(RANK_ONE, "‖f⊗g‖_{S^p} = ‖f‖₂‖g‖₂", worst, 1e-8))
}

/// Singular values of the `M × M/2` column block of a truncated `ρ(z)`, `|z| ≤ 1`.
pub fn rho_spectrum(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(8);
    let m = ctx.basis.m();
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let z = loop {
            let z = uniform2(&mut rng, 1.0);
            if z[0].hypot(z[1]) <= 1.0 {
                break z;
            }
        };
        let r = ctx.cache.get(&z)?;
        let block = CMatrix::from_fn(m, m / 2, |i, j| r[(i, j)]);
        worst = matrix_spectrum(&block)?.values().iter().map(|s| (s - 1.0).abs()).fold(worst, f64::max);
    }
    Ok(Check::at_most(RHO_SPECTRUM, "ρ(z) unitary ⇒ s_k = 1", worst, 1e-4))
}

pub fn ideal(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(9);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = OperatorMatrix::new(ctx.basis.clone(), (*ctx.cache.get(&uniform2(&mut rng, 0.7))?).clone())?;
        let b = OperatorMatrix::new(ctx.basis.clone(), (*ctx.cache.get(&uniform2(&mut rng, 0.7))?).clone())?;
        let t = low_order_operator(&ctx.basis, &mut rng, 8, false);
        for p in [1.0, 2.0, f64::INFINITY] {
            let r = ideal_bound_check(&a, &t, &b, p)?;
            worst = worst.max(r.lhs / r.rhs - 1.0);
        }
    }
    Ok(Check::at_most(IDEAL, "‖ATB‖_{S^p} ≤ ‖A‖‖T‖_{S^p}‖B‖", worst, 1e-4))
}

/// Scalars: `sup|ρ(F)⋆ρ(G)|` per pair.
pub fn star(ctx: &Context, pairs: usize) -> Outcome {
    let mut rng = ctx.rng(10);
    let eval = default_werner_grid(&ctx.phase);
    let mut worst = 0.0f64;
    let mut sups = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let f = gaussian(ctx.phase, rng.gen_range(0.7..1.6), uniform2(&mut rng, 0.4), uniform2(&mut rng, 0.3));
        let g = gaussian(ctx.phase, rng.gen_range(0.7..1.6), uniform2(&mut rng, 0.4), uniform2(&mut rng, 0.3));
        let lhs = werner_convolve(&integrated_rep(&f, &ctx.basis)?, &integrated_rep(&g, &ctx.basis)?, &eval)?.values;
        let rhs = symplectic_fourier(&f.mul(&g)?).resample(eval)?;
        worst = worst.max(sup_diff(&lhs, &rhs)?);
        sups.push(lhs.sup_norm());
    }
    Ok(Check::at_most(STAR, "ρ(F)⋆ρ(G) = F_σ(FG)", worst, 1e-4).with_scalars(sups))
}

/// Smooth density supported in `B(c, 2)` and slowly modulated.
pub fn random_density(grid: PhaseGrid, rng: &mut ChaCha8Rng) -> PhaseFunction {
    let center = uniform2(rng, 0.25).to_vec();
    let params = BumpParams { center, scale: 2.0, modulation: uniform2(rng, 0.2).to_vec() };
    params.sample(&grid)
}

/// Evaluation box `[−2, 2)` for shifts of `ρ(u)`, whose Hermite content reaches the leakage limit at `|x| = 4`.
fn density_eval_grid(phase: &PhaseGrid) -> qha_core::Result<PhaseGrid> {
    PhaseGrid::new(phase.d, 2.0, 32)
}

/// `T⋆ρ(φ) = F_σ(φu) = F_σ(u)∗F_σ(φ)` with `T = ρ(u)`; scalars: `sup|T⋆ρ(φ)|`.
pub fn star_density(ctx: &Context, pairs: usize) -> Outcome {
    let mut rng = ctx.rng(11);
    let eval = density_eval_grid(&ctx.phase)?;
    let mut worst = 0.0f64;
    let mut sups = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let u = random_density(ctx.phase, &mut rng);
        let phi = gaussian(ctx.phase, rng.gen_range(0.5..1.5), [0.0, 0.0], [0.0, 0.0]);
        let lhs = werner_convolve(&integrated_rep(&u, &ctx.basis)?, &integrated_rep(&phi, &ctx.basis)?, &eval)?.values;
        let product = symplectic_fourier(&phi.mul(&u)?).resample(eval)?;
        let convolved = euclid_convolve(&symplectic_fourier(&u), &symplectic_fourier(&phi))?.resample(eval)?;
        worst = worst.max(sup_diff(&lhs, &product)?).max(sup_diff(&lhs, &convolved)?);
        sups.push(lhs.sup_norm());
    }
    Ok(Check::at_most(STAR_DENSITY, "ρ(u)⋆ρ(φ) = F_σ(φu) = F_σu∗F_σφ", worst, 1e-4).with_scalars(sups))
}

/// Reciprocals below `0.02` snap to zero so no exponent exceeds 50 except `∞`.
fn exponent_triple(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let snap = |v: f64| if v < 0.02 { 0.0 } else { v };
    let ip = snap(rng.gen_range(0.0..=1.0));
    let ir = snap(rng.gen_range(0.0..=ip));
    let iq = 1.0 + ir - ip;
    let inv = |v: f64| if v == 0.0 { f64::INFINITY } else { 1.0 / v };
    (inv(ip), inv(iq), inv(ir))
}

/// Largest violation `−slack` of Young's inequality over random triples.
pub fn young(ctx: &Context, triples: usize) -> Outcome {
    let mut rng = ctx.rng(12);
    let eval = default_werner_grid(&ctx.phase);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..triples {
        let t1 = low_order_operator(&ctx.basis, &mut rng, 10, k % 2 == 0);
        let t2 = low_order_operator(&ctx.basis, &mut rng, 10, k % 3 == 0);
        let (p, q, r) = exponent_triple(&mut rng);
        let rep = young_check(&t1, &t2, p, q, r, &eval)?;
        worst = worst.max(-rep.slack);
    }
    Ok(Check::at_most(YOUNG, "‖T₁⋆T₂‖_{L^r} ≤ ‖T₁‖_{S^p}‖T₂‖_{S^q}", worst, 1e-6).with_note("measured: largest −slack"))
}

pub fn young_equality(ctx: &Context) -> Outcome {
    let p0 = OperatorMatrix::projector(&ctx.basis, 0);
    let rep = young_check(&p0, &p0, 1.0, 1.0, 1.0, &default_werner_grid(&ctx.phase))?;
    Ok(Check::at_most(YOUNG_EQUALITY, "‖P_{h₀}⋆P_{h₀}‖_{L¹} = 1", (rep.lhs - 1.0).abs(), 1e-6))
}

pub fn werner_positivity(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(13);
    let eval = PhaseGrid::new(ctx.phase.d, 2.0, 16)?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let t1 = low_order_operator(&ctx.basis, &mut rng, 12, true);
        let t2 = low_order_operator(&ctx.basis, &mut rng, 12, true);
        if !(is_positive(&t1) && is_positive(&t2)) {
            return Ok(Check::failed(WERNER_POSITIVITY, "T₁⋆T₂ = T₂⋆T₁ ≥ 0", 1e-8, "inputs not positive"));
        }
        let a = werner_convolve(&t1, &t2, &eval)?;
        let b = werner_convolve(&t2, &t1, &eval)?;
        let scale = a.values.sup_norm().max(1.0);
        worst = worst.max(sup_diff(&a.values, &b.values)? / scale).max(a.max_imaginary).max(-a.min_real);
    }
    Ok(Check::at_most(WERNER_POSITIVITY, "T₁⋆T₂ = T₂⋆T₁ ≥ 0", worst, 1e-8))
}

pub fn translation(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(14);
    let a = random_packet_symbol(ctx.phase, &mut rng);
    let base = singular_values(&quantize(&a, &ctx.basis)?)?;
    let h = ctx.phase.step();
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let w = loop {
            let w = [(rng.gen_range(-2.0..2.0) / h).round() * h, (rng.gen_range(-2.0..2.0) / h).round() * h];
            if w[0].hypot(w[1]) <= 2.0 {
                break w;
            }
        };
        let moved = singular_values(&quantize(&a.translate(&w)?, &ctx.basis)?)?;
        for p in [1.0, 2.0, f64::INFINITY] {
            let (x, y) = (base.schatten(p)?, moved.schatten(p)?);
            worst = worst.max((x - y).abs() / x);
        }
    }
    Ok(Check::at_most(TRANSLATION, "‖L_{λ_w a}‖_{S^p} = ‖L_a‖_{S^p}", worst, 1e-3))
}

/// Largest `‖F_σ(Fu)‖_{L^p} / (‖ρ(F)‖_{S¹}‖ρ(u)‖_{S^p})`; the bound is `1/(1 − 1e−6)`.
pub fn inverse_estimate(ctx: &Context) -> Outcome {
    let mut rng = ctx.rng(15);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let u = random_density(ctx.phase, &mut rng);
        let cutoff = gaussian(ctx.phase, rng.gen_range(0.8..2.0), [0.0, 0.0], [0.0, 0.0]);
        let lhs_fn = symplectic_fourier(&cutoff.mul(&u)?);
        let s1 = singular_values(&integrated_rep(&cutoff, &ctx.basis)?)?.schatten(1.0)?;
        let tu = singular_values(&integrated_rep(&u, &ctx.basis)?)?;
        for p in [1.0, 2.0, f64::INFINITY] {
            worst = worst.max(lhs_fn.lp_norm(p)? / (s1 * tu.schatten(p)?));
        }
    }
    Ok(Check::at_most(INVERSE, "‖F_σ(Fu)‖_{L^p} ≤ ‖ρ(F)‖_{S¹}‖ρ(u)‖_{S^p}", worst, 1.0 / (1.0 - 1e-6)))
}

pub fn unit_circle(atoms: usize) -> qha_core::Result<CompactMeasure> {
    make_measure(MeasureKind::Circle { center: vec![0.0, 0.0], radius: 1.0, n_atoms: atoms })
}

fn duality_scale(mu: &CompactMeasure, f: &[C64]) -> f64 {
    mu.atoms().iter().zip(f).map(|(a, v)| a.w * v.norm()).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// Relative defect of `∫conj(F_σg)f dμ = ⟨E_σf, g⟩` on `mu`.
pub fn duality_classical(ctx: &Context, mu: &CompactMeasure, cases: usize) -> Outcome {
    let mut rng = ctx.rng(16);
    let grid = default_werner_grid(&ctx.phase);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let g = gaussian(grid, rng.gen_range(0.5..2.0), uniform2(&mut rng, 1.0), uniform2(&mut rng, 0.4));
        let f: Vec<C64> = (0..mu.atoms().len()).map(|_| random_complex(&mut rng)).collect();
        let pair = classical_duality(&g, &f, mu)?;
        worst = worst.max(pair.defect() / duality_scale(mu, &f));
    }
    Ok(Check::at_most(DUALITY_CLASSICAL, "⟨F_σg, f⟩_μ = ⟨g, E_σf⟩", worst, 1e-5))
}

/// Relative defect of `∫conj(F_WT)f dμ = tr(E_W(f)T*)` on `mu`.
pub fn duality_quantum(ctx: &Context, mu: &CompactMeasure, cases: usize) -> Outcome {
    let mut rng = ctx.rng(17);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let t = low_order_operator(&ctx.basis, &mut rng, 12, false);
        let f: Vec<C64> = (0..mu.atoms().len()).map(|_| random_complex(&mut rng)).collect();
        let pair = quantum_duality(&t, &f, mu, &ctx.cache)?;
        worst = worst.max(pair.defect() / duality_scale(mu, &f));
    }
    Ok(Check::at_most(DUALITY_QUANTUM, "⟨F_WT, f⟩_μ = tr(E_W(f)T*)", worst, 1e-5))
}

pub fn equivalence_p2(ctx: &Context) -> Outcome {
    let mut worst = 0.0f64;
    for b in bump_family(ctx.phase.d, 1.0, 4, ctx.seed, 99) {
        let rep = equivalence_experiment(&b.symbol(&ctx.phase, 1.0)?, &[2.0], &ctx.basis)?;
        worst = worst.max((rep.forward[0] - 1.0).abs());
    }
    Ok(Check::at_most(EQUIVALENCE_P2, "‖L_{F_σu}‖_{S²} = ‖F_σu‖_{L²}", worst, 1e-3))
}

pub fn smoothed_hs(ctx: &Context) -> Outcome {
    let phi = BumpParams { center: vec![0.0, 0.0], scale: 1.0, modulation: vec![0.0, 0.0] }.symbol(&ctx.phase, 1.0)?;
    let a = gaussian(ctx.phase, 2.0, [0.2, -0.1], [0.1, 0.0]);
    let rep = smoothed_symbol_bound(&a, &phi, 2.0, &ctx.basis)?;
    let (hs, l2) = rep.hilbert_schmidt;
    Ok(Check::at_most(SMOOTHED_HS, "‖M_a‖_{S²} = ‖a∗φ‖_{L²}", (hs / l2 - 1.0).abs(), 1e-4))
}

type Runner = Box<dyn Fn(&Context) -> Outcome + Sync>;

fn runner(f: impl Fn(&Context) -> Outcome + Sync + 'static) -> Runner {
    Box::new(f)
}

/// `(identity, anchor, tolerance, runner)` for the default suite.
fn default_checks() -> Vec<(&'static str, &'static str, f64, Runner)> {
    vec![
        (HERMITE_GRAM, "⟨h_j,h_k⟩ = δ_jk", 1e-8, runner(hermite_gram)),
        (HERMITE_EIGEN, "H h_k = (n+2|k|) h_k", 1e-6, runner(|c| hermite_eigenrelation(c, 20))),
        (HERMITE_DECAY, "|c_k| ≤ (n+2|k|)^{−N}‖H^N φ‖₂", 1.0, runner(|c| hermite_decay(c, 10))),
        (FOURIER_PLANCHEREL, "‖F_σf‖₂ = ‖f‖₂", 1e-10, runner(fourier_plancherel)),
        (FOURIER_INVOLUTION, "F_σF_σf = f", 1e-10, runner(fourier_involution)),
        (GAUSSIAN_CONVOLUTION, "e^{−πa|z|²}∗e^{−πb|z|²}", 1e-10, runner(gaussian_convolution)),
        (WEYL_PLANCHEREL, "‖L_a‖_{S²} = ‖a‖_{L²}", 1e-3, runner(|c| weyl_plancherel(c, 20))),
        (HERMITIAN_QUANTIZATION, "a real ⇒ L_a = L_a*", 1e-8, runner(hermitian_quantization)),
        (TRACE_FORMULA, "tr ρ(F) = F(0)", 1e-6, runner(|c| trace_formula(c, 10))),
        (PROJECTIVE_LAW, "ρ(z)ρ(z′) = e^{iπσ(z,z′)}ρ(z+z′)", 1e-4, runner(|c| projective_law(c, 10))),
        (HOMOMORPHISM, "ρ(F×G) = ρ(F)ρ(G)", 1e-4, runner(|c| homomorphism(c, 5))),
        (PAIRING, "∫∫k_u k_F = ∫u(x,ξ)F(x,−ξ)", 1e-6, runner(pairing)),
        (AMBIGUITY, "A(h₀,h₀)(x,ξ) = e^{−x²/4−π²ξ²}", 1e-7, runner(ambiguity_ground_state)),
        (MOYAL, "‖A(f,g)‖₂ = ‖f‖₂‖g‖₂", 1e-6, runner(moyal)),
        (PARITY_REAL, "A(ǧ₂,ǧ₁) = P_ξA(g₁,g₂), real g", 1e-8, runner(parity_real)),
        (PARITY_COMPLEX, "A(ǧ₂,ǧ₁) = P_ξA(ḡ₁,ḡ₂)", 1e-8, runner(parity_complex)),
        (RANK_ONE, "‖f⊗g‖_{S^p} = ‖f‖₂‖g‖₂", 1e-8, runner(|c| rank_one(c, 10))),
        (RHO_SPECTRUM, "ρ(z) unitary ⇒ s_k = 1", 1e-4, runner(rho_spectrum)),
        (IDEAL, "‖ATB‖_{S^p} ≤ ‖A‖‖T‖_{S^p}‖B‖", 1e-4, runner(ideal)),
        (STAR, "ρ(F)⋆ρ(G) = F_σ(FG)", 1e-4, runner(|c| star(c, 5))),
        (STAR_DENSITY, "ρ(u)⋆ρ(φ) = F_σ(φu) = F_σu∗F_σφ", 1e-4, runner(|c| star_density(c, 3))),
        (YOUNG, "‖T₁⋆T₂‖_{L^r} ≤ ‖T₁‖_{S^p}‖T₂‖_{S^q}", 1e-6, runner(|c| young(c, 50))),
        (YOUNG_EQUALITY, "‖P_{h₀}⋆P_{h₀}‖_{L¹} = 1", 1e-6, runner(young_equality)),
        (WERNER_POSITIVITY, "T₁⋆T₂ = T₂⋆T₁ ≥ 0", 1e-8, runner(werner_positivity)),
        (TRANSLATION, "‖L_{λ_w a}‖_{S^p} = ‖L_a‖_{S^p}", 1e-3, runner(translation)),
        (INVERSE, "‖F_σ(Fu)‖_{L^p} ≤ ‖ρ(F)‖_{S¹}‖ρ(u)‖_{S^p}", 1.0 / (1.0 - 1e-6), runner(inverse_estimate)),
        (DUALITY_CLASSICAL, "⟨F_σg, f⟩_μ = ⟨g, E_σf⟩", 1e-5, runner(|c| duality_classical(c, &unit_circle(256)?, 10))),
        (DUALITY_QUANTUM, "⟨F_WT, f⟩_μ = tr(E_W(f)T*)", 1e-5, runner(|c| duality_quantum(c, &unit_circle(256)?, 10))),
        (EQUIVALENCE_P2, "‖L_{F_σu}‖_{S²} = ‖F_σu‖_{L²}", 1e-3, runner(equivalence_p2)),
        (SMOOTHED_HS, "‖M_a‖_{S²} = ‖a∗φ‖_{L²}", 1e-4, runner(smoothed_hs)),
    ]
}

/// Runs every check; a check that errors is recorded as failed with the error as note.
pub fn run_suite(ctx: &Context) -> Vec<Check> {
    default_checks()
        .into_iter()
        .map(|(identity, anchor, tol, run)| run(ctx).unwrap_or_else(|e| Check::failed(identity, anchor, tol, e)))
        .collect()
}

pub fn suite_table(checks: &[Check]) -> Table {
    let mut t = Table::new("identities", &["identity", "anchor", "measured", "relation", "tolerance", "passed", "note"]);
    for c in checks {
        t.push(vec![
            c.identity.into(),
            c.anchor.into(),
            Cell::Num(c.measured),
            "<=".into(),
            Cell::Num(c.tolerance),
            c.passed().into(),
            c.note.clone().into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_triples_satisfy_the_young_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
        for _ in 0..200 {
            let (p, q, r) = exponent_triple(&mut rng);
            assert!(p >= 1.0 && q >= 1.0 && r >= 1.0);
            assert!((inv(p) + inv(q) - 1.0 - inv(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn failed_checks_never_pass() {
        assert!(!Check::failed("x", "y", 1.0, "boom").passed());
        assert!(Check::at_most("x", "y", 0.5, 1.0).passed());
    }
}
