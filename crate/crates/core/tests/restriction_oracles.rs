use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qha_core::grid::{ConfigGrid, PhaseFunction, PhaseGrid};
use qha_core::hermite::{HermiteBasis, SYMPLECTIC_SCALE};
use qha_core::linalg::CMatrix;
use qha_core::restriction::{
    bump_family, classical_duality, compactness_diagnostic, extension_classical, extension_quantum, lq_mu, make_measure, quantum_duality,
    radius_growth_study, restriction_classical, smoothed_symbol_bound, Atom, BumpParams, CompactMeasure, DensitySymbol, DiagnosticInput,
    GrowthConfig, MeasureKind,
};
use qha_core::weyl::{OperatorMatrix, RhoCache};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn basis() -> HermiteBasis {
    HermiteBasis::with_scale(ConfigGrid::new(1, 8.0, 256).unwrap(), 64, SYMPLECTIC_SCALE).unwrap()
}

fn circle(n: usize) -> CompactMeasure {
    make_measure(MeasureKind::Circle { center: vec![0.0, 0.0], radius: 1.0, n_atoms: n }).unwrap()
}

fn bessel_j0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let q = x * x / 4.0;
    for k in 1..80 {
        term *= -q / (k * k) as f64;
        sum += term;
    }
    sum
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn bessel_oracle_sanity() {
    assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
    assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-12);
    assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
}

#[test]
fn circle_extension_is_a_bessel_function() {
    let mu = circle(256);
    let out = PhaseGrid::new(1, 1.5, 32).unwrap();
    let e = extension_classical(&vec![C64::new(1.0, 0.0); 256], &mu, &out).unwrap();
    let want = PhaseFunction::from_fn(out, |w| C64::new(2.0 * PI * bessel_j0(2.0 * PI * w[0].hypot(w[1])), 0.0));
    let err = e.max_abs_diff(&want).unwrap();
    assert!(err < 1e-10, "{err}");
    assert!((mu.mass() - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn classical_duality_on_the_circle() {
    let mu = circle(256);
    let grid = PhaseGrid::new(1, 8.0, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let (a, c0, c1, m) = (rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
        let g =
            PhaseFunction::from_fn(grid, move |z| C64::from_polar((-PI * a * ((z[0] - c0).powi(2) + (z[1] - c1).powi(2))).exp(), m * z[0]));
        let f = random_values(&mut rng, 256);
        let pair = classical_duality(&g, &f, &mu).unwrap();
        assert!(pair.defect() <= 1e-5 * pair.lhs.norm().max(1.0), "{pair:?}");
    }
}

#[test]
fn quantum_duality_on_the_circle() {
    let b = basis();
    let cache = RhoCache::new(&b);
    let mu = circle(256);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..10 {
        let mut m = CMatrix::zeros(64, 64);
        for i in 0..12 {
            for j in 0..12 {
                m[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let t = OperatorMatrix::new(b.clone(), m).unwrap();
        let f = random_values(&mut rng, 256);
        let pair = quantum_duality(&t, &f, &mu, &cache).unwrap();
        assert!(pair.defect() <= 1e-5 * pair.lhs.norm().max(1.0), "{pair:?}");
    }
}

#[test]
fn quantum_extension_is_hermitian_for_symmetric_measures() {
    let b = basis();
    let cache = RhoCache::new(&b);
    let mu = circle(64);
    assert!(mu.is_symmetric(1e-12));
    let ones = vec![C64::new(1.0, 0.0); 64];
    assert!(extension_quantum(&ones, &mu, &cache).unwrap().entries().hermitian_defect() < 1e-10);
    let lopsided = CompactMeasure::new(vec![Atom { z: vec![0.5, 0.25], w: 1.0 }], vec![0.0, 0.0], 1.0).unwrap();
    assert!(!lopsided.is_symmetric(1e-12));
    let e = extension_quantum(&[C64::new(1.0, 0.0)], &lopsided, &cache).unwrap();
    assert!(e.entries().hermitian_defect() > 1e-3);
}

#[test]
fn lq_norms_against_direct_sums() {
    let atoms = vec![Atom { z: vec![0.0, 0.0], w: 2.0 }, Atom { z: vec![0.5, 0.0], w: 0.5 }, Atom { z: vec![0.0, 0.5], w: 0.0 }];
    let mu = CompactMeasure::new(atoms, vec![0.0, 0.0], 1.0).unwrap();
    let v = [C64::new(3.0, 4.0), C64::new(1.0, 0.0), C64::new(100.0, 0.0)];
    assert!((lq_mu(&v, &mu, 1.0).unwrap() - 10.5).abs() < 1e-12);
    assert!((lq_mu(&v, &mu, 2.0).unwrap() - 50.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(lq_mu(&v, &mu, f64::INFINITY).unwrap(), 5.0);
    assert!(lq_mu(&v, &mu, 0.5).is_err());
    assert!(lq_mu(&v[..2], &mu, 1.0).is_err());
}

#[test]
fn restriction_of_a_gaussian_on_the_circle() {
    // F_σ of e^{−π|z|²} is e^{−π|w|²}, which equals e^{−π} on the unit circle.
    let grid = PhaseGrid::new(1, 8.0, 128).unwrap();
    let g = PhaseFunction::from_fn(grid, |z| C64::new((-PI * (z[0] * z[0] + z[1] * z[1])).exp(), 0.0));
    let mu = circle(32);
    let r = restriction_classical(&g, &mu, 2.0).unwrap();
    assert!((r - (-PI).exp() * (2.0 * PI).sqrt()).abs() < 1e-10);
}

#[test]
fn smoothed_symbol_bound_is_finite_and_plancherel_consistent() {
    let b = basis();
    let grid = PhaseGrid::new(1, 8.0, 256).unwrap();
    let phi = BumpParams { center: vec![0.0, 0.0], scale: 1.0, modulation: vec![0.0, 0.0] }.symbol(&grid, 1.0).unwrap();
    let a = PhaseFunction::from_fn(grid, |z| C64::new((-PI * 2.0 * (z[0] * z[0] + z[1] * z[1])).exp(), 0.0));
    for p in [1.0, 2.0, f64::INFINITY] {
        let rep = smoothed_symbol_bound(&a, &phi, p, &b).unwrap();
        assert!(rep.empirical_constant.is_finite() && rep.empirical_constant > 0.0);
        let (hs, l2) = rep.hilbert_schmidt;
        assert!((hs / l2 - 1.0).abs() < 1e-3);
    }
    let wide = PhaseFunction::from_fn(grid, |_| C64::new(1.0, 0.0));
    assert!(smoothed_symbol_bound(&wide, &phi, 2.0, &b).is_err());
}

#[test]
fn compactness_diagnostic_profiles() {
    let b = basis();
    let grid = PhaseGrid::new(1, 8.0, 256).unwrap();
    let smooth = BumpParams { center: vec![0.0, 0.0], scale: 1.0, modulation: vec![0.0, 0.0] }.symbol(&grid, 1.0).unwrap();
    let rep = compactness_diagnostic(DiagnosticInput::Density(&smooth), &grid, &b).unwrap();
    assert_eq!(rep.profile, "decaying");
    assert!(rep.annulus_decay.last().unwrap().1 < 1e-6);
    let delta = CompactMeasure::from_atoms(vec![Atom { z: vec![0.0, 0.0], w: 1.0 }], vec![0.0, 0.0]).unwrap();
    let rep = compactness_diagnostic(DiagnosticInput::Measure(&delta), &grid, &b).unwrap();
    assert_eq!(rep.profile, "non-vanishing");
    assert!(rep.singular_tail.iter().all(|(_, r)| (r - 1.0).abs() < 1e-12));
    let zero = DensitySymbol::new(PhaseFunction::zeros(grid), vec![0.0, 0.0], 1.0).unwrap();
    assert_eq!(compactness_diagnostic(DiagnosticInput::Density(&zero), &grid, &b).unwrap().profile, "zero");
}

#[test]
fn growth_study_is_deterministic_and_validates_radii() {
    let b = basis();
    let grid = PhaseGrid::new(1, 8.0, 256).unwrap();
    let mut cfg = GrowthConfig::new(vec![1.0, 2.0], vec![1.0, 2.0, f64::INFINITY], 7);
    cfg.family_size = 3;
    cfg.bootstrap = 50;
    let a = radius_growth_study(&cfg, &grid, &b).unwrap();
    let c = radius_growth_study(&cfg, &grid, &b).unwrap();
    assert_eq!(a, c);
    assert_eq!(a.rows.len(), 6);
    for row in &a.rows {
        assert!(row.forward_min.is_finite() && row.forward_min > 0.0 && row.forward_max >= row.forward_min);
        if row.p == 2.0 {
            assert!((row.forward_max - 1.0).abs() <= 1e-3 && (row.forward_min - 1.0).abs() <= 1e-3);
        }
    }
    cfg.radii = vec![0.5];
    assert!(radius_growth_study(&cfg, &grid, &b).is_err());
    cfg.radii = vec![5.0];
    assert!(radius_growth_study(&cfg, &grid, &b).is_err());
}

#[test]
fn invalid_measures_and_symbols_are_rejected() {
    assert!(CompactMeasure::new(vec![], vec![0.0, 0.0], 1.0).is_err());
    assert!(CompactMeasure::new(vec![Atom { z: vec![0.0, 0.0], w: -1.0 }], vec![0.0, 0.0], 1.0).is_err());
    assert!(CompactMeasure::new(vec![Atom { z: vec![2.0, 0.0], w: 1.0 }], vec![0.0, 0.0], 1.0).is_err());
    assert!(CompactMeasure::new(vec![Atom { z: vec![0.0, 0.0], w: 1.0 }], vec![0.0, 0.0], 0.5).is_err());
    assert!(CompactMeasure::new(vec![Atom { z: vec![0.0], w: 1.0 }], vec![0.0], 1.0).is_err());
    assert!(make_measure(MeasureKind::Circle { center: vec![0.0, 0.0], radius: 1.0, n_atoms: 0 }).is_err());
    let grid = PhaseGrid::new(1, 8.0, 64).unwrap();
    let wide = PhaseFunction::from_fn(grid, |z| C64::new((-(z[0] * z[0] + z[1] * z[1])).exp(), 0.0));
    assert!(DensitySymbol::new(wide.clone(), vec![0.0, 0.0], 1.0).is_err());
    let signed = wide.scale(C64::new(-1.0, 0.0));
    assert!(make_measure(MeasureKind::Density { density: signed, center: vec![0.0, 0.0] }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bump_families_stay_inside_their_ball(seed in 0u64..10_000, radius in 1.0f64..4.0) {
        let grid = PhaseGrid::new(1, 8.0, 64).unwrap();
        for p in bump_family(1, radius, 4, seed, 0) {
            prop_assert!(p.symbol(&grid, radius).is_ok());
        }
    }

    #[test]
    fn extension_is_linear(seed in 0u64..10_000, s in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = circle(16);
        let out = PhaseGrid::new(1, 2.0, 8).unwrap();
        let f = random_values(&mut rng, 16);
        let g = random_values(&mut rng, 16);
        let combo: Vec<C64> = f.iter().zip(&g).map(|(a, b)| a + b * s).collect();
        let lhs = extension_classical(&combo, &mu, &out).unwrap();
        let rhs = extension_classical(&f, &mu, &out).unwrap().add(&extension_classical(&g, &mu, &out).unwrap().scale(C64::new(s, 0.0))).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }
}
