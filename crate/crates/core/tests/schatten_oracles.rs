use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qha_core::grid::{euclid_convolve, symplectic_fourier, ConfigGrid, Geometry, PhaseFunction, PhaseGrid};
use qha_core::hermite::{CoefficientArray, HermiteBasis, SYMPLECTIC_SCALE};
use qha_core::linalg::CMatrix;
use qha_core::schatten::{
    conjugate_by_rho, default_werner_grid, ideal_bound_check, is_positive, matrix_spectrum, parity_conjugate, schatten_norm,
    singular_values, werner_convolve, werner_points, young_check, SingularSpectrum,
};
use qha_core::weyl::{integrated_rep, quantize, rho_point_matrix, OperatorMatrix, RhoCache};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn phase() -> PhaseGrid {
    PhaseGrid::new(1, 8.0, 256).unwrap()
}

fn basis() -> HermiteBasis {
    HermiteBasis::with_scale(ConfigGrid::new(1, 8.0, 256).unwrap(), 64, SYMPLECTIC_SCALE).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let data = (0..rows * cols).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CMatrix::from_vec(rows, cols, data).unwrap()
}

fn reference_singular_values(m: &CMatrix) -> Vec<f64> {
    let a = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

#[test]
fn singular_values_agree_with_reference_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (r, c) in [(5, 5), (20, 20), (64, 64), (12, 30), (30, 12)] {
        let m = random_matrix(&mut rng, r, c);
        let ours = matrix_spectrum(&m).unwrap();
        let reference = reference_singular_values(&m);
        let s0 = reference[0];
        for (a, b) in ours.values().iter().zip(&reference) {
            if *b > 1e-12 * s0 {
                assert!((a - b).abs() <= 1e-10 * b, "{r}x{c}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn small_spectra() {
    let diag = CMatrix::diagonal(&[C64::new(3.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
    assert_eq!(matrix_spectrum(&diag).unwrap().values(), &[3.0, 2.0, 1.0]);
    let mut f = vec![C64::new(0.0, 0.0); 4];
    f[1] = C64::new(0.0, 3.0);
    let mut e0 = vec![C64::new(0.0, 0.0); 4];
    e0[0] = C64::new(1.0, 0.0);
    let s = matrix_spectrum(&CMatrix::outer(&f, &e0)).unwrap();
    assert!((s.values()[0] - 3.0).abs() < 1e-14);
    assert!(s.values()[1..].iter().all(|v| v.abs() < 1e-14));
    assert!(SingularSpectrum::new(vec![1.0, 2.0]).is_err());
    assert!(SingularSpectrum::new(vec![1.0, -0.5]).is_err());
    assert!(SingularSpectrum::new(vec![2.0, 1.0]).unwrap().schatten(0.5).is_err());
}

#[test]
fn truncated_rho_is_nearly_isometric_on_low_orders() {
    let b = basis();
    for z in [[0.6, -0.8], [1.0, 0.0], [-0.3, 0.5]] {
        let r = rho_point_matrix(&z, &b).unwrap();
        let block = CMatrix::from_fn(64, 32, |i, j| r.entries()[(i, j)]);
        let s = matrix_spectrum(&block).unwrap();
        for v in s.values() {
            assert!((v - 1.0).abs() <= 1e-4, "z={z:?}: {v}");
        }
    }
}

fn coeffs(rng: &mut ChaCha8Rng, m: usize, active: usize) -> CoefficientArray {
    let values = (0..m)
        .map(|k| if k < active { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { C64::new(0.0, 0.0) })
        .collect();
    CoefficientArray::new(1, m, values).unwrap()
}

#[test]
fn rank_one_schatten_law() {
    let b = basis();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let f = coeffs(&mut rng, 64, 64);
        let g = coeffs(&mut rng, 64, 64);
        let t = OperatorMatrix::rank_one(&b, &f, &g);
        let want = f.energy().sqrt() * g.energy().sqrt();
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let n = schatten_norm(&t, p).unwrap().norm;
            assert!((n - want).abs() <= 1e-8 * want, "p={p}: {n} vs {want}");
        }
        assert!((schatten_norm(&t, 2.0).unwrap().norm - t.frobenius_norm()).abs() <= 1e-12 * want);
    }
}

#[test]
fn parity_conjugation_matches_quadrature() {
    let b = basis();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = OperatorMatrix::new(b.clone(), random_matrix(&mut rng, 64, 64)).unwrap();
    let p = CMatrix::from_fn(64, 64, |j, k| {
        let reflected = b.function(k).reflect();
        let h = b.grid().step();
        b.row(j).iter().zip(reflected.values().as_slice()).map(|(a, v)| v * *a).sum::<C64>() * h
    });
    let want = p.matmul(t.entries()).unwrap().matmul(&p).unwrap();
    assert!(parity_conjugate(&t).entries().max_abs_diff(&want) < 1e-10);
    let p1 = OperatorMatrix::projector(&b, 1);
    assert_eq!(parity_conjugate(&p1).entries(), p1.entries());
}

fn gaussian_rep(b: &HermiteBasis, a: f64, c: [f64; 2]) -> OperatorMatrix {
    let f = PhaseFunction::from_fn(phase(), move |z| C64::new((-PI * a * ((z[0] - c[0]).powi(2) + (z[1] - c[1]).powi(2))).exp(), 0.0));
    integrated_rep(&f, b).unwrap()
}

#[test]
fn conjugation_by_rho_preserves_spectrum_and_trace() {
    let b = basis();
    let cache = RhoCache::new(&b);
    let t = gaussian_rep(&b, 1.4, [0.2, -0.1]);
    assert!(conjugate_by_rho(&t, &[0.0, 0.0], &cache).unwrap().entries().max_abs_diff(t.entries()) < 1e-10);
    let before = singular_values(&t).unwrap();
    for w in [[0.5, 0.25], [-1.0, 0.75], [1.5, -1.5]] {
        let after = singular_values(&conjugate_by_rho(&t, &w, &cache).unwrap()).unwrap();
        let s0 = before.s0();
        for (x, y) in before.values().iter().zip(after.values()) {
            assert!((x - y).abs() <= 1e-4 * s0, "w={w:?}");
        }
    }
    let p0 = OperatorMatrix::projector(&b, 0);
    let moved = conjugate_by_rho(&p0, &[1.0, -0.5], &cache).unwrap();
    assert!((moved.trace() - C64::new(1.0, 0.0)).norm() < 1e-6);
}

#[test]
fn ground_projector_self_convolution_unscaled() {
    let b = HermiteBasis::new(ConfigGrid::new(1, 16.0, 512).unwrap(), 16).unwrap();
    let p0 = OperatorMatrix::projector(&b, 0);
    let eval = PhaseGrid::new(1, 4.0, 64).unwrap();
    let out = werner_convolve(&p0, &p0, &eval).unwrap();
    let want = PhaseFunction::from_fn(eval, |z| C64::new((-z[0] * z[0] / 2.0 - 2.0 * PI * PI * z[1] * z[1]).exp(), 0.0));
    assert!(out.values.max_abs_diff(&want).unwrap() < 1e-5);
    assert!(out.positive_inputs && out.positivity_consistent(1e-8));
}

fn random_positive(b: &HermiteBasis, rng: &mut ChaCha8Rng, active: usize, rank: usize) -> OperatorMatrix {
    let mut a = CMatrix::zeros(64, rank);
    for i in 0..active {
        for j in 0..rank {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    OperatorMatrix::new(b.clone(), a.matmul(&a.adjoint()).unwrap()).unwrap()
}

#[test]
fn werner_convolution_is_commutative_and_positive() {
    let b = basis();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let eval = PhaseGrid::new(1, 2.0, 16).unwrap();
    for _ in 0..3 {
        let t1 = random_positive(&b, &mut rng, 12, 3);
        let t2 = random_positive(&b, &mut rng, 12, 2);
        assert!(is_positive(&t1) && is_positive(&t2));
        let a = werner_convolve(&t1, &t2, &eval).unwrap();
        let c = werner_convolve(&t2, &t1, &eval).unwrap();
        assert!(a.values.max_abs_diff(&c.values).unwrap() < 1e-6);
        assert!(a.positivity_consistent(1e-8), "{} {}", a.max_imaginary, a.min_real);
    }
}

#[test]
fn lattice_werner_path_matches_pointwise_traces() {
    let b = basis();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let eval = PhaseGrid::new(1, 2.0, 16).unwrap();
    let points: Vec<Vec<f64>> = (0..eval.len()).map(|k| eval.point(k)).collect();
    let t1 = random_positive(&b, &mut rng, 10, 2);
    let mut t2 = random_matrix(&mut rng, 64, 64);
    for i in 0..64 {
        for j in 0..64 {
            if i >= 10 || j >= 10 {
                t2[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    let t2 = OperatorMatrix::new(b.clone(), t2).unwrap();
    let fast = werner_convolve(&t1, &t2, &eval).unwrap();
    let direct = werner_points(&t1, &t2, &points).unwrap();
    let scale = direct.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let worst = fast.values.values().as_slice().iter().zip(&direct).fold(0.0f64, |a, (u, v)| a.max((u - v).norm()));
    assert!(worst <= 1e-8 * scale, "{worst} vs {scale}");
}

#[test]
fn young_inequality_including_equality_case() {
    let b = basis();
    let eval = default_werner_grid(&phase());
    let p0 = OperatorMatrix::projector(&b, 0);
    let eq = young_check(&p0, &p0, 1.0, 1.0, 1.0, &eval).unwrap();
    assert!((eq.lhs - 1.0).abs() < 1e-6 && (eq.rhs - 1.0).abs() < 1e-12);
    assert!(eq.satisfied);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, q, r) in [(1.0, 1.0, 1.0), (2.0, 2.0, f64::INFINITY), (1.0, 2.0, 2.0), (1.5, 1.2, 1.0 / (1.0 / 1.5 + 1.0 / 1.2 - 1.0))] {
        let t1 = random_positive(&b, &mut rng, 10, 2);
        let t2 = random_positive(&b, &mut rng, 10, 3);
        let rep = young_check(&t1, &t2, p, q, r, &eval).unwrap();
        assert!(rep.satisfied && rep.slack >= -1e-6, "{rep:?}");
    }
    assert!(young_check(&p0, &p0, 2.0, 2.0, 2.0, &eval).is_err());
}

#[test]
fn ideal_bound() {
    let b = basis();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = OperatorMatrix::new(b.clone(), random_matrix(&mut rng, 64, 64)).unwrap();
    let id = OperatorMatrix::identity(&b);
    for p in [1.0, 2.0, f64::INFINITY] {
        let r = ideal_bound_check(&id, &t, &id, p).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-10 * r.rhs && r.satisfied);
        let zero = ideal_bound_check(&OperatorMatrix::zeros(&b), &t, &id, p).unwrap();
        assert_eq!(zero.lhs, 0.0);
    }
    let u = rho_point_matrix(&[0.5, -0.5], &b).unwrap();
    let v = rho_point_matrix(&[-0.25, 0.75], &b).unwrap();
    let low = gaussian_rep(&b, 1.2, [0.0, 0.0]);
    for p in [1.0, 2.0, f64::INFINITY] {
        let r = ideal_bound_check(&u, &low, &v, p).unwrap();
        assert!(r.lhs / r.rhs <= 1.0 + 1e-4);
    }
}

#[test]
fn star_identity_on_gaussian_pairs() {
    let b = basis();
    let eval = default_werner_grid(&phase());
    for (a1, a2, c) in [(1.0, 1.0, [0.0, 0.0]), (0.7, 1.3, [0.4, -0.3]), (1.6, 0.9, [-0.2, 0.5])] {
        let f1 = PhaseFunction::from_fn(phase(), move |z| C64::new((-PI * a1 * (z[0] * z[0] + z[1] * z[1])).exp(), 0.0));
        let modulation = if c == [0.0, 0.0] { 0.0 } else { 0.6 };
        let f2 = PhaseFunction::from_fn(phase(), move |z| {
            C64::from_polar((-PI * a2 * ((z[0] - c[0]).powi(2) + (z[1] - c[1]).powi(2))).exp(), modulation * z[1])
        });
        let lhs = werner_convolve(&integrated_rep(&f1, &b).unwrap(), &integrated_rep(&f2, &b).unwrap(), &eval).unwrap();
        let product = symplectic_fourier(&f1.mul(&f2).unwrap()).resample(eval).unwrap();
        let convolved = euclid_convolve(&symplectic_fourier(&f1), &symplectic_fourier(&f2)).unwrap().resample(eval).unwrap();
        if c == [0.0, 0.0] {
            let s = a1 + a2;
            let exact = PhaseFunction::from_fn(eval, move |w| C64::new((-PI * (w[0] * w[0] + w[1] * w[1]) / s).exp() / s, 0.0));
            assert!(lhs.values.max_abs_diff(&exact).unwrap() < 1e-4);
        }
        assert!(lhs.values.max_abs_diff(&product).unwrap() < 1e-4);
        assert!(lhs.values.max_abs_diff(&convolved).unwrap() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schatten_norms_are_monotone(seed in 0u64..1000, n in 2usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = matrix_spectrum(&random_matrix(&mut rng, n, n)).unwrap();
        let ps = [1.0, 1.5, 2.0, 3.0, 8.0, f64::INFINITY];
        for w in ps.windows(2) {
            prop_assert!(s.schatten(w[1]).unwrap() <= s.schatten(w[0]).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn svd_reconstructs_spectrum_under_unitary_scaling(seed in 0u64..1000, phase_angle in 0.0f64..(2.0 * PI)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, 10, 10);
        let rotated = m.scale(C64::from_polar(1.0, phase_angle));
        let a = matrix_spectrum(&m).unwrap();
        let b = matrix_spectrum(&rotated).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * a.s0());
        }
    }
}

#[test]
fn schatten_norms_are_translation_invariant() {
    let b = basis();
    let a = PhaseFunction::from_fn(phase(), |z| C64::from_polar((-PI * 1.5 * (z[0] * z[0] + 2.0 * z[1] * z[1])).exp(), 0.8 * z[0] * z[1]));
    let base = singular_values(&quantize(&a, &b).unwrap()).unwrap();
    for w in [[1.0, 0.0], [0.0, -1.5], [1.25, -1.25], [-2.0, 0.0], [0.5, 1.875]] {
        let moved = singular_values(&quantize(&a.translate(&w).unwrap(), &b).unwrap()).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            let (x, y) = (base.schatten(p).unwrap(), moved.schatten(p).unwrap());
            assert!((x - y).abs() <= 1e-3 * x, "w={w:?} p={p}: {x} vs {y}");
        }
    }
}

#[test]
fn inverse_estimate() {
    let b = basis();
    let grid = phase();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..4 {
        let (c0, c1, m) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let u = PhaseFunction::from_fn(grid, move |z| {
            let r2 = ((z[0] - c0) / 0.7).powi(2) + ((z[1] - c1) / 0.7).powi(2);
            if r2 > 1.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::from_polar((-3.0 * r2).exp() * (1.0 - r2).powi(3), 2.0 * PI * m * z[0])
            }
        });
        let a = rng.gen_range(0.8..2.0);
        let cutoff = PhaseFunction::from_fn(grid, move |z| C64::new((-PI * a * (z[0] * z[0] + z[1] * z[1])).exp(), 0.0));
        let lhs_fn = symplectic_fourier(&cutoff.mul(&u).unwrap());
        let s1 = schatten_norm(&integrated_rep(&cutoff, &b).unwrap(), 1.0).unwrap().norm;
        let tu = singular_values(&integrated_rep(&u, &b).unwrap()).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            let lhs = lhs_fn.lp_norm(p).unwrap();
            let rhs = s1 * tu.schatten(p).unwrap();
            assert!(lhs <= rhs / (1.0 - 1e-6), "p={p}: {lhs} > {rhs}");
        }
    }
}
