//! Cross-module invariants: parameter-space maps against the dense oracle,
//! the Γ boundary, and classification of the named points.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotinv::dense::{
    self, assemble_alpha, coupled_basis, dense_breuer, dense_pi, dense_theta1, extract_beta, invariant_q, max_abs,
    product_density, projector, rotation_commutator,
};
use rotinv::geometry::{
    d_double_prime_4xn, gamma_hyperplane, intersection_points_4xn, polytope_margin, segment_state_4xn, theta1_polytope,
    vertices_4xn,
};
use rotinv::maps::{breuer_detects, breuer_map, breuer_map_normalized, partial_time_reversal, pi_project, symmetrize};
use rotinv::repr::{random_state, spectrum_from_alpha};
use rotinv::{alpha_to_beta, beta_to_alpha, classify, BetaVector, HalfInt, PureProductState, SpinPair, Verdict, DEFAULT_TOL};

fn small_systems() -> impl Iterator<Item = SpinPair> {
    (2..=8u32).flat_map(|n1| (n1..=64 / n1).map(move |n2| SpinPair::new(n1, n2).unwrap()))
}

fn random_product(s: SpinPair, rng: &mut ChaCha8Rng) -> PureProductState {
    let mut amps = |n: u32| {
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect::<Vec<_>>()
    };
    let a1 = amps(s.n1());
    let a2 = amps(s.n2());
    PureProductState::new(s, a1, a2).unwrap()
}

#[test]
fn dense_identities_for_small_systems() {
    for s in small_systems() {
        let u = coupled_basis(s).matrix;
        let id = dense::CMatrix::identity(s.dim(), s.dim());
        assert!(max_abs(&(u.adjoint() * &u - &id)) < 1e-12, "{s}");
        let mut total = dense::CMatrix::zeros(s.dim(), s.dim());
        for j in s.j_values() {
            let p = projector(s, j).unwrap().matrix;
            assert!(max_abs(&(&p * &p - &p)) < 1e-12);
            assert!((p.trace().re - f64::from(j.multiplicity())).abs() < 1e-12);
            total += p;
        }
        assert!(max_abs(&(total - &id)) < 1e-12);
        for k in 0..s.n1() {
            let q = invariant_q(s, k).unwrap();
            assert!(q.hermiticity_residual() < 1e-12);
            assert!(rotation_commutator(&q) < 1e-9, "{s} K={k}");
            if k > 0 {
                assert!(q.trace().norm() < 1e-12);
            }
            assert!(((&q.matrix * &q.matrix).trace().re - f64::from(2 * k + 1)).abs() < 1e-10);
        }
    }
}

#[test]
fn parameter_maps_match_dense_for_small_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in small_systems() {
        for _ in 0..3 {
            let alpha = random_state(s, &mut rng);
            let beta = alpha_to_beta(&alpha);
            let rho = assemble_alpha(&alpha);
            let phi = extract_beta(&dense_breuer(&rho)).unwrap();
            assert!(phi.max_abs_diff(&breuer_map(&beta).unwrap()) < 1e-10, "{s}");
            let theta = extract_beta(&dense_theta1(&rho)).unwrap();
            assert!(theta.max_abs_diff(&partial_time_reversal(&beta)) < 1e-10, "{s}");

            let p = random_product(s, &mut rng);
            let via_dense = alpha_to_beta(&dense_pi(&product_density(&p)));
            assert!(pi_project(&p).max_abs_diff(&via_dense) < 1e-10, "{s}");
        }
    }
}

#[test]
fn eigenvalue_multiplicities_follow_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n1, n2) in [(4, 4), (4, 7), (6, 8)] {
        let s = SpinPair::new(n1, n2).unwrap();
        let alpha = random_state(s, &mut rng);
        let (dense_spec, residual) = assemble_alpha(&alpha).spectrum();
        assert!(residual < 1e-10);
        let mut expected: Vec<f64> = spectrum_from_alpha(&alpha)
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.eigenvalue, b.multiplicity))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in dense_spec.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn product_state_anchors_via_dense_twirl() {
    for (n1, n2) in [(4, 4), (4, 9), (6, 7)] {
        let s = SpinPair::new(n1, n2).unwrap();
        let top = PureProductState::basis(s, s.j1(), s.j2()).unwrap();
        let d = alpha_to_beta(&dense_pi(&product_density(&top)));
        let expected = alpha_to_beta(&rotinv::repr::projector_state(s, s.j_max()).unwrap());
        assert!(d.max_abs_diff(&expected) < 1e-12);
    }
    let s = SpinPair::new(4, 8).unwrap();
    let e = PureProductState::basis(s, HalfInt::from_twice(-1), s.j2()).unwrap();
    let via_dense = alpha_to_beta(&dense_pi(&product_density(&e)));
    assert!(via_dense.max_abs_diff(&intersection_points_4xn(8).unwrap()[0].beta) < 1e-12);
}

#[test]
fn gamma_maps_onto_lowest_face() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n1, n2) in [(4, 5), (6, 6), (6, 11), (8, 10), (10, 13)] {
        let s = SpinPair::new(n1, n2).unwrap();
        let gamma = gamma_hyperplane(s).unwrap();
        let norm2: f64 = gamma.coefficients.iter().map(|c| c * c).sum();
        for _ in 0..50 {
            let x: Vec<f64> = gamma.coefficients.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let shift = gamma.evaluate_even(&x) / norm2;
            let on: Vec<f64> = x.iter().zip(&gamma.coefficients).map(|(xi, c)| xi - shift * c).collect();
            let beta = BetaVector::from_even(s, &on).unwrap();
            let image = beta_to_alpha(&breuer_map(&beta).unwrap());
            assert!(image.at(s.j_min()).unwrap().abs() < 1e-10, "{s}");
        }
    }
}

#[test]
fn detected_side_of_gamma_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n1, n2) in [(4, 4), (6, 6), (6, 9), (8, 8)] {
        let s = SpinPair::new(n1, n2).unwrap();
        let gamma = gamma_hyperplane(s).unwrap();
        let planes = theta1_polytope(s).unwrap();
        let mut seen = [0usize; 2];
        for _ in 0..4000 {
            let x: Vec<f64> = gamma.coefficients.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
            if polytope_margin(&planes, &x) < 0.0 {
                continue;
            }
            let g = gamma.evaluate_even(&x);
            if g.abs() < 1e-8 {
                continue;
            }
            let detected = breuer_detects(&BetaVector::from_even(s, &x).unwrap(), DEFAULT_TOL).unwrap();
            assert_eq!(detected, g < 0.0, "{s} {x:?}");
            seen[usize::from(detected)] += 1;
        }
        assert!(seen[0] > 0, "{s}: no undetected sample");
    }
}

#[test]
fn classification_of_named_points() {
    let s44 = SpinPair::new(4, 4).unwrap();
    let a = &vertices_4xn(4).unwrap()[0];
    assert_eq!(classify(&a.beta, DEFAULT_TOL).verdict, Verdict::NptEntangled);

    for n in [4, 6, 10] {
        let e = &intersection_points_4xn(n).unwrap()[0];
        assert_eq!(classify(&e.beta, DEFAULT_TOL).verdict, Verdict::KnownSeparable, "N={n}");
        let g2 = symmetrize(&intersection_points_4xn(n).unwrap()[2].beta);
        let c = classify(&g2, DEFAULT_TOL);
        assert_eq!(c.verdict, Verdict::PptBoundEntangledDetected, "N={n}");
        assert!(c.is_ppt && c.breuer_detected == Some(true) && !c.known_separable);
    }

    // between D'' and G''
    let mid = segment_state_4xn(4, 0.875).unwrap();
    assert_eq!(classify(&mid, DEFAULT_TOL).verdict, Verdict::PptBoundEntangledDetected);
    let d2 = d_double_prime_4xn(4).unwrap().beta;
    assert_eq!(classify(&d2, DEFAULT_TOL).verdict, Verdict::KnownSeparable);
    assert_eq!(classify(&BetaVector::identity_state(s44), DEFAULT_TOL).verdict, Verdict::KnownSeparable);

    let s68 = SpinPair::new(6, 8).unwrap();
    assert_eq!(classify(&BetaVector::identity_state(s68), DEFAULT_TOL).verdict, Verdict::PptUndetermined);
}

fn theta_invariant_state() -> impl Strategy<Value = BetaVector> {
    (2u32..=4, 0u32..=6, proptest::collection::vec(0.0f64..1.0, 8)).prop_map(|(h, extra, w)| {
        // convex mixture of the ϑ₁-symmetrized extreme states
        let s = SpinPair::new(2 * h, 2 * h + extra).unwrap();
        let total: f64 = w.iter().take(s.len()).sum::<f64>().max(1e-9);
        let mut coords = vec![0.0; s.len()];
        for (j, wj) in s.j_values().iter().zip(&w) {
            let b = symmetrize(&alpha_to_beta(&rotinv::repr::projector_state(s, *j).unwrap()));
            for (c, x) in coords.iter_mut().zip(b.coords()) {
                *c += wj / total * x;
            }
        }
        coords[0] = 1.0;
        BetaVector::new(s, coords).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn breuer_criterion_equals_simplified_form(beta in theta_invariant_state()) {
        // ϑ₁-invariant ϱ: Φ₁(ϱ) ≥ 0 iff (1/n2)𝟙⊗𝟙 − 2ϱ ≥ 0
        let s = beta.system();
        let rho = spectrum_from_alpha(&beta_to_alpha(&beta));
        let simplified = rho.iter().map(|b| 1.0 / f64::from(s.n2()) - 2.0 * b.eigenvalue).fold(f64::INFINITY, f64::min);
        let image = beta_to_alpha(&breuer_map_normalized(&beta).unwrap()).min();
        if simplified.abs() > 1e-9 {
            prop_assert_eq!(image < 0.0, simplified < 0.0);
        }
    }
}
