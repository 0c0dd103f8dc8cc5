//! Invariants checked over random parameters.

use proptest::prelude::*;
use speclab::baker::{
    baker_unitary, classical_entropy, momentum_shift, sloppy_baker_channel, BakerParams, ShiftMode,
};
use speclab::channels::{
    choi_matrix, is_completely_positive, is_trace_preserving, superoperator_from_kraus, KrausSet,
};
use speclab::ensembles::{
    environmental_channel, projected_unitary_channel, random_external_fields, real_ginibre,
};
use speclab::matrix::{haar_unitary, random_pure_state, trace_norm, ComplexMatrix, DensityMatrix};
use speclab::rng::RngState;
use speclab::spectral::{edelman_expected_real, real_spectrum, spectrum_report};
use speclab::Complex64;

fn channel(kind: u8, n: usize, m: usize, rng: &mut RngState) -> KrausSet {
    match kind % 3 {
        0 => environmental_channel(n, m, rng),
        1 => random_external_fields(n, m, None, rng),
        _ => {
            let divisors: Vec<usize> = (2..=n).filter(|d| n.is_multiple_of(*d)).collect();
            projected_unitary_channel(n, divisors[m % divisors.len()], rng)
        }
    }
    .unwrap()
}

fn mixed_state(n: usize, rng: &mut RngState) -> ComplexMatrix {
    let a = DensityMatrix::pure(&random_pure_state(n, rng)).into_matrix();
    let b = DensityMatrix::pure(&random_pure_state(n, rng)).into_matrix();
    &a.scale(Complex64::new(0.25, 0.0)) + &b.scale(Complex64::new(0.75, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_channels_are_cptp(kind in 0u8..3, n in 2usize..6, m in 1usize..8, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let k = channel(kind, n, m, &mut rng);
        prop_assert!(is_trace_preserving(&k).residual < 1e-10);
        prop_assert!(is_completely_positive(&superoperator_from_kraus(&k)).unwrap().completely_positive);
    }

    #[test]
    fn spectrum_has_unit_leading_eigenvalue_and_counts_add_up(
        kind in 0u8..3, n in 2usize..5, m in 1usize..6, seed in any::<u64>()
    ) {
        let mut rng = RngState::new(seed);
        let s = superoperator_from_kraus(&channel(kind, n, m, &mut rng));
        let r = spectrum_report(&s, true).unwrap();
        prop_assert!((r.eigenvalues[0] - 1.0).norm() < 1e-8);
        prop_assert!(r.eigenvalues.iter().all(|z| z.norm() <= 1.0 + 1e-8));
        prop_assert_eq!(1 + r.real_count + r.complex_count, n * n);
        prop_assert_eq!(r.complex_count % 2, 0);
    }

    #[test]
    fn complex_eigenvalues_come_in_conjugate_pairs(kind in 0u8..3, n in 2usize..5, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let s = superoperator_from_kraus(&channel(kind, n, 3, &mut rng));
        let r = spectrum_report(&s, true).unwrap();
        for (z, &real) in r.eigenvalues.iter().zip(&r.real_flags) {
            if real {
                prop_assert_eq!(z.im, 0.0);
            } else {
                let partner = r.eigenvalues.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(partner < 1e-12);
            }
        }
    }

    #[test]
    fn choi_reshuffle_round_trips(kind in 0u8..3, n in 2usize..5, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let s = superoperator_from_kraus(&channel(kind, n, 2, &mut rng));
        let c = choi_matrix(&s);
        prop_assert!((c.matrix().trace() - 1.0).norm() < 1e-12);
        let back = c.to_superoperator();
        prop_assert!((back.matrix() - s.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn kraus_and_superoperator_agree(kind in 0u8..3, n in 2usize..6, m in 1usize..6, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let k = channel(kind, n, m, &mut rng);
        let rho = mixed_state(n, &mut rng);
        let a = k.apply(&rho).unwrap();
        let b = superoperator_from_kraus(&k).apply(&rho).unwrap();
        prop_assert!((&a - &b).max_abs() < 1e-12);
        prop_assert!((a.trace() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant(n in 2usize..7, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let x = &mixed_state(n, &mut rng) - &mixed_state(n, &mut rng);
        let u = haar_unitary(n, &mut rng);
        let y = u.matmul(&x).mul_adjoint(&u);
        let (a, b) = (trace_norm(&x).unwrap(), trace_norm(&y).unwrap());
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!(a <= 2.0 + 1e-12);
    }

    #[test]
    fn baker_and_shift_are_unitary(half in 1usize..17, power in -40i64..40) {
        let n = 2 * half;
        prop_assert!(momentum_shift(n, power).unitarity_residual() < 1e-12);
        for k in (2..=n).filter(|k| n % k == 0) {
            prop_assert!(baker_unitary(n, k).unwrap().unitarity_residual() < 1e-11);
        }
    }

    #[test]
    fn sloppy_baker_is_cptp(half in 2usize..7, l in 1u32..4, quarter_steps in 0usize..3) {
        let n = 2 * half;
        let delta = (2 * quarter_steps) as f64 / n as f64;
        let k = sloppy_baker_channel(&BakerParams { n, k: 2, l, m: 2, delta, shift_mode: ShiftMode::Top }).unwrap();
        prop_assert!(is_trace_preserving(&k).residual < 1e-10);
        let r = spectrum_report(&superoperator_from_kraus(&k), true).unwrap();
        prop_assert!(r.eigenvalues.iter().all(|z| z.norm() <= 1.0 + 1e-8));
    }

    #[test]
    fn ginibre_spectrum_is_conjugation_closed(n in 1usize..12, seed in any::<u64>()) {
        let mut rng = RngState::new(seed);
        let s = real_spectrum(&real_ginibre(n, &mut rng)).unwrap();
        prop_assert_eq!((n - s.real_count) % 2, 0);
        prop_assert_eq!(s.eigenvalues.len(), n);
    }
}

#[test]
fn entropy_decreases_with_k() {
    let h: Vec<f64> = (2..40).map(|k| classical_entropy(k).unwrap()).collect();
    assert!(h.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn expected_real_count_increases_with_n() {
    let e: Vec<f64> = (1..80).map(|n| edelman_expected_real(n).unwrap()).collect();
    assert!(e.windows(2).all(|w| w[1] > w[0]));
    assert!((e[0] - 1.0).abs() < 1e-12);
}
