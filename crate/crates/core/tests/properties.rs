//! Invariants of the sampling pipeline over random states.

use magic_mps::circuits::{apply_circuit, random_clifford_circuit, t_state_mps};
use magic_mps::estimator::estimate_many;
use magic_mps::exact::{enumerate_pauli_distribution, exact_sre_many, StateVector};
use magic_mps::{sample_batch, Mps, PauliString};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_mps(n: usize, chi: usize, seed: u64) -> Mps {
    Mps::random(n, chi, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pauli_distribution_is_normalized(n in 1usize..=5, chi in 1usize..=6, seed in any::<u64>()) {
        let mps = random_mps(n, chi, seed);
        let scale = 0.5f64.powi(n as i32);
        let total: f64 = (0..1usize << (2 * n))
            .map(|o| mps.pauli_expectation(&PauliString::from_ordinal(n, o)).unwrap().powi(2) * scale)
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sampled_probabilities_are_exact(n in 2usize..=7, chi in 1usize..=8, seed in any::<u64>()) {
        let mps = random_mps(n, chi, seed);
        let dist = enumerate_pauli_distribution(&StateVector::from_mps(&mps).unwrap()).unwrap();
        for r in sample_batch(&mps, 50, seed).unwrap() {
            let p = dist[r.string.ordinal()];
            prop_assert!((r.log_prob.exp() - p).abs() <= 1e-10 * p);
            prop_assert!(r.log_prob <= 1e-12);
        }
    }

    #[test]
    fn batches_are_reproducible(n in 1usize..=8, seed in any::<u64>(), count in 1usize..200) {
        let mps = random_mps(n, 4, seed);
        prop_assert_eq!(sample_batch(&mps, count, seed).unwrap(), sample_batch(&mps, count, seed).unwrap());
    }

    #[test]
    fn clifford_circuits_preserve_sre(n in 2usize..=6, depth in 0usize..8, seed in any::<u64>()) {
        let mps = random_mps(n, 4, seed);
        let (rotated, discarded) = apply_circuit(&mps, &random_clifford_circuit(n, depth, seed).unwrap(), 64, 0.0).unwrap();
        prop_assert!(discarded < 1e-12);
        let before = exact_sre_many(&StateVector::from_mps(&mps).unwrap(), &[1.0, 2.0, 3.0]).unwrap();
        let after = exact_sre_many(&StateVector::from_mps(&rotated).unwrap(), &[1.0, 2.0, 3.0]).unwrap();
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert!(before[0] >= before[1] - 1e-12 && before[1] >= before[2] - 1e-12);
    }

    #[test]
    fn stabilizer_circuits_give_zero_estimates(n in 2usize..=12, depth in 0usize..10, seed in any::<u64>()) {
        let (mps, _) = apply_circuit(&t_state_mps(n, 0.0).unwrap(), &random_clifford_circuit(n, depth, seed).unwrap(), 64, 0.0).unwrap();
        for r in estimate_many(&sample_batch(&mps, 100, seed).unwrap(), &[1.0, 2.0], n).unwrap() {
            prop_assert!(r.m_density.abs() < 1e-10, "{:?}", r);
        }
    }

    #[test]
    fn right_normalization_is_idempotent(n in 1usize..=10, chi in 1usize..=8, seed in any::<u64>()) {
        let mps = random_mps(n, chi, seed);
        prop_assert!(mps.right_orthonormality_residual() < 1e-12);
        let again = mps.right_normalize().unwrap();
        let fidelity = StateVector::from_mps(&mps).unwrap().fidelity(&StateVector::from_mps(&again).unwrap());
        prop_assert!((fidelity - 1.0).abs() < 1e-12);
    }
}
