// Brute-force oracles: the full Pauli spectrum of a small state, a Pearson
// test of the sampler against it, and Clifford invariance of the exact SRE.
//
//     cargo run --release --example exact_oracle

use std::collections::HashMap;

use magic_mps::circuits::{apply_circuit, random_clifford_circuit};
use magic_mps::exact::{enumerate_pauli_distribution, exact_sre_many, goodness_of_fit, GoodnessOfFit, StateVector};
use magic_mps::sampler::sample_batch;
use magic_mps::Mps;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct OracleCheck {
    pub total_probability: f64,
    pub fit: GoodnessOfFit,
    pub clifford_shift: f64,
}

pub fn run(n: usize, n_samples: usize, seed: u64) -> magic_mps::Result<OracleCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mps = Mps::random(n, 4, &mut rng)?;
    let exact = StateVector::from_mps(&mps)?;
    let probs = enumerate_pauli_distribution(&exact)?;
    let total_probability: f64 = probs.iter().sum();
    println!("Σ Π over {} strings = {total_probability:.15}", probs.len());

    let mut counts: HashMap<usize, u64> = HashMap::new();
    for r in sample_batch(&mps, n_samples, seed)? {
        *counts.entry(r.string.ordinal()).or_default() += 1;
    }
    let fit = goodness_of_fit(&counts, &probs)?;
    println!(
        "Pearson χ² = {:.1} on {} dof (4σ band ±{:.1}), within: {}",
        fit.statistic,
        fit.dof,
        4.0 * (2.0 * fit.dof as f64).sqrt(),
        fit.within(4.0)
    );

    let before = exact_sre_many(&exact, &[1.0, 2.0])?;
    let circuit = random_clifford_circuit(n, 2 * n, seed)?;
    let (rotated, _) = apply_circuit(&mps, &circuit, 64, 0.0)?;
    let after = exact_sre_many(&StateVector::from_mps(&rotated)?, &[1.0, 2.0])?;
    let clifford_shift = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("m₁, m₂ before {before:?}, after a Clifford circuit {after:?}");
    Ok(OracleCheck { total_probability, fit, clifford_shift })
}

fn main() -> magic_mps::Result<()> {
    run(4, 100_000, 3)?;
    Ok(())
}
