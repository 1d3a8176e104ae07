// Sampling the Pauli distribution of a subsystem of a pure MPS, started from
// the Schmidt spectrum of the cut.
//
//     cargo run --release --example reduced_state

use magic_mps::exact::{enumerate_reduced_distribution, StateVector};
use magic_mps::sampler::ReducedState;
use magic_mps::Mps;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct ReducedCheck {
    pub purity: f64,
    pub exact_purity: f64,
    /// Largest `|Π̃ − Π|` over the sampled strings.
    pub worst_probability_error: f64,
}

pub fn run(n: usize, first: usize, n_samples: usize) -> magic_mps::Result<ReducedCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mps = Mps::random(n, 4, &mut rng)?;
    let reduced = ReducedState::new(&mps, first)?;
    let exact = StateVector::from_mps(&mps)?;
    let rho = exact.reduced_density_matrix(first);
    let exact_purity: f64 = rho.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let purity = reduced.purity();
    println!("sites {first}..{n}: Schmidt values {:?}", reduced.schmidt_values);
    println!("purity from Λ⁴: {purity:.12}, from ρ: {exact_purity:.12}");

    let probs = enumerate_reduced_distribution(&exact, first)?;
    let records = reduced.sample_batch(n_samples, 9)?;
    let worst_probability_error = records
        .iter()
        .map(|r| (r.log_prob.exp() - probs[r.string.ordinal()]).abs())
        .fold(0.0, f64::max);
    println!("{} strings of {} letters, worst |Π̃ − Π| = {worst_probability_error:.2e}", records.len(), n - first);
    Ok(ReducedCheck { purity, exact_purity, worst_probability_error })
}

fn main() -> magic_mps::Result<()> {
    run(8, 4, 1000)?;
    Ok(())
}
