// Perfect sampling of Pauli strings and the record line format.
//
//     cargo run --release --example sample_records -- 10 2000

use magic_mps::circuits::{apply_circuit, random_clifford_circuit, t_state_mps};
use magic_mps::exact::StateVector;
use magic_mps::sampler::{read_records, sample_batch, write_records};
use magic_mps::SampleRecord;

pub struct Sampled {
    pub records: Vec<SampleRecord>,
    /// Largest relative gap between `exp(log_prob)` and `⟨σ⟩²/2^N`.
    pub worst_relative_error: f64,
}

pub fn run(n: usize, n_samples: usize, seed: u64) -> magic_mps::Result<Sampled> {
    let circuit = random_clifford_circuit(n, n, seed)?;
    let (mps, _) = apply_circuit(&t_state_mps(n, std::f64::consts::FRAC_PI_4)?, &circuit, 64, 0.0)?;
    println!("state: U_C |T⟩^⊗{n}, bonds {:?}", mps.bond_dims());

    let records = sample_batch(&mps, n_samples, seed)?;
    let mut buf = Vec::new();
    write_records(&records, &mut buf)?;
    let text = String::from_utf8(buf).expect("ascii records");
    for line in text.lines().take(3) {
        println!("  {line}");
    }
    // the file keeps the string and log probability, not the conditionals
    let reread = read_records(text.as_bytes())?;
    assert!(reread.iter().zip(&records).all(|(a, b)| a.string == b.string && a.log_prob == b.log_prob));

    let exact = StateVector::from_mps(&mps)?;
    let scale = 0.5f64.powi(n as i32);
    let mut worst_relative_error = 0.0f64;
    for r in &records {
        let e = exact.pauli_expectation(&r.string)?;
        let pi = e * e * scale;
        worst_relative_error = worst_relative_error.max((r.log_prob.exp() - pi).abs() / pi);
    }
    println!("{} records; worst |Π̃ − Π|/Π = {worst_relative_error:.2e}", records.len());
    Ok(Sampled { records, worst_relative_error })
}

fn main() -> magic_mps::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run(args.first().copied().unwrap_or(10), args.get(1).copied().unwrap_or(2000), 7)?;
    Ok(())
}
