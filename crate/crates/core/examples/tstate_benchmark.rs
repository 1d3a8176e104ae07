// T-state products scrambled by a random Clifford circuit: sampled SRE
// densities against the closed forms, with Δ = (m − m̃)/δm̃.
//
//     cargo run --release --example tstate_benchmark -- 10 10000

use std::f64::consts::FRAC_PI_2;

use magic_mps::circuits::{apply_circuit, random_clifford_circuit, t_state_density, t_state_mps};
use magic_mps::estimator::estimate_many;
use magic_mps::harness::deviation;
use magic_mps::sampler::sample_batch;

#[derive(Debug)]
pub struct Row {
    pub phi: f64,
    pub renyi_n: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub delta: f64,
}

pub fn run(n: usize, n_samples: usize, grid_points: usize) -> magic_mps::Result<Vec<Row>> {
    let circuit = random_clifford_circuit(n, n, 2024)?;
    let mut rows = Vec::new();
    println!("{:>8} {:>3} {:>10} {:>10} {:>10} {:>7} {:>4}", "phi", "n", "m~", "dm~", "m", "delta", "chi");
    for k in 0..grid_points {
        let phi = k as f64 * FRAC_PI_2 / (grid_points - 1).max(1) as f64;
        let (mps, _) = apply_circuit(&t_state_mps(n, phi)?, &circuit, 256, 0.0)?;
        let records = sample_batch(&mps, n_samples, k as u64)?;
        for r in estimate_many(&records, &[1.0, 2.0], n)? {
            let analytic = t_state_density(phi, r.renyi_n);
            let delta = deviation(analytic, r.m_density, r.std_error);
            println!(
                "{phi:>8.4} {:>3} {:>10.6} {:>10.6} {analytic:>10.6} {delta:>7.2} {:>4}",
                r.renyi_n,
                r.m_density,
                r.std_error,
                mps.max_bond()
            );
            rows.push(Row { phi, renyi_n: r.renyi_n, estimate: r.m_density, std_error: r.std_error, analytic, delta });
        }
    }
    let within = rows.iter().filter(|r| r.delta.abs() <= 3.0).count();
    println!("{within}/{} rows with |Δ| ≤ 3", rows.len());
    Ok(rows)
}

fn main() -> magic_mps::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run(args.first().copied().unwrap_or(10), args.get(1).copied().unwrap_or(10_000), 9)?;
    Ok(())
}
