// Monte-Carlo SRE densities with error bars, against the T-state closed form.
//
//     cargo run --release --example estimate_sre -- 20 10000

use magic_mps::circuits::{t_state_density, t_state_mps};
use magic_mps::estimator::{estimate_many, results_to_csv, EstimateResult};
use magic_mps::sampler::sample_batch;

pub fn run(n: usize, n_samples: usize, phi: f64) -> magic_mps::Result<Vec<(EstimateResult, f64)>> {
    let mps = t_state_mps(n, phi)?;
    let records = sample_batch(&mps, n_samples, 11)?;
    let results = estimate_many(&records, &[1.0, 2.0, 3.0], n)?;
    print!("{}", results_to_csv(&results));
    Ok(results
        .into_iter()
        .map(|r| {
            let exact = t_state_density(phi, r.renyi_n);
            println!(
                "n = {}: m̃ = {:.5} ± {:.5}, exact {:.5}, total M̃ = {:.4}",
                r.renyi_n,
                r.m_density,
                r.std_error,
                exact,
                r.total()
            );
            (r, exact)
        })
        .collect())
}

fn main() -> magic_mps::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run(args.first().copied().unwrap_or(20), args.get(1).copied().unwrap_or(10_000), 0.6)?;
    Ok(())
}
