// Error statistics of m̃₂ on the product state with Bloch weights
// p = (1/3, 1/3, 1/3), where q₂ = 3^{−N} and the mean of
// Z₂ = (q̃₂ − q₂)²/q₂² is known in closed form.
//
//     cargo run --release --example product_state_statistics -- 50 1000 200

use magic_mps::circuits::bloch_product_mps;
use magic_mps::estimator::{error_bound_from_z, estimate, expected_z2, product_state_q2, z_statistic, ProductStateParams};
use magic_mps::sampler::sample_batch;

pub struct ProductStats {
    pub m_exact: f64,
    pub mean_rel_error: f64,
    pub p_below_5pct: f64,
    pub rel_bound: f64,
    pub z_mean: f64,
    pub z_expected: f64,
}

pub fn run(n: usize, n_samples: usize, repetitions: usize) -> magic_mps::Result<ProductStats> {
    let params = ProductStateParams::uniform();
    let mps = bloch_product_mps(n, params.as_array())?;
    let q_exact = product_state_q2(&params, n);
    let m_exact = -q_exact.ln() / n as f64 - std::f64::consts::LN_2;
    let mut rel = Vec::with_capacity(repetitions);
    let mut z = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let r = estimate(&sample_batch(&mps, n_samples, rep as u64)?, 2.0, n)?;
        rel.push((r.m_density - m_exact).abs() / m_exact);
        z.push(z_statistic(r.q_estimate, q_exact));
    }
    let reps = repetitions as f64;
    let mean_rel_error = rel.iter().sum::<f64>() / reps;
    let p_below_5pct = rel.iter().filter(|&&e| e < 0.05).count() as f64 / reps;
    let z_expected = expected_z2(&params, n, n_samples);
    let z_mean = z.iter().sum::<f64>() / reps;
    let rel_bound = error_bound_from_z(z_expected, 2.0, n)? / m_exact;
    println!("N = {n}, N_s = {n_samples}, {repetitions} runs; m₂ = ln(3/2) = {m_exact:.6}, q₂ = 3^-N = {q_exact:e}");
    println!("mean relative error {mean_rel_error:.4} (bound from E[Z₂]: {rel_bound:.4})");
    println!("P(relative error < 5%) = {p_below_5pct:.3}");
    println!("mean Z₂ {z_mean:.4e}, closed form {z_expected:.4e}");
    Ok(ProductStats { m_exact, mean_rel_error, p_below_5pct, rel_bound, z_mean, z_expected })
}

fn main() -> magic_mps::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run(
        args.first().copied().unwrap_or(50),
        args.get(1).copied().unwrap_or(1000),
        args.get(2).copied().unwrap_or(200),
    )?;
    Ok(())
}
