// Wall time of one sample against bond dimension and chain length.
//
//     cargo run --release --example sampling_cost

use magic_mps::harness::{log_log_slope, time_per_sample, BenchBonds};

pub struct Scaling {
    pub chi_exponent: f64,
    pub n_exponent: f64,
}

pub fn run(chis: &[usize], lengths: &[usize], seconds: f64) -> magic_mps::Result<Scaling> {
    let n_fixed = lengths[(lengths.len() - 1) / 2];
    let chi_fixed = chis[(chis.len() - 1) / 2];
    let mut by_chi = Vec::new();
    for &chi in chis {
        let (t, count) = time_per_sample(n_fixed, chi, BenchBonds::Uniform, seconds, 100_000, 1)?;
        println!("N = {n_fixed:>3}, χ = {chi:>3}: {t:.3e} s/sample ({count} timed)");
        by_chi.push((chi as f64, t));
    }
    let mut by_n = Vec::new();
    for &n in lengths {
        let (t, count) = time_per_sample(n, chi_fixed, BenchBonds::Uniform, seconds, 100_000, 1)?;
        println!("N = {n:>3}, χ = {chi_fixed:>3}: {t:.3e} s/sample ({count} timed)");
        by_n.push((n as f64, t));
    }
    let scaling = Scaling { chi_exponent: log_log_slope(&by_chi), n_exponent: log_log_slope(&by_n) };
    println!("fitted exponents: χ^{:.2}, N^{:.2}", scaling.chi_exponent, scaling.n_exponent);
    Ok(scaling)
}

fn main() -> magic_mps::Result<()> {
    run(&[16, 32, 64, 128], &[16, 32, 64], 0.5)?;
    Ok(())
}
