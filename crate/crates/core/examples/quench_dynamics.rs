// Magic and half-chain entanglement after quenching |+…+⟩ with transverse
// and longitudinal fields, with the statevector propagator as reference.
//
//     cargo run --release --example quench_dynamics -- 12 1000

use magic_mps::circuits::{t_state_mps, tebd_evolve, IsingParams, TebdSettings};
use magic_mps::estimator::estimate;
use magic_mps::exact::{exact_evolve, exact_sre, StateVector};
use magic_mps::sampler::sample_batch;

#[derive(Debug)]
pub struct Point {
    pub g: f64,
    pub t: f64,
    pub m2: f64,
    pub dm2: f64,
    pub m2_exact: f64,
    pub s_half: f64,
}

pub fn run(n: usize, n_samples: usize, t_max: f64) -> magic_mps::Result<Vec<Point>> {
    let (dt, every) = (0.025, 20);
    let outputs = (t_max / (dt * every as f64)).round() as usize;
    let mut points = Vec::new();
    for g in [0.0, 0.25] {
        let params = IsingParams::new(0.5, g);
        let settings = TebdSettings::real_time(dt, every).with_truncation(128, 1e-10);
        let mut mps = t_state_mps(n, 0.0)?;
        let psi0 = StateVector::from_mps(&mps)?;
        println!("h = 0.5, g = {g}");
        for k in 1..=outputs {
            mps = tebd_evolve(&mps, &params, &settings)?.0;
            let t = k as f64 * every as f64 * dt;
            let r = estimate(&sample_batch(&mps, n_samples, k as u64)?, 2.0, n)?;
            let m2_exact = exact_sre(&exact_evolve(&psi0, &params, t)?, 2.0)?;
            let s_half = mps.entanglement_entropy(n / 2)?;
            println!("  t = {t:.2}: m̃₂ = {:.5} ± {:.5}, exact {m2_exact:.5}, S_half = {s_half:.4}", r.m_density, r.std_error);
            points.push(Point { g, t, m2: r.m_density, dm2: r.std_error, m2_exact, s_half });
        }
    }
    Ok(points)
}

fn main() -> magic_mps::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    run(args.first().copied().unwrap_or(12), args.get(1).copied().unwrap_or(1000), 2.0)?;
    Ok(())
}
