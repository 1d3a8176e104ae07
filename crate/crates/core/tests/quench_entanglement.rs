//! Longitudinal field suppresses entanglement growth after the quench.

use magic_mps::circuits::{t_state_mps, tebd_evolve, IsingParams, TebdSettings};

fn half_chain_entropy(n: usize, g: f64, t: f64) -> f64 {
    let dt = 0.05;
    let steps = (t / dt).round() as usize;
    let settings = TebdSettings::real_time(dt, steps).with_truncation(64, 1e-10);
    let (mps, _) = tebd_evolve(&t_state_mps(n, 0.0).unwrap(), &IsingParams::new(0.5, g), &settings).unwrap();
    mps.entanglement_entropy(n / 2).unwrap()
}

#[test]
fn longitudinal_field_suppresses_entanglement() {
    let free = half_chain_entropy(20, 0.0, 5.0);
    let confined = half_chain_entropy(20, 0.25, 5.0);
    println!("S_half(t=5): {free:.4} (g=0), {confined:.4} (g=0.25)");
    assert!(confined < free, "S_half {confined} (g=0.25) vs {free} (g=0)");
}
