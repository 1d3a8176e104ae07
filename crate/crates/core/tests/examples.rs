//! Each runnable example, driven at small scale.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(mps_basics);
example!(sample_records);
example!(estimate_sre);
example!(exact_oracle);
example!(reduced_state);
example!(tstate_benchmark);
example!(product_state_statistics);
example!(ising_ground_state);
example!(quench_dynamics);
example!(sampling_cost);
example!(experiment_config);

use std::f64::consts::{FRAC_PI_4, LN_2};

#[test]
fn mps_basics_runs() {
    let b = mps_basics::run(6).unwrap();
    assert!((b.bell_entropy - LN_2).abs() < 1e-12);
    assert!((b.ghz_zz - 1.0).abs() < 1e-12);
    assert!(b.random_residual < 1e-12);
    assert!((b.roundtrip_fidelity - 1.0).abs() < 1e-12);
}

#[test]
fn sample_records_match_exact_probabilities() {
    let s = sample_records::run(8, 500, 3).unwrap();
    assert_eq!(s.records.len(), 500);
    assert!(s.worst_relative_error < 1e-10);
}

#[test]
fn estimate_sre_tracks_closed_forms() {
    for (r, exact) in estimate_sre::run(8, 4000, FRAC_PI_4).unwrap() {
        assert!((r.m_density - exact).abs() < 5.0 * r.std_error + 1e-12, "{r:?} vs {exact}");
    }
}

#[test]
fn exact_oracle_agrees_with_sampler() {
    let c = exact_oracle::run(4, 20_000, 11).unwrap();
    assert!((c.total_probability - 1.0).abs() < 1e-12);
    assert!(c.fit.within(4.0), "{:?}", c.fit);
    assert!(c.clifford_shift < 1e-10);
}

#[test]
fn reduced_state_probabilities() {
    let c = reduced_state::run(8, 4, 300).unwrap();
    assert!((c.purity - c.exact_purity).abs() < 1e-12);
    assert!(c.worst_probability_error < 1e-12);
}

#[test]
fn tstate_benchmark_deviations() {
    let rows = tstate_benchmark::run(6, 3000, 5).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.delta.abs() < 4.0), "{rows:?}");
}

#[test]
fn product_state_statistics_within_bound() {
    let s = product_state_statistics::run(12, 500, 40).unwrap();
    assert!((s.m_exact - 1.5f64.ln()).abs() < 1e-12);
    assert!(s.mean_rel_error < s.rel_bound);
    assert!(s.z_expected > 0.0 && s.z_mean > 0.0);
    assert!((0.0..=1.0).contains(&s.p_below_5pct));
}

#[test]
fn ising_ground_state_matches_oracle() {
    let rows = ising_ground_state::run(6, 3000, &[0.0, 1.0]).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[..2].iter().all(|r| r.estimate.abs() < 1e-12 && r.exact.abs() < 1e-12));
    assert!(rows.iter().all(|r| r.delta.abs() < 4.0), "{rows:?}");
}

#[test]
fn quench_dynamics_matches_statevector() {
    let points = quench_dynamics::run(6, 1000, 1.0).unwrap();
    assert_eq!(points.len(), 4);
    assert!(points.iter().all(|p| (p.m2 - p.m2_exact).abs() < 4.0 * p.dm2), "{points:?}");
    assert!(points.iter().all(|p| p.s_half >= 0.0));
}

#[test]
fn sampling_cost_grows_with_chi() {
    let s = sampling_cost::run(&[4, 16], &[8, 16], 0.02).unwrap();
    assert!(s.chi_exponent > 0.5, "chi exponent {}", s.chi_exponent);
    assert!(s.n_exponent.is_finite());
}

#[test]
fn experiment_config_produces_report() {
    let report = experiment_config::run(r#"{"experiment": "tstate-bench", "n_sites": 4, "n_samples": 500, "phi_grid": [0.5]}"#).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.summary_f64("fraction_within_3_sigma").map(|f| f >= 0.5), Some(true));
}
