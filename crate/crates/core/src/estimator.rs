//! Monte-Carlo SRE estimators from sampled records, their error bars, and
//! closed-form statistics of product states.
//!
//! For `n > 1`, `q̃_n = mean Π(σ)^{n−1}` and `m̃_n = ln q̃_n / ((1−n)N) − ln 2`;
//! for `n = 1`, `q̃₁ = mean ln Π(σ)` and `m̃₁ = −q̃₁/N − ln 2`. Both are
//! evaluated on the excess `x = ln Π + N ln 2`, which is exactly zero on
//! every string of a stabilizer state, so those estimates come out exactly
//! zero with zero spread.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::sampler::SampleRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub renyi_n: f64,
    /// `q̃_n` for `n > 1`, the mean log-probability for `n = 1`.
    pub q_estimate: f64,
    /// SRE density `m̃_n`.
    pub m_density: f64,
    /// One-σ error `δm̃_n`; not-a-number when only one sample is available.
    pub std_error: f64,
    pub n_samples: usize,
    pub n_sites: usize,
}

impl EstimateResult {
    pub const CSV_HEADER: &'static str = "renyi_n,q_estimate,m_density,std_error,n_samples,n_sites";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            self.renyi_n, self.q_estimate, self.m_density, self.std_error, self.n_samples, self.n_sites
        )
    }

    /// Total SRE `M̃_n = N m̃_n`.
    pub fn total(&self) -> f64 {
        self.n_sites as f64 * self.m_density
    }
}

pub fn results_to_csv(results: &[EstimateResult]) -> String {
    let mut out = String::new();
    writeln!(out, "{}", EstimateResult::CSV_HEADER).unwrap();
    for r in results {
        writeln!(out, "{}", r.csv_row()).unwrap();
    }
    out
}

/// Estimate from records whose strings all have `n_sites` letters.
pub fn estimate(records: &[SampleRecord], renyi_n: f64, n_sites: usize) -> Result<EstimateResult> {
    ensure!(!records.is_empty(), "cannot estimate from an empty record set");
    if let Some(bad) = records.iter().find(|r| r.string.len() != n_sites) {
        return Err(Error::Contract(format!("record of length {} for {n_sites} sites", bad.string.len())));
    }
    let log_probs: Vec<f64> = records.iter().map(|r| r.log_prob).collect();
    estimate_log_probs(&log_probs, renyi_n, n_sites)
}

pub fn estimate_many(records: &[SampleRecord], renyi: &[f64], n_sites: usize) -> Result<Vec<EstimateResult>> {
    renyi.iter().map(|&n| estimate(records, n, n_sites)).collect()
}

/// Estimate from bare `ln Π` values.
pub fn estimate_log_probs(log_probs: &[f64], renyi_n: f64, n_sites: usize) -> Result<EstimateResult> {
    ensure!(!log_probs.is_empty(), "cannot estimate from an empty record set");
    ensure!(renyi_n >= 1.0 && renyi_n.is_finite(), "Rényi index must be finite and >= 1, got {renyi_n}");
    ensure!(n_sites >= 1, "n_sites must be positive");
    ensure!(log_probs.iter().all(|v| v.is_finite()), "log probabilities must be finite");
    let nf = n_sites as f64;
    let ns = log_probs.len();
    let shift = nf * LN_2;
    let excess: Vec<f64> = log_probs.iter().map(|lp| lp + shift).collect();

    if renyi_n == 1.0 {
        let (mean_x, std_x) = mean_and_std(&excess);
        let q = log_probs.iter().sum::<f64>() / ns as f64;
        return Ok(EstimateResult {
            renyi_n,
            q_estimate: q,
            m_density: -mean_x / nf + 0.0,
            std_error: std_x / (ns as f64).sqrt() / nf,
            n_samples: ns,
            n_sites,
        });
    }

    let a: Vec<f64> = excess.iter().map(|x| (renyi_n - 1.0) * x).collect();
    let anchor = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y: Vec<f64> = a.iter().map(|v| (v - anchor).exp()).collect();
    let (mean_y, std_y) = mean_and_std(&y);
    let log_mean = anchor + mean_y.ln();
    let log_q = log_mean - (renyi_n - 1.0) * shift;
    let q = log_q.exp();
    if q == 0.0 || !q.is_finite() {
        return Err(Error::Numerical(format!("q estimate underflows (ln q = {log_q})")));
    }
    let scale = (1.0 - renyi_n) * nf;
    Ok(EstimateResult {
        renyi_n,
        q_estimate: q,
        m_density: log_mean / scale + 0.0,
        std_error: std_y / (ns as f64).sqrt() / mean_y / scale.abs(),
        n_samples: ns,
        n_sites,
    })
}

/// Mean and Bessel-corrected standard deviation (not-a-number for one value).
fn mean_and_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Upper bound on `Var[q̃_n]`: `1/N_s` for `n > 1`, and
/// `(¼ ln²(4^N) + 1)/N_s` for `n = 1`.
pub fn variance_bound(renyi_n: f64, n_sites: usize, n_samples: usize) -> f64 {
    let ns = n_samples as f64;
    if renyi_n > 1.0 {
        1.0 / ns
    } else {
        let log_d = n_sites as f64 * 4f64.ln();
        (0.25 * log_d * log_d + 1.0) / ns
    }
}

/// Local Pauli-basis weights of a single-qubit pure state with squared Bloch
/// components `(p₁, p₂, p₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductStateParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl ProductStateParams {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        for p in [p1, p2, p3] {
            ensure!((0.0..=1.0).contains(&p), "weight {p} outside [0, 1]");
        }
        ensure!((p1 + p2 + p3 - 1.0).abs() <= 1e-12, "weights sum to {}, not 1", p1 + p2 + p3);
        Ok(Self { p1, p2, p3 })
    }

    pub fn uniform() -> Self {
        Self { p1: 1.0 / 3.0, p2: 1.0 / 3.0, p3: 1.0 / 3.0 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// Per-site Π factors for (I, X, Y, Z).
    pub fn site_weights(&self) -> [f64; 4] {
        [0.5, self.p1 / 2.0, self.p2 / 2.0, self.p3 / 2.0]
    }

    fn power_sum(&self, k: i32) -> f64 {
        self.p1.powi(k) + self.p2.powi(k) + self.p3.powi(k)
    }
}

/// `Π = (1/2)^{N₀} (p₁/2)^{N₁} (p₂/2)^{N₂} (p₃/2)^{N₃}` for letter counts `(N₀, N₁, N₂, N₃)`.
pub fn product_state_pi(params: &ProductStateParams, counts: [usize; 4]) -> f64 {
    params.site_weights().iter().zip(counts).map(|(w, c)| w.powi(c as i32)).product()
}

/// `ln Π`; negative infinity when a letter of zero weight occurs.
pub fn product_state_log_pi(params: &ProductStateParams, counts: [usize; 4]) -> f64 {
    params
        .site_weights()
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(w, c)| c as f64 * w.ln())
        .sum()
}

/// `q₂ = Σ_σ Π² = ((1 + p₁² + p₂² + p₃²)/4)^N`.
pub fn product_state_q2(params: &ProductStateParams, n_sites: usize) -> f64 {
    ((1.0 + params.power_sum(2)) / 4.0).powi(n_sites as i32)
}

/// Closed-form mean of `Z₂ = (q̃₂ − q₂)²/q₂²` over batches of `n_samples`.
pub fn expected_z2(params: &ProductStateParams, n_sites: usize, n_samples: usize) -> f64 {
    let s2 = 1.0 + params.power_sum(2);
    let ratio = 2.0 * (1.0 + params.power_sum(3)) / (s2 * s2);
    (ratio.powi(n_sites as i32) - 1.0) / n_samples as f64
}

/// Leading large-N behaviour of `Var[Z₂]` at `p = (1/3, 1/3, 1/3)`:
/// `(41/16)^N / N_s³`. Diagnostic only.
pub fn var_z2_leading(n_sites: usize, n_samples: usize) -> f64 {
    (41.0f64 / 16.0).powi(n_sites as i32) / (n_samples as f64).powi(3)
}

/// `Z = (q̃ − q)² / q²` for one batch.
pub fn z_statistic(q_estimate: f64, q_exact: f64) -> f64 {
    ((q_estimate - q_exact) / q_exact).powi(2)
}

/// `Z̄ = μ₂/q²` and `Var[Z] = Z̄² (μ₄/μ₂² − 1)` from central moments of `q̃`.
pub fn z_from_moments(mu2: f64, mu4: f64, q_exact: f64) -> (f64, f64) {
    let z = mu2 / (q_exact * q_exact);
    (z, z * z * (mu4 / (mu2 * mu2) - 1.0))
}

/// Bound on `|m̃_n − m_n|` implied by a mean `Z`: `|1/((1−n)N)| ln(1 + √Z)`.
pub fn error_bound_from_z(z_mean: f64, renyi_n: f64, n_sites: usize) -> Result<f64> {
    ensure!(z_mean >= 0.0 && z_mean.is_finite(), "z_mean must be finite and nonnegative, got {z_mean}");
    ensure!(renyi_n > 1.0, "the Z bound needs a Rényi index above 1, got {renyi_n}");
    ensure!(n_sites >= 1, "n_sites must be positive");
    Ok((1.0 + z_mean.sqrt()).ln() / ((renyi_n - 1.0) * n_sites as f64))
}

/// Population central moment of order `k ∈ {2, 4}`.
pub fn central_moment(values: &[f64], k: u32) -> Result<f64> {
    ensure!(k == 2 || k == 4, "central moment order must be 2 or 4, got {k}");
    ensure!(!values.is_empty(), "central moment of an empty sequence");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean).powi(k as i32)).sum::<f64>() / n)
}
