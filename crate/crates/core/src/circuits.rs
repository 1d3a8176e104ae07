//! State preparation and evolution: T-state products, random Clifford
//! circuits, and second-order TEBD for the Ising chain
//! `H = −Σ XX − h Σ Z − g Σ X` in real and imaginary time.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use nalgebra as na;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{symmetric_eigen, ComplexMatrix};
use crate::mps::{entropy_of, CenterSide, Centered, Mps};
use crate::pauli::Pauli;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hadamard() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_vec(2, 2, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]).expect("2x2")
}

pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).expect("2x2")
}

/// CNOT with the control on the left site of the pair.
pub fn cnot() -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(4, 4);
    g[(0, 0)] = c(1.0, 0.0);
    g[(1, 1)] = c(1.0, 0.0);
    g[(2, 3)] = c(1.0, 0.0);
    g[(3, 2)] = c(1.0, 0.0);
    g
}

/// `N` copies of `(|0⟩ + e^{iφ}|1⟩)/√2`.
pub fn t_state_mps(n_sites: usize, phi: f64) -> Result<Mps> {
    ensure!(phi.is_finite(), "phase must be finite");
    let v = [c(FRAC_1_SQRT_2, 0.0), C64::from_polar(FRAC_1_SQRT_2, phi)];
    Mps::product_state(&vec![v; n_sites])
}

/// `N` copies of the pure qubit with Bloch vector `(√p₁, √p₂, √p₃)`.
pub fn bloch_product_mps(n_sites: usize, p: [f64; 3]) -> Result<Mps> {
    ensure!(p.iter().all(|v| (0.0..=1.0).contains(v)), "weights must lie in [0, 1]");
    ensure!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12, "weights must sum to 1");
    let (x, y, z) = (p[0].sqrt(), p[1].sqrt(), p[2].sqrt());
    let a0 = ((1.0 + z) / 2.0).sqrt();
    let a1 = c(x, y) / (2.0 * (1.0 + z)).sqrt();
    let norm = (a0 * a0 + a1.norm_sqr()).sqrt();
    let v = [c(a0 / norm, 0.0), a1 / norm];
    Mps::product_state(&vec![v; n_sites])
}

/// Per-qubit `m₂` of a T-state: `−ln[(1 + cos⁴φ + sin⁴φ)/2]`.
pub fn t_state_m2(phi: f64) -> f64 {
    -((1.0 + phi.cos().powi(4) + phi.sin().powi(4)) / 2.0).ln()
}

/// Per-qubit `m₁` of a T-state: `−cos²φ ln|cos φ| − sin²φ ln|sin φ|`.
pub fn t_state_m1(phi: f64) -> f64 {
    let term = |v: f64| {
        let a = v.abs();
        if a == 0.0 { 0.0 } else { -a * a * a.ln() }
    };
    term(phi.cos()) + term(phi.sin())
}

/// Per-qubit `m_n` of a T-state for any `n ≥ 1`:
/// `ln[(1 + |cos φ|^{2n} + |sin φ|^{2n}) / 2ⁿ] / (1 − n) − ln 2`.
pub fn t_state_density(phi: f64, renyi_n: f64) -> f64 {
    if renyi_n == 1.0 {
        return t_state_m1(phi);
    }
    let sum = 1.0 + phi.cos().abs().powf(2.0 * renyi_n) + phi.sin().abs().powf(2.0 * renyi_n);
    ((sum.ln() - renyi_n * LN_2) / (1.0 - renyi_n) - LN_2).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateLabel {
    #[serde(rename = "1")]
    Identity,
    S,
    H,
    #[serde(rename = "CNOT")]
    Cnot,
}

/// A gate placed on `site` (and `site + 1` for CNOT, controlled on `site`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedGate {
    pub gate: GateLabel,
    pub site: usize,
}

impl PlacedGate {
    pub fn sites(&self) -> std::ops::Range<usize> {
        match self.gate {
            GateLabel::Cnot => self.site..self.site + 2,
            _ => self.site..self.site + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliffordCircuit {
    pub n_sites: usize,
    /// Seed the circuit was drawn from, when it was drawn.
    pub seed: Option<u64>,
    pub layers: Vec<Vec<PlacedGate>>,
}

impl CliffordCircuit {
    pub fn new(n_sites: usize, layers: Vec<Vec<PlacedGate>>) -> Result<Self> {
        let circuit = Self { n_sites, seed: None, layers };
        circuit.validate()?;
        Ok(circuit)
    }

    /// Gates in range and disjoint within each layer.
    pub fn validate(&self) -> Result<()> {
        for (k, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n_sites];
            for g in layer {
                ensure!(g.sites().end <= self.n_sites, "layer {k}: gate {g:?} outside {} sites", self.n_sites);
                for s in g.sites() {
                    ensure!(!used[s], "layer {k}: site {s} used twice");
                    used[s] = true;
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let circuit: Self = serde_json::from_str(text)?;
        circuit.validate().map_err(|e| Error::Format(e.to_string()))?;
        Ok(circuit)
    }
}

/// Each layer sweeps left to right: with probability 1/2 a uniform choice of
/// {1, S, H} on site i (advance 1), otherwise CNOT(i, i+1) (advance 2); the
/// last site always receives a one-qubit gate.
pub fn random_clifford_circuit(n_sites: usize, depth: usize, seed: u64) -> Result<CliffordCircuit> {
    ensure!(n_sites >= 1, "circuit needs at least one site");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let singles = [GateLabel::Identity, GateLabel::S, GateLabel::H];
    let layers = (0..depth)
        .map(|_| {
            let mut layer = Vec::new();
            let mut i = 0;
            while i < n_sites {
                let two = rng.gen_bool(0.5);
                if two && i + 1 < n_sites {
                    layer.push(PlacedGate { gate: GateLabel::Cnot, site: i });
                    i += 2;
                } else {
                    layer.push(PlacedGate { gate: singles[rng.gen_range(0..3)], site: i });
                    i += 1;
                }
            }
            layer
        })
        .collect();
    Ok(CliffordCircuit { n_sites, seed: Some(seed), layers })
}

/// Applies every layer in order and returns the right-normalized result with
/// the largest discarded weight of any split.
pub fn apply_circuit(mps: &Mps, circuit: &CliffordCircuit, chi_max: usize, cutoff: f64) -> Result<(Mps, f64)> {
    ensure!(
        circuit.n_sites == mps.n_sites(),
        "circuit on {} sites applied to a {}-site MPS",
        circuit.n_sites,
        mps.n_sites()
    );
    circuit.validate()?;
    let (h, s, cx) = (hadamard(), phase_s(), cnot());
    let mut state = Centered::from_mps(mps)?;
    let mut max_discarded: f64 = 0.0;
    for layer in &circuit.layers {
        for g in layer {
            match g.gate {
                GateLabel::Identity => {}
                GateLabel::S => state.apply_one_site(g.site, &s),
                GateLabel::H => state.apply_one_site(g.site, &h),
                GateLabel::Cnot => {
                    let update = state.apply_two_site(g.site, &cx, chi_max, cutoff, CenterSide::Right)?;
                    max_discarded = max_discarded.max(update.discarded_weight);
                }
            }
        }
    }
    Ok((state.into_right_normalized()?, max_discarded))
}

/// Transverse field `h` and longitudinal field `g`; the coupling is 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub h: f64,
    pub g: f64,
}

impl IsingParams {
    pub fn new(h: f64, g: f64) -> Self {
        Self { h, g }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.h.is_finite() && self.g.is_finite(), "Ising fields must be finite");
        Ok(())
    }
}

/// `⟨H⟩` of a right-normalized MPS from nearest-neighbour and on-site terms.
pub fn ising_energy(mps: &Mps, params: &IsingParams) -> Result<f64> {
    let n = mps.n_sites();
    let mut terms: Vec<(usize, Vec<Pauli>)> = (0..n.saturating_sub(1)).map(|i| (i, vec![Pauli::X, Pauli::X])).collect();
    terms.extend((0..n).map(|i| (i, vec![Pauli::Z])));
    terms.extend((0..n).map(|i| (i, vec![Pauli::X])));
    let values = mps.local_expectations(&terms)?;
    let (bonds, rest) = values.split_at(n.saturating_sub(1));
    let (zs, xs) = rest.split_at(n);
    Ok(-bonds.iter().sum::<f64>() - params.h * zs.iter().sum::<f64>() - params.g * xs.iter().sum::<f64>())
}

/// Real symmetric 4×4 bond Hamiltonian in the basis `2 s_i + s_{i+1}`, with
/// the on-site fields weighted by `wl` and `wr`.
fn bond_hamiltonian(params: &IsingParams, wl: f64, wr: f64) -> na::Matrix4<f64> {
    let mut m = na::Matrix4::<f64>::zeros();
    for k in 0..4 {
        let (sl, sr) = (k >> 1, k & 1);
        let zl = if sl == 0 { 1.0 } else { -1.0 };
        let zr = if sr == 0 { 1.0 } else { -1.0 };
        m[(k, k)] -= params.h * (wl * zl + wr * zr);
        m[(k ^ 3, k)] -= 1.0;
        m[(k ^ 2, k)] -= params.g * wl;
        m[(k ^ 1, k)] -= params.g * wr;
    }
    m
}

/// `exp(−i H dt)` (real time) or `exp(−H dt)` (imaginary time).
fn bond_propagator(hb: &na::Matrix4<f64>, dt: f64, imaginary: bool) -> ComplexMatrix {
    let dense = na::DMatrix::from_iterator(4, 4, hb.iter().copied());
    let (values, vectors) = symmetric_eigen(dense);
    let phases: Vec<C64> = values
        .iter()
        .map(|&l| if imaginary { c((-l * dt).exp(), 0.0) } else { C64::from_polar(1.0, -l * dt) })
        .collect();
    ComplexMatrix::from_fn(4, 4, |i, j| (0..4).map(|k| phases[k] * vectors[(i, k)] * vectors[(j, k)]).sum())
}

/// Field weight of each end of bond `i`: sites on a single bond take the full field.
fn bond_weights(n: usize, i: usize) -> (f64, f64) {
    let w = |site: usize| if site == 0 || site == n - 1 { 1.0 } else { 0.5 };
    (w(i), w(i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TebdSettings {
    pub dt: f64,
    pub n_steps: usize,
    pub chi_max: usize,
    pub cutoff: f64,
    pub imaginary: bool,
}

impl TebdSettings {
    pub fn real_time(dt: f64, n_steps: usize) -> Self {
        Self { dt, n_steps, chi_max: 128, cutoff: 1e-10, imaginary: false }
    }

    pub fn imaginary_time(dt: f64, n_steps: usize) -> Self {
        Self { dt, n_steps, chi_max: 128, cutoff: 1e-10, imaginary: true }
    }

    pub fn with_truncation(mut self, chi_max: usize, cutoff: f64) -> Self {
        self.chi_max = chi_max;
        self.cutoff = cutoff;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Elapsed (real or imaginary) time since the start of the call.
    pub t: f64,
    /// `|1 − Π_gates ‖θ_kept‖²|` before renormalization.
    pub norm_drift: f64,
    pub max_discarded: f64,
    pub s_half: f64,
    pub max_bond: usize,
    /// Energy after the step; imaginary time only.
    pub energy: Option<f64>,
}

/// Second-order Trotter evolution: even bonds for dt/2, odd bonds for dt,
/// even bonds for dt/2. Imaginary time renormalizes after every gate.
pub fn tebd_evolve(mps: &Mps, params: &IsingParams, settings: &TebdSettings) -> Result<(Mps, Vec<StepDiagnostics>)> {
    let n = mps.n_sites();
    ensure!(settings.dt > 0.0 && settings.dt.is_finite(), "dt must be positive, got {}", settings.dt);
    ensure!(n >= 2, "TEBD needs at least two sites");
    ensure!(settings.chi_max >= 1, "chi_max must be at least 1");
    params.validate()?;

    let make = |dt: f64| -> Vec<ComplexMatrix> {
        (0..n - 1)
            .map(|i| {
                let (wl, wr) = bond_weights(n, i);
                bond_propagator(&bond_hamiltonian(params, wl, wr), dt, settings.imaginary)
            })
            .collect()
    };
    let half = make(settings.dt / 2.0);
    let full = make(settings.dt);
    let even: Vec<usize> = (0..n - 1).step_by(2).collect();
    let odd_desc: Vec<usize> = (1..n - 1).step_by(2).rev().collect();

    let mut state = Centered::from_mps(mps)?;
    let mut diagnostics = Vec::with_capacity(settings.n_steps);
    for step in 1..=settings.n_steps {
        let mut kept_product = 1.0;
        let mut max_discarded: f64 = 0.0;
        let mut run = |state: &mut Centered, bonds: &[usize], gates: &[ComplexMatrix], side: CenterSide| -> Result<()> {
            for &b in bonds {
                let u = state.apply_two_site(b, &gates[b], settings.chi_max, settings.cutoff, side)?;
                kept_product *= u.norm_sqr_kept;
                max_discarded = max_discarded.max(u.discarded_weight);
            }
            Ok(())
        };
        run(&mut state, &even, &half, CenterSide::Right)?;
        run(&mut state, &odd_desc, &full, CenterSide::Left)?;
        run(&mut state, &even, &half, CenterSide::Right)?;

        let s_half = entropy_of(&state.schmidt_values(n / 2)?);
        let max_bond = state.tensors.iter().map(|t| t.right_dim()).max().unwrap_or(1);
        let energy = if settings.imaginary {
            let snapshot = state.clone().into_right_normalized()?;
            Some(ising_energy(&snapshot, params)?)
        } else {
            None
        };
        diagnostics.push(StepDiagnostics {
            step,
            t: step as f64 * settings.dt,
            norm_drift: (1.0 - kept_product).abs(),
            max_discarded,
            s_half,
            max_bond,
            energy,
        });
    }
    Ok((state.into_right_normalized()?, diagnostics))
}

#[derive(Clone, Debug)]
pub struct GroundStateRun {
    pub mps: Mps,
    pub energy: f64,
    pub total_steps: usize,
    pub final_dt: f64,
}

/// Imaginary-time ground state with a halving step schedule 0.1, 0.05, …
/// down to `dt_min`. Each stage runs blocks of imaginary time 0.5 until the
/// energy changes by less than `tol` (relative) between blocks. Starts from
/// |0…0⟩, which lies in the even-parity sector holding the `g = 0` ground state.
pub fn imaginary_time_ground_state(
    n_sites: usize,
    params: &IsingParams,
    chi_max: usize,
    cutoff: f64,
    tol: f64,
) -> Result<GroundStateRun> {
    ensure!(n_sites >= 2, "ground state search needs at least two sites");
    ensure!(tol > 0.0, "tolerance must be positive");
    let dt_min = 0.1 / 16.0;
    let max_blocks = 200;
    let mut mps = Mps::zero_state(n_sites)?;
    let mut energy = ising_energy(&mps, params)?;
    let mut total_steps = 0;
    let mut dt: f64 = 0.1;
    loop {
        let steps = (0.5 / dt).round() as usize;
        let settings = TebdSettings::imaginary_time(dt, steps).with_truncation(chi_max, cutoff);
        for _ in 0..max_blocks {
            let (next, _) = tebd_evolve(&mps, params, &settings)?;
            mps = next;
            total_steps += steps;
            let e = ising_energy(&mps, params)?;
            let change = (e - energy).abs();
            energy = e;
            if change <= tol * e.abs().max(1e-300) {
                break;
            }
        }
        if dt / 2.0 < dt_min {
            break;
        }
        dt /= 2.0;
    }
    Ok(GroundStateRun { mps, energy, total_steps, final_dt: dt })
}
