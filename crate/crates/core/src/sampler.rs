//! Perfect sampling of Pauli strings from `Π(σ) = ⟨ψ|σ|ψ⟩² / 2^N`.
//!
//! The sweep carries a χ×χ environment `L` across the chain. At site j the
//! four candidate transfers
//!
//! ```text
//! M_α = Σ_{s's} σ^α_{s's} (A^{s'})† L A^s
//! ```
//!
//! give the conditional `π(α) = ½‖M_α‖_F²`, and the chosen branch continues
//! with `L' = M_α / √(2π(α))`. Right-normalization closes everything to the
//! right of the site, so each step costs O(χ³) and a string costs O(Nχ³).
//!
//! Probabilities are carried as `Σ_j ln(2π_j)`, which is exactly zero for a
//! stabilizer state, and stored as `ln Π = Σ_j ln(2π_j) − N ln 2`.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::linalg::{ComplexMatrix, Tensor3};
use crate::mps::{Mps, TransferScratch};
use crate::pauli::{Pauli, PauliString};

/// Largest tolerated deviation of `Σ_α π(α)` from one before the draw fails.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// The χ×χ carrier `L` of the partially projected state.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl EnvironmentMatrix {
    /// `L = (1)`, the start of a sweep over a pure state.
    pub fn pure() -> Self {
        Self { dim: 1, entries: vec![C64::new(1.0, 0.0)] }
    }

    /// `L = diag(Λ²) / √(Σ Λ⁴)` for sampling the state to the right of a cut
    /// with Schmidt coefficients `Λ`.
    pub fn reduced(schmidt: &[f64]) -> Result<Self> {
        ensure!(!schmidt.is_empty(), "empty Schmidt spectrum");
        ensure!(schmidt.iter().all(|l| l.is_finite() && *l >= 0.0), "Schmidt values must be finite and nonnegative");
        let total: f64 = schmidt.iter().map(|l| l * l).sum();
        ensure!(total > 0.0, "all-zero Schmidt spectrum");
        ensure!((total - 1.0).abs() <= 1e-10, "Schmidt weights sum to {total}, not 1");
        let norm = schmidt.iter().map(|l| l.powi(4)).sum::<f64>().sqrt();
        let dim = schmidt.len();
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for (i, l) in schmidt.iter().enumerate() {
            entries[i * dim + i] = C64::new(l * l / norm, 0.0);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        ensure!(m.rows() == m.cols(), "environment must be square, got {}x{}", m.rows(), m.cols());
        Ok(Self { dim: m.rows(), entries: m.as_slice().to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.dim, self.dim, self.entries.clone()).expect("square storage")
    }

    /// `Tr[L L†]`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// One sampled string with its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub string: PauliString,
    /// Natural log of Π(σ).
    pub log_prob: f64,
    /// The chosen per-site conditionals; empty for records read from a file.
    pub conditionals: Vec<f64>,
}

impl SampleRecord {
    /// `STRING<TAB>log_prob` with 17 significant digits.
    pub fn to_line(&self) -> String {
        format!("{}\t{:.16e}", self.string, self.log_prob)
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let mut fields = line.split('\t');
        let (Some(string), Some(log_prob), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Format(format!("expected two tab-separated fields in {line:?}")));
        };
        let string: PauliString = string.parse()?;
        if string.is_empty() {
            return Err(Error::Format("empty Pauli string".into()));
        }
        let log_prob: f64 = log_prob
            .trim()
            .parse()
            .map_err(|e| Error::Format(format!("bad log probability {log_prob:?}: {e}")))?;
        if !log_prob.is_finite() || log_prob > 1e-12 {
            return Err(Error::Format(format!("log probability {log_prob} outside (-inf, 0]")));
        }
        Ok(Self { string, log_prob, conditionals: Vec::new() })
    }
}

pub fn write_records(records: &[SampleRecord], mut out: impl Write) -> Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_records_file(records: &[SampleRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_records(records, std::io::BufWriter::new(file))
}

/// Reads records, skipping blank lines; all strings must share one length.
pub fn read_records(input: impl BufRead) -> Result<Vec<SampleRecord>> {
    let mut records: Vec<SampleRecord> = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = SampleRecord::from_line(&line).map_err(|e| Error::Format(format!("line {}: {e}", k + 1)))?;
        if let Some(first) = records.first() {
            if first.string.len() != record.string.len() {
                return Err(Error::Format(format!(
                    "line {}: string length {} differs from {}",
                    k + 1,
                    record.string.len(),
                    first.string.len()
                )));
            }
        }
        records.push(record);
    }
    Ok(records)
}

pub fn read_records_file(path: impl AsRef<Path>) -> Result<Vec<SampleRecord>> {
    let file = std::fs::File::open(path)?;
    read_records(std::io::BufReader::new(file))
}

/// `(π_I, π_X, π_Y, π_Z)` at `site` given the environment of the sites to its left.
pub fn conditional_probabilities(mps: &Mps, env: &EnvironmentMatrix, site: usize) -> Result<[f64; 4]> {
    mps.require_right_normalized("conditional_probabilities")?;
    ensure!(site < mps.n_sites(), "site {site} out of range for {} sites", mps.n_sites());
    let tensor = mps.tensor(site);
    ensure!(
        env.dim == tensor.left_dim(),
        "environment dimension {} does not match left bond {} at site {site}",
        env.dim,
        tensor.left_dim()
    );
    let mut scratch = TransferScratch::default();
    scratch.compute(&env.entries, env.dim, tensor);
    let raw = raw_conditionals(&scratch);
    normalized_conditionals(raw).map(|(p, _)| p)
}

/// `L' = M_σ / √(2π)` for the chosen letter.
pub fn update_environment(
    env: &EnvironmentMatrix,
    site_tensor: &Tensor3,
    chosen: Pauli,
    pi_chosen: f64,
) -> Result<EnvironmentMatrix> {
    ensure!(pi_chosen > 0.0 && pi_chosen.is_finite(), "chosen conditional must be positive, got {pi_chosen}");
    ensure!(
        env.dim == site_tensor.left_dim(),
        "environment dimension {} does not match left bond {}",
        env.dim,
        site_tensor.left_dim()
    );
    let mut scratch = TransferScratch::default();
    scratch.compute(&env.entries, env.dim, site_tensor);
    let mut entries = Vec::new();
    scratch.combine_into(chosen, &mut entries);
    let scale = 1.0 / (2.0 * pi_chosen).sqrt();
    entries.iter_mut().for_each(|z| *z *= scale);
    Ok(EnvironmentMatrix { dim: scratch.dim(), entries })
}

fn raw_conditionals(scratch: &TransferScratch) -> [f64; 4] {
    scratch.combined_norms_sqr().map(|n| 0.5 * n)
}

/// Checks the sum and rescales to one; returns the normalized vector and the raw sum.
fn normalized_conditionals(raw: [f64; 4]) -> Result<([f64; 4], f64)> {
    let total: f64 = raw.iter().sum();
    if !total.is_finite() || (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Numerical(format!(
            "conditional probabilities sum to {total}; is the MPS right-normalized with unit norm?"
        )));
    }
    Ok((raw.map(|p| p.max(0.0) / total), total))
}

/// Inverse CDF over (I, X, Y, Z); never returns a zero-probability letter.
fn draw(probs: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_positive = k;
        acc += p;
        if u < acc {
            return k;
        }
    }
    last_positive
}

/// Reusable buffers for one sweep at a time.
#[derive(Default)]
struct Sweeper {
    scratch: TransferScratch,
    env: Vec<C64>,
}

impl Sweeper {
    fn sweep(&mut self, tensors: &[Tensor3], start: &EnvironmentMatrix, rng: &mut impl Rng) -> Result<SampleRecord> {
        let n = tensors.len();
        self.env.clear();
        self.env.extend_from_slice(&start.entries);
        let mut dim = start.dim;
        let mut letters = Vec::with_capacity(n);
        let mut conditionals = Vec::with_capacity(n);
        let mut excess = 0.0;
        for tensor in tensors {
            self.scratch.compute(&self.env, dim, tensor);
            let raw = raw_conditionals(&self.scratch);
            let (probs, _) = normalized_conditionals(raw)?;
            let k = draw(&probs, rng.gen::<f64>());
            let letter = Pauli::ALL[k];
            self.scratch.combine_into(letter, &mut self.env);
            // rescale by the raw value so Tr[L L†] returns to one exactly
            let scale = 1.0 / (2.0 * raw[k]).sqrt();
            self.env.iter_mut().for_each(|z| *z *= scale);
            dim = self.scratch.dim();
            excess += (2.0 * probs[k]).ln();
            letters.push(letter);
            conditionals.push(probs[k]);
        }
        Ok(SampleRecord {
            string: PauliString::new(letters),
            log_prob: excess - n as f64 * std::f64::consts::LN_2,
            conditionals,
        })
    }
}

/// One string drawn exactly from Π.
pub fn sample_string(mps: &Mps, rng: &mut impl Rng) -> Result<SampleRecord> {
    mps.require_right_normalized("sample_string")?;
    Sweeper::default().sweep(mps.tensors(), &EnvironmentMatrix::pure(), rng)
}

/// The random stream of sample `index` in a batch seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn batch(tensors: &[Tensor3], start: &EnvironmentMatrix, n_samples: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    ensure!(n_samples >= 1, "n_samples must be at least 1");
    (0..n_samples)
        .into_par_iter()
        .map_init(Sweeper::default, |sweeper, i| sweeper.sweep(tensors, start, &mut sample_rng(seed, i as u64)))
        .collect()
}

/// `n_samples` independent records; sample `i` uses stream `i` of `seed`, so
/// the output does not depend on the number of worker threads.
pub fn sample_batch(mps: &Mps, n_samples: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    mps.require_right_normalized("sample_batch")?;
    batch(mps.tensors(), &EnvironmentMatrix::pure(), n_samples, seed)
}

/// Sites `first_site..N` of a pure state, held in the Schmidt gauge of the
/// cut so that sampling draws from the reduced state's normalized
/// distribution `Tr[ρσ]² / (2^{N'} Tr ρ²)`.
#[derive(Clone, Debug)]
pub struct ReducedState {
    pub first_site: usize,
    pub schmidt_values: Vec<f64>,
    tensors: Vec<Tensor3>,
    start: EnvironmentMatrix,
}

impl ReducedState {
    pub fn new(mps: &Mps, first_site: usize) -> Result<Self> {
        let (schmidt_values, tensors) = mps.schmidt_gauge_right(first_site)?;
        let start = EnvironmentMatrix::reduced(&schmidt_values)?;
        Ok(Self { first_site, schmidt_values, tensors, start })
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    /// `Tr ρ² = Σ Λ⁴`.
    pub fn purity(&self) -> f64 {
        self.schmidt_values.iter().map(|l| l.powi(4)).sum()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<SampleRecord> {
        Sweeper::default().sweep(&self.tensors, &self.start, rng)
    }

    pub fn sample_batch(&self, n_samples: usize, seed: u64) -> Result<Vec<SampleRecord>> {
        batch(&self.tensors, &self.start, n_samples, seed)
    }
}
