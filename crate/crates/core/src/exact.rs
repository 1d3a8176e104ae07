//! Brute-force references at small N: dense statevectors, the full 4^N Pauli
//! spectrum, exact SREs, exact Ising ground states and dynamics, and a
//! Pearson goodness-of-fit test for sampled strings.
//!
//! Basis convention: site 0 is the most significant bit of the amplitude index.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use nalgebra as na;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuits::IsingParams;
use crate::error::{ensure, Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::mps::Mps;
use crate::pauli::{Pauli, PauliString};

pub const MAX_STATEVECTOR_SITES: usize = 14;
pub const MAX_ENUMERATION_SITES: usize = 10;
/// Streaming SRE evaluation never stores the 4^N spectrum, so it reaches further.
pub const MAX_SRE_SITES: usize = 12;
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes after checking length `2^N` and unit norm (1e-12).
    pub fn new(n_sites: usize, amplitudes: Vec<C64>) -> Result<Self> {
        ensure!((1..=MAX_STATEVECTOR_SITES).contains(&n_sites), "statevector needs 1..={MAX_STATEVECTOR_SITES} sites");
        ensure!(amplitudes.len() == 1 << n_sites, "expected {} amplitudes, got {}", 1usize << n_sites, amplitudes.len());
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        ensure!((norm - 1.0).abs() <= 1e-12, "statevector squared norm {norm} is not 1");
        Ok(Self { n_sites, amplitudes })
    }

    fn normalized(n_sites: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numerical("statevector has zero or non-finite norm".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_sites, amplitudes })
    }

    /// |0…0⟩.
    pub fn zero_state(n_sites: usize) -> Result<Self> {
        ensure!((1..=MAX_STATEVECTOR_SITES).contains(&n_sites), "statevector needs 1..={MAX_STATEVECTOR_SITES} sites");
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_sites];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(Self { n_sites, amplitudes })
    }

    /// Contracts a unit-norm MPS.
    pub fn from_mps(mps: &Mps) -> Result<Self> {
        let amplitudes = contract(mps)?;
        Self::new(mps.n_sites(), amplitudes)
    }

    /// Contracts any MPS and rescales to unit norm.
    pub fn from_unnormalized_mps(mps: &Mps) -> Result<Self> {
        let amplitudes = contract(mps)?;
        Self::normalized(mps.n_sites(), amplitudes)
    }

    /// Tensor product `self ⊗ other`, `self` on the leading sites.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n_sites + other.n_sites;
        ensure!(n <= MAX_STATEVECTOR_SITES, "tensor product of {n} sites exceeds the guard");
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self { n_sites: n, amplitudes })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.overlap(other).norm_sqr()
    }

    fn bit(&self, site: usize) -> usize {
        1 << (self.n_sites - 1 - site)
    }

    pub fn apply_one_qubit_gate(&self, site: usize, gate: &ComplexMatrix) -> StateVector {
        let mask = self.bit(site);
        let mut out = self.amplitudes.clone();
        for k in 0..out.len() {
            if k & mask == 0 {
                let (a0, a1) = (self.amplitudes[k], self.amplitudes[k | mask]);
                out[k] = gate[(0, 0)] * a0 + gate[(0, 1)] * a1;
                out[k | mask] = gate[(1, 0)] * a0 + gate[(1, 1)] * a1;
            }
        }
        Self { n_sites: self.n_sites, amplitudes: out }
    }

    /// 4×4 gate on `(site, site+1)` in the basis index `2 s_site + s_{site+1}`.
    pub fn apply_two_qubit_gate(&self, site: usize, gate: &ComplexMatrix) -> StateVector {
        let (m0, m1) = (self.bit(site), self.bit(site + 1));
        let mut out = self.amplitudes.clone();
        for k in 0..out.len() {
            if k & (m0 | m1) == 0 {
                let idx = [k, k | m1, k | m0, k | m0 | m1];
                let local = idx.map(|i| self.amplitudes[i]);
                for (row, &i) in idx.iter().enumerate() {
                    out[i] = (0..4).map(|c| gate[(row, c)] * local[c]).sum();
                }
            }
        }
        Self { n_sites: self.n_sites, amplitudes: out }
    }

    /// ⟨ψ|σ|ψ⟩ by direct bit manipulation (no operator matrix).
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        ensure!(p.len() == self.n_sites, "Pauli string length {} on {} sites", p.len(), self.n_sites);
        let (x, z, n_y) = masks(p, self.n_sites);
        let phase = i_pow(n_y);
        let total: C64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                // σ|k⟩ = i^{n_y} (−1)^{|k∧z|} |k⊕x⟩
                let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                self.amplitudes[k ^ x].conj() * a * sign
            })
            .sum();
        let value = phase * total;
        if value.im.abs() > 1e-9 {
            return Err(Error::Numerical(format!("Pauli expectation has imaginary part {:e}", value.im)));
        }
        Ok(value.re)
    }

    /// Singular values of the amplitude matrix split at `cut`, descending.
    pub fn schmidt_values(&self, cut: usize) -> Vec<f64> {
        let rows = 1 << cut;
        let cols = 1 << (self.n_sites - cut);
        let m = ComplexMatrix::from_vec(rows, cols, self.amplitudes.clone()).expect("2^N amplitudes");
        linalg::svd_truncate(&m, usize::MAX, 0.0)
            .map(|svd| svd.singular_values)
            .unwrap_or_default()
    }

    /// Reduced density matrix of sites `first..N` (row-major, dimension 2^(N-first)).
    pub fn reduced_density_matrix(&self, first: usize) -> ComplexMatrix {
        let right = self.n_sites - first;
        let (dl, dr) = (1usize << first, 1usize << right);
        ComplexMatrix::from_fn(dr, dr, |i, j| {
            (0..dl).map(|l| self.amplitudes[l * dr + i] * self.amplitudes[l * dr + j].conj()).sum()
        })
    }

    /// `⟨σ⟩` for every string in ordinal order, via one Walsh–Hadamard
    /// transform per X-pattern: O(N 4^N) overall.
    fn for_each_expectation(&self, mut visit: impl FnMut(usize, f64)) {
        let n = self.n_sites;
        let dim = 1usize << n;
        let spread = spread_table(n);
        let mut f = vec![C64::new(0.0, 0.0); dim];
        for x in 0..dim {
            for (k, slot) in f.iter_mut().enumerate() {
                *slot = self.amplitudes[k ^ x].conj() * self.amplitudes[k];
            }
            walsh_hadamard(&mut f);
            for z in 0..dim {
                // X^x Z^z string; each overlapping bit is a Y = i X Z
                let value = i_pow((x & z).count_ones() as usize) * f[z];
                let ordinal = 2 * spread[z] + spread[x ^ z];
                visit(ordinal, value.re);
            }
        }
    }
}

/// Bits of `z` in the rows of the letter-digit table: I=0, X=1, Y=2, Z=3 per
/// site means digit = 2·zbit + (xbit ⊕ zbit), so the ordinal is
/// `2·spread(z) + spread(x ⊕ z)` with `spread` sending bit b to 4^b.
fn spread_table(n: usize) -> Vec<usize> {
    (0..1usize << n)
        .map(|v| (0..n).filter(|b| v >> b & 1 == 1).map(|b| 1usize << (2 * b)).sum())
        .collect()
}

fn walsh_hadamard(f: &mut [C64]) {
    let mut h = 1;
    while h < f.len() {
        for block in f.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// X mask, Z mask and Y count of a string in the amplitude-index bit layout.
fn masks(p: &PauliString, n: usize) -> (usize, usize, usize) {
    let (mut x, mut z, mut n_y) = (0, 0, 0);
    for (site, letter) in p.iter().enumerate() {
        let bit = 1 << (n - 1 - site);
        match letter {
            Pauli::I => {}
            Pauli::X => x |= bit,
            Pauli::Z => z |= bit,
            Pauli::Y => {
                x |= bit;
                z |= bit;
                n_y += 1;
            }
        }
    }
    (x, z, n_y)
}

fn contract(mps: &Mps) -> Result<Vec<C64>> {
    ensure!(
        mps.n_sites() <= MAX_STATEVECTOR_SITES,
        "statevector conversion limited to {MAX_STATEVECTOR_SITES} sites, got {}",
        mps.n_sites()
    );
    // rows: basis prefix, cols: open right bond
    let mut acc = vec![C64::new(1.0, 0.0)];
    let mut prefixes = 1usize;
    let mut bond = 1usize;
    for t in mps.tensors() {
        let r = t.right_dim();
        let mut next = vec![C64::new(0.0, 0.0); prefixes * 2 * r];
        for p in 0..prefixes {
            for s in 0..2 {
                let out = &mut next[(p * 2 + s) * r..(p * 2 + s + 1) * r];
                for l in 0..bond {
                    let a = acc[p * bond + l];
                    for (o, rr) in out.iter_mut().zip(0..r) {
                        *o += a * t.get(l, s, rr);
                    }
                }
            }
        }
        acc = next;
        prefixes *= 2;
        bond = r;
    }
    Ok(acc)
}

/// Π(σ) = ⟨σ⟩²/2^N for all 4^N strings in ordinal order.
pub fn enumerate_pauli_distribution(state: &StateVector) -> Result<Vec<f64>> {
    let n = state.n_sites();
    ensure!(n <= MAX_ENUMERATION_SITES, "enumeration limited to {MAX_ENUMERATION_SITES} sites, got {n}");
    let scale = 1.0 / (1u64 << n) as f64;
    let mut out = vec![0.0; 1 << (2 * n)];
    state.for_each_expectation(|ordinal, e| out[ordinal] = e * e * scale);
    Ok(out)
}

/// Exact SRE density `m_n = M_n / N`; `renyi_n = 1` gives the Shannon limit.
pub fn exact_sre(state: &StateVector, renyi_n: f64) -> Result<f64> {
    Ok(exact_sre_many(state, &[renyi_n])?[0])
}

/// Several Rényi indices from one pass over the spectrum.
pub fn exact_sre_many(state: &StateVector, renyi: &[f64]) -> Result<Vec<f64>> {
    let n = state.n_sites();
    ensure!(n <= MAX_SRE_SITES, "exact SRE limited to {MAX_SRE_SITES} sites, got {n}");
    for &r in renyi {
        ensure!(r >= 1.0 && r.is_finite(), "Rényi index must be finite and >= 1, got {r}");
    }
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    // work with w = 2^N Π = ⟨σ⟩², Σ_σ w = 2^N
    let mut sums = vec![0.0f64; renyi.len()];
    state.for_each_expectation(|_, e| {
        let w = e * e;
        if w <= 0.0 {
            return;
        }
        for (acc, &r) in sums.iter_mut().zip(renyi) {
            *acc += if r == 1.0 { w * w.ln() } else { w.powf(r) };
        }
    });
    let two_n = (nf * ln2).exp();
    Ok(renyi
        .iter()
        .zip(sums)
        .map(|(&r, s)| {
            if r == 1.0 {
                // −Σ Π ln Π − N ln 2 with Π = w/2^N
                let entropy = -s / two_n + nf * ln2;
                (entropy - nf * ln2) / nf
            } else {
                // ln Σ Π^n = ln Σ w^n − nN ln 2
                let log_sum = s.ln() - r * nf * ln2;
                (log_sum / (1.0 - r) - nf * ln2) / nf
            }
        })
        .map(|m: f64| if m.abs() < 1e-14 { 0.0 } else { m })
        .collect())
}

/// Π for every string of the reduced state on sites `first..N`, normalized by
/// purity: `Tr[ρσ]² / (2^{N'} Tr ρ²)`.
pub fn enumerate_reduced_distribution(state: &StateVector, first: usize) -> Result<Vec<f64>> {
    let n = state.n_sites();
    ensure!(first >= 1 && first < n, "subsystem start {first} outside 1..{n}");
    let m = n - first;
    ensure!(m <= 6, "reduced enumeration limited to 6 sites");
    let rho = state.reduced_density_matrix(first);
    let purity: f64 = rho.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let dim = 1usize << m;
    let scale = 1.0 / (dim as f64 * purity);
    Ok((0..1usize << (2 * m))
        .map(|ordinal| {
            let p = PauliString::from_ordinal(m, ordinal);
            let (x, z, n_y) = masks(&p, m);
            let phase = i_pow(n_y);
            // Tr[ρσ] = Σ_k ρ[k, k⊕x] i^{n_y} (−1)^{|k∧z|}
            let tr: C64 = (0..dim)
                .map(|k| {
                    let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    rho[(k, k ^ x)] * sign
                })
                .sum::<C64>()
                * phase;
            tr.norm_sqr() * scale
        })
        .collect())
}

/// Dense open-chain Ising Hamiltonian `−Σ XX − h Σ Z − g Σ X`.
pub fn ising_hamiltonian(n: usize, params: &IsingParams) -> Result<na::DMatrix<f64>> {
    ensure!((2..=MAX_DENSE_SITES).contains(&n), "dense Hamiltonian needs 2..={MAX_DENSE_SITES} sites");
    let dim = 1usize << n;
    let mut h = na::DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        for site in 0..n {
            let bit = 1 << (n - 1 - site);
            let z = if k & bit == 0 { 1.0 } else { -1.0 };
            h[(k, k)] -= params.h * z;
            h[(k ^ bit, k)] -= params.g;
            if site + 1 < n {
                let pair = bit | (bit >> 1);
                h[(k ^ pair, k)] -= 1.0;
            }
        }
    }
    Ok(h)
}

/// `H|ψ⟩` for the Ising chain without forming the matrix.
fn ising_apply(n: usize, params: &IsingParams, psi: &[C64], out: &mut [C64]) {
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for site in 0..n {
            let bit = 1 << (n - 1 - site);
            let z = if k & bit == 0 { 1.0 } else { -1.0 };
            acc -= psi[k] * (params.h * z);
            acc -= psi[k ^ bit] * params.g;
            if site + 1 < n {
                acc -= psi[k ^ (bit | (bit >> 1))];
            }
        }
        *o = acc;
    }
}

/// Energy `⟨ψ|H|ψ⟩` of a statevector under the Ising chain.
pub fn ising_energy(state: &StateVector, params: &IsingParams) -> f64 {
    let mut h_psi = vec![C64::new(0.0, 0.0); state.amplitudes.len()];
    ising_apply(state.n_sites, params, &state.amplitudes, &mut h_psi);
    state.amplitudes.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum()
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: StateVector,
    pub energy: f64,
    /// Gap to the next level of the full spectrum.
    pub gap: f64,
    /// Whether the lowest level is (numerically) degenerate.
    pub degenerate: bool,
}

/// Lowest eigenvector of the dense open-chain Hamiltonian. With `g = 0` the
/// search is restricted to the even-parity sector (`Π Z = +1`), which holds
/// the ground state for `h ≥ 0` and picks the symmetric combination at the
/// `h = 0` degeneracy; the gap still accounts for the odd sector.
pub fn exact_ground_state(n_sites: usize, params: &IsingParams) -> Result<GroundState> {
    ensure!((2..=MAX_DENSE_SITES).contains(&n_sites), "exact ground state needs 2..={MAX_DENSE_SITES} sites");
    params.validate()?;
    let full = ising_hamiltonian(n_sites, params)?;
    let dim = 1usize << n_sites;
    let sector_of = |keep: &dyn Fn(usize) -> bool| -> Vec<usize> { (0..dim).filter(|&k| keep(k)).collect() };
    let (basis, rest) = if params.g == 0.0 {
        (sector_of(&|k| k.count_ones() % 2 == 0), sector_of(&|k| k.count_ones() % 2 == 1))
    } else {
        (sector_of(&|_| true), Vec::new())
    };
    let restrict = |b: &[usize]| na::DMatrix::from_fn(b.len(), b.len(), |i, j| full[(b[i], b[j])]);
    let (values, vectors) = linalg::symmetric_eigen(restrict(&basis));
    let other_lowest = if rest.is_empty() {
        f64::INFINITY
    } else {
        linalg::symmetric_eigen(restrict(&rest)).0[0]
    };
    drop(full);
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
    for (i, &k) in basis.iter().enumerate() {
        amplitudes[k] = C64::new(vectors[(i, 0)], 0.0);
    }
    let next = values.get(1).copied().unwrap_or(f64::INFINITY).min(other_lowest);
    let gap = next - values[0];
    let degenerate = gap.abs() < 1e-8 * values[0].abs().max(1.0);
    Ok(GroundState { state: StateVector::normalized(n_sites, amplitudes)?, energy: values[0], gap, degenerate })
}

/// `e^{−iHt}|ψ⟩` by a scaled Taylor series of the sparse Hamiltonian action.
pub fn exact_evolve(state: &StateVector, params: &IsingParams, t: f64) -> Result<StateVector> {
    let n = state.n_sites();
    ensure!((2..=MAX_DENSE_SITES).contains(&n), "exact evolution needs 2..={MAX_DENSE_SITES} sites");
    ensure!(t.is_finite() && t >= 0.0, "evolution time must be finite and nonnegative");
    params.validate()?;
    if t == 0.0 {
        return Ok(state.clone());
    }
    // ‖H‖ ≤ (N−1) + N(|h| + |g|); keep each slice's series argument below 1/2
    let bound = (n - 1) as f64 + n as f64 * (params.h.abs() + params.g.abs());
    let slices = ((2.0 * bound * t).ceil() as usize).max(1);
    let tau = t / slices as f64;
    let mut psi = state.amplitudes.clone();
    let mut term = vec![C64::new(0.0, 0.0); psi.len()];
    let mut h_term = vec![C64::new(0.0, 0.0); psi.len()];
    for _ in 0..slices {
        term.copy_from_slice(&psi);
        let mut sum = psi.clone();
        for k in 1..=40 {
            ising_apply(n, params, &term, &mut h_term);
            let factor = C64::new(0.0, -tau / k as f64);
            let mut size = 0.0;
            for (t_i, (s, h)) in term.iter_mut().zip(sum.iter_mut().zip(&h_term)) {
                *t_i = *h * factor;
                *s += *t_i;
                size += t_i.norm_sqr();
            }
            if size.sqrt() < 1e-17 {
                break;
            }
        }
        psi = sum;
    }
    let out = StateVector { n_sites: n, amplitudes: psi };
    let norm: f64 = out.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(format!("exact evolution lost unitarity: norm² = {norm}")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub dof: usize,
    /// Number of bins after pooling (including the tail bin when present).
    pub bins: usize,
}

impl GoodnessOfFit {
    /// `|statistic − dof| ≤ width·√(2·dof)`.
    pub fn within(&self, width: f64) -> bool {
        (self.statistic - self.dof as f64).abs() <= width * (2.0 * self.dof as f64).sqrt()
    }
}

pub const MIN_EXPECTED_COUNT: f64 = 10.0;
pub const MIN_TOTAL_COUNT: u64 = 10_000;

/// Pearson χ² of `counts` (keyed by ordinal) against `exact_probs`. Bins with
/// expected count below 10 are pooled into one tail bin.
pub fn goodness_of_fit(counts: &HashMap<usize, u64>, exact_probs: &[f64]) -> Result<GoodnessOfFit> {
    ensure!(!counts.is_empty(), "goodness of fit needs nonempty counts");
    let total: u64 = counts.values().sum();
    ensure!(total >= MIN_TOTAL_COUNT, "goodness of fit needs at least {MIN_TOTAL_COUNT} counts, got {total}");
    ensure!(
        counts.keys().all(|&k| k < exact_probs.len()),
        "count key outside the exact distribution"
    );
    let nf = total as f64;
    let (mut statistic, mut bins) = (0.0, 0usize);
    let (mut tail_obs, mut tail_exp) = (0.0, 0.0);
    for (k, &p) in exact_probs.iter().enumerate() {
        let expected = p * nf;
        let observed = counts.get(&k).copied().unwrap_or(0) as f64;
        if expected < MIN_EXPECTED_COUNT {
            tail_obs += observed;
            tail_exp += expected;
        } else {
            statistic += (observed - expected).powi(2) / expected;
            bins += 1;
        }
    }
    if tail_exp > 0.0 {
        statistic += (tail_obs - tail_exp).powi(2) / tail_exp;
        bins += 1;
    } else if tail_obs > 0.0 {
        return Err(Error::Numerical(format!("{tail_obs} counts landed on zero-probability strings")));
    }
    ensure!(bins >= 2, "goodness of fit needs at least two bins after pooling");
    Ok(GoodnessOfFit { statistic, dof: bins - 1, bins })
}

/// `total` independent draws from `probs` by inverse CDF, keyed by index.
pub fn multinomial_draw(probs: &[f64], total: u64, rng: &mut impl Rng) -> HashMap<usize, u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut counts = HashMap::new();
    for _ in 0..total {
        let u = rng.gen::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        *counts.entry(k).or_insert(0) += 1;
    }
    counts
}

/// Writes `string,Π` rows in ordinal order.
pub fn write_distribution_csv(n_sites: usize, probs: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "string,probability")?;
    for (ordinal, p) in probs.iter().enumerate() {
        writeln!(out, "{},{:.16e}", PauliString::from_ordinal(n_sites, ordinal), p)?;
    }
    out.flush()?;
    Ok(())
}

/// Per-string expectations in parallel, independent of the transform route.
pub fn expectations_by_kernel(state: &StateVector) -> Result<Vec<f64>> {
    let n = state.n_sites();
    ensure!(n <= MAX_ENUMERATION_SITES, "enumeration limited to {MAX_ENUMERATION_SITES} sites, got {n}");
    (0..1usize << (2 * n))
        .into_par_iter()
        .map(|o| state.pauli_expectation(&PauliString::from_ordinal(n, o)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{t_state_mps, bloch_product_mps};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, LN_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_of_zero_vectors_is_basis_state() {
        let sv = StateVector::from_mps(&Mps::zero_state(3).unwrap()).unwrap();
        assert_eq!(sv.amplitudes()[0], c(1.0, 0.0));
        assert!(sv.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn bell_pair_amplitudes() {
        let sv = StateVector::from_mps(&Mps::ghz(2).unwrap()).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for (a, b) in sv.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn contraction_agrees_with_gate_route() {
        // same state built two ways: random MPS contracted, and the overlap with itself
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mps = Mps::random(6, 4, &mut rng).unwrap();
        let a = StateVector::from_mps(&mps).unwrap();
        let b = StateVector::from_mps(&Mps::from_json(&mps.to_json().unwrap()).unwrap()).unwrap();
        assert!((a.overlap(&b).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn guard_rejects_large_states() {
        let mps = Mps::zero_state(MAX_STATEVECTOR_SITES + 1).unwrap();
        assert!(matches!(StateVector::from_mps(&mps), Err(Error::Contract(_))));
        let sv = StateVector::zero_state(11).unwrap();
        assert!(matches!(enumerate_pauli_distribution(&sv), Err(Error::Contract(_))));
    }

    #[test]
    fn single_qubit_spectra() {
        let zero = StateVector::zero_state(1).unwrap();
        assert_eq!(enumerate_pauli_distribution(&zero).unwrap(), vec![0.5, 0.0, 0.0, 0.5]);
        let t = StateVector::from_mps(&t_state_mps(1, FRAC_PI_4).unwrap()).unwrap();
        let pi = enumerate_pauli_distribution(&t).unwrap();
        for (a, b) in pi.iter().zip([0.5, 0.25, 0.25, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_route_matches_bit_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in 1..=5 {
            let sv = StateVector::from_mps(&Mps::random(n, 4, &mut rng).unwrap()).unwrap();
            let fast = enumerate_pauli_distribution(&sv).unwrap();
            let slow = expectations_by_kernel(&sv).unwrap();
            let scale = 1.0 / (1u64 << n) as f64;
            for (f, e) in fast.iter().zip(slow) {
                assert!((f - e * e * scale).abs() < 1e-12);
            }
            let total: f64 = fast.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stabilizer_and_t_state_sres() {
        let ghz = StateVector::from_mps(&Mps::ghz(4).unwrap()).unwrap();
        for n in [1.0, 2.0, 3.0] {
            assert!(exact_sre(&ghz, n).unwrap().abs() < 1e-14);
        }
        let t = StateVector::from_mps(&t_state_mps(4, FRAC_PI_4).unwrap()).unwrap();
        assert!((exact_sre(&t, 2.0).unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((exact_sre(&t, 1.0).unwrap() - 0.5 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn mixed_basis_product_has_log_three_halves() {
        let mps = bloch_product_mps(4, [1.0 / 3.0; 3]).unwrap();
        let sv = StateVector::from_mps(&mps).unwrap();
        assert!((exact_sre(&sv, 2.0).unwrap() - 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn renyi_ordering_on_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let sv = StateVector::from_mps(&Mps::random(5, 4, &mut rng).unwrap()).unwrap();
        let m = exact_sre_many(&sv, &[1.0, 2.0, 3.0]).unwrap();
        assert!(m[0] >= m[1] && m[1] >= m[2], "{m:?}");
    }

    #[test]
    fn paramagnetic_ground_state() {
        let gs = exact_ground_state(6, &IsingParams::new(100.0, 0.0)).unwrap();
        for site in 0..6 {
            let z = gs.state.pauli_expectation(&PauliString::single(6, site, Pauli::Z)).unwrap();
            assert!(z > 0.999);
        }
    }

    #[test]
    fn ferromagnetic_ground_state_is_flagged_and_aligned() {
        let gs = exact_ground_state(6, &IsingParams::new(0.0, 0.0)).unwrap();
        assert!((gs.energy + 5.0).abs() < 1e-10);
        assert!(gs.degenerate && gs.gap.abs() < 1e-10);
        for site in 0..5 {
            let mut letters = vec![Pauli::I; 6];
            letters[site] = Pauli::X;
            letters[site + 1] = Pauli::X;
            let xx = gs.state.pauli_expectation(&PauliString::new(letters)).unwrap();
            assert!((xx.abs() - 1.0).abs() < 1e-10);
        }
        // the full spectrum has the two cat states; the even sector holds one of them
        let full = ising_hamiltonian(6, &IsingParams::new(0.0, 0.0)).unwrap();
        let (values, _) = linalg::symmetric_eigen(full);
        assert!((values[1] - values[0]).abs() < 1e-10);
    }

    #[test]
    fn ground_energy_matches_full_spectrum() {
        let params = IsingParams::new(0.7, 0.0);
        let gs = exact_ground_state(6, &params).unwrap();
        let (values, _) = linalg::symmetric_eigen(ising_hamiltonian(6, &params).unwrap());
        assert!((gs.energy - values[0]).abs() < 1e-10);
        assert!((gs.gap - (values[1] - values[0])).abs() < 1e-10);
        assert!(!gs.degenerate);
        assert!((ising_energy(&gs.state, &params) - gs.energy).abs() < 1e-10);
        let tilted = IsingParams::new(0.7, 0.2);
        let gs = exact_ground_state(6, &tilted).unwrap();
        let (values, _) = linalg::symmetric_eigen(ising_hamiltonian(6, &tilted).unwrap());
        assert!((gs.energy - values[0]).abs() < 1e-10);
    }

    #[test]
    fn evolution_oracle_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let sv = StateVector::from_mps(&Mps::random(6, 4, &mut rng).unwrap()).unwrap();
        let params = IsingParams::new(0.5, 0.25);
        assert_eq!(exact_evolve(&sv, &params, 0.0).unwrap(), sv);
        let plus = StateVector::from_mps(&t_state_mps(6, 0.0).unwrap()).unwrap();
        let still = exact_evolve(&plus, &IsingParams::new(0.0, 0.0), 1.3).unwrap();
        assert!((still.fidelity(&plus) - 1.0).abs() < 1e-12);
        // compare against the dense eigenbasis propagator
        let (values, vectors) = linalg::symmetric_eigen(ising_hamiltonian(6, &params).unwrap());
        let t = 0.8;
        let coeffs: Vec<C64> = (0..values.len())
            .map(|j| (0..64).map(|k| sv.amplitudes()[k] * vectors[(k, j)]).sum::<C64>())
            .collect();
        let dense: Vec<C64> = (0..64)
            .map(|k| {
                (0..values.len())
                    .map(|j| coeffs[j] * C64::from_polar(1.0, -values[j] * t) * vectors[(k, j)])
                    .sum()
            })
            .collect();
        let evolved = exact_evolve(&sv, &params, t).unwrap();
        for (a, b) in evolved.amplitudes().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn evolution_preserves_norm_at_ten_sites() {
        let sv = StateVector::from_mps(&t_state_mps(10, 0.3).unwrap()).unwrap();
        let out = exact_evolve(&sv, &IsingParams::new(0.5, 0.25), 5.0).unwrap();
        let norm: f64 = out.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_counts_give_zero_statistic() {
        let probs = vec![0.25, 0.25, 0.5];
        let counts: HashMap<usize, u64> = [(0, 2500), (1, 2500), (2, 5000)].into_iter().collect();
        let fit = goodness_of_fit(&counts, &probs).unwrap();
        assert_eq!(fit.statistic, 0.0);
        assert_eq!(fit.dof, 2);
    }

    #[test]
    fn goodness_of_fit_contracts() {
        let probs = vec![0.5, 0.5];
        assert!(matches!(goodness_of_fit(&HashMap::new(), &probs), Err(Error::Contract(_))));
        let few: HashMap<usize, u64> = [(0, 10), (1, 10)].into_iter().collect();
        assert!(matches!(goodness_of_fit(&few, &probs), Err(Error::Contract(_))));
    }

    #[test]
    fn multinomial_self_calibration() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let sv = StateVector::from_mps(&Mps::random(3, 4, &mut rng).unwrap()).unwrap();
        let probs = enumerate_pauli_distribution(&sv).unwrap();
        let passes = (0..100)
            .filter(|_| {
                let counts = multinomial_draw(&probs, 100_000, &mut rng);
                goodness_of_fit(&counts, &probs).unwrap().within(4.0)
            })
            .count();
        assert!(passes >= 95, "{passes}/100");
    }

    #[test]
    fn reduced_distribution_of_bell_pair() {
        let bell = StateVector::from_mps(&Mps::ghz(2).unwrap()).unwrap();
        let pi = enumerate_reduced_distribution(&bell, 1).unwrap();
        assert_eq!(pi.len(), 4);
        assert!((pi[0] - 1.0).abs() < 1e-14);
        assert!(pi[1..].iter().all(|p| p.abs() < 1e-14));
    }

    #[test]
    fn csv_dump_has_one_row_per_string() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pi.csv");
        let probs = enumerate_pauli_distribution(&StateVector::zero_state(2).unwrap()).unwrap();
        write_distribution_csv(2, &probs, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.lines().nth(1).unwrap().starts_with("II,2.5"));
    }
}
