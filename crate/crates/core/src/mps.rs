//! Open-boundary qubit matrix product states.
//!
//! ```text
//!  1     χ₁     χ₂          χ_{N-1}     1
//! ---A₀-------A₁------ ... -------A_{N-1}---
//!    |        |                   |
//!    s₀       s₁                  s_{N-1}
//! ```
//!
//! Public operations take `&self` and return new states. The sampler only
//! needs the right-normalized gauge (`Σ_s A^s (A^s)† = 1` at every site), so
//! that is the one canonical form exposed; gate sweeps internally carry a
//! movable orthogonality center and hand back a right-normalized state.

use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{self, gemm_into, qr_decompose, svd_truncate, ComplexMatrix, MatView, Tensor3};
use crate::pauli::{Pauli, PauliString};

const UNIT_NORM_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const IMAG_DROP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonicalForm {
    RightNormalized,
    Unnormalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    tensors: Vec<Tensor3>,
    form: CanonicalForm,
}

impl Mps {
    /// Wraps raw site tensors after checking the bond structure.
    pub fn from_tensors(tensors: Vec<Tensor3>) -> Result<Self> {
        validate_chain(&tensors)?;
        Ok(Self { tensors, form: CanonicalForm::Unnormalized })
    }

    /// Bond-dimension-one state from unit-norm local vectors `(a₀, a₁)`.
    pub fn product_state(local: &[[C64; 2]]) -> Result<Self> {
        ensure!(!local.is_empty(), "product state needs at least one site");
        let tensors = local
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let norm = v[0].norm_sqr() + v[1].norm_sqr();
                ensure!(
                    (norm - 1.0).abs() <= UNIT_NORM_TOL,
                    "local vector at site {j} has squared norm {norm}"
                );
                Tensor3::from_vec(1, 2, 1, v.to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tensors, form: CanonicalForm::RightNormalized })
    }

    /// |0…0⟩.
    pub fn zero_state(n: usize) -> Result<Self> {
        let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        Self::product_state(&vec![zero; n])
    }

    /// (|0…0⟩ + |1…1⟩)/√2 with bond dimension 2, built directly.
    pub fn ghz(n: usize) -> Result<Self> {
        ensure!(n >= 2, "GHZ state needs at least two sites");
        let one = C64::new(1.0, 0.0);
        let o = C64::new(0.0, 0.0);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut tensors = Vec::with_capacity(n);
        tensors.push(Tensor3::from_vec(1, 2, 2, vec![h, o, o, h])?);
        for _ in 1..n - 1 {
            // (l, s, r): nonzero only for l = s = r
            tensors.push(Tensor3::from_vec(2, 2, 2, vec![one, o, o, o, o, o, o, one])?);
        }
        tensors.push(Tensor3::from_vec(2, 2, 1, vec![one, o, o, one])?);
        Ok(Self { tensors, form: CanonicalForm::RightNormalized })
    }

    /// Random complex tensors with bonds `min(chi, 2^j, 2^(N-j))`, right-normalized.
    pub fn random(n: usize, chi: usize, rng: &mut impl Rng) -> Result<Self> {
        ensure!(n >= 1 && chi >= 1, "random MPS needs n >= 1 and chi >= 1");
        let bonds: Vec<usize> = (0..=n).map(|j| chi.min(pow2_cap(j)).min(pow2_cap(n - j))).collect();
        Self::random_with_bonds(&bonds, rng)
    }

    /// Random right-normalized MPS with the given `N + 1` bond dimensions
    /// (outer bonds 1). Right-normalizability needs `bonds[j] ≤ 2 bonds[j+1]`;
    /// bonds above the Schmidt rank are allowed and stay in the representation.
    pub fn random_with_bonds(bonds: &[usize], rng: &mut impl Rng) -> Result<Self> {
        ensure!(bonds.len() >= 2, "need at least one site");
        let n = bonds.len() - 1;
        ensure!(bonds[0] == 1 && bonds[n] == 1, "outer bonds must be 1, got {bonds:?}");
        ensure!(
            bonds.windows(2).all(|w| w[0] >= 1 && w[0] <= 2 * w[1]),
            "bonds {bonds:?} are not right-normalizable"
        );
        let tensors = (0..n)
            .map(|j| {
                let (l, r) = (bonds[j], bonds[j + 1]);
                let entries = (0..l * 2 * r)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                Tensor3::from_vec(l, 2, r, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_tensors(tensors)?.right_normalize()
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensors(&self) -> &[Tensor3] {
        &self.tensors
    }

    pub fn tensor(&self, site: usize) -> &Tensor3 {
        &self.tensors[site]
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.form
    }

    pub fn is_right_normalized(&self) -> bool {
        self.form == CanonicalForm::RightNormalized
    }

    /// Bond dimensions between neighbouring sites (length N-1).
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.tensors.len() - 1].iter().map(|t| t.right_dim()).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.tensors.iter().map(|t| t.right_dim().max(t.left_dim())).max().unwrap_or(1)
    }

    /// Worst deviation of `Σ_s A^s (A^s)†` from the identity over all sites.
    pub fn right_orthonormality_residual(&self) -> f64 {
        self.tensors.iter().map(|t| t.right_orthonormality_residual()).fold(0.0, f64::max)
    }

    /// Right-canonical gauge by a right-to-left QR sweep, rescaled to unit norm.
    /// The carried factor is rescaled at every step, so long chains whose raw
    /// norm over- or underflows are still handled.
    pub fn right_normalize(&self) -> Result<Mps> {
        let mut tensors = self.tensors.clone();
        for c in (1..tensors.len()).rev() {
            let (q, r) = qr_decompose(&tensors[c].to_right_fused().adjoint())?;
            let norm = r.frobenius_norm();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Contract("cannot normalize a zero-norm state".into()));
            }
            let r = r.scaled(C64::new(1.0 / norm, 0.0));
            let prev = linalg::matmul(&tensors[c - 1].to_left_fused(), &r.adjoint())?;
            tensors[c] = Tensor3::from_right_fused(q.adjoint(), 2)?;
            tensors[c - 1] = Tensor3::from_left_fused(prev, 2)?;
        }
        Centered { tensors, center: 0 }.into_right_normalized()
    }

    pub(crate) fn require_right_normalized(&self, what: &str) -> Result<()> {
        ensure!(self.is_right_normalized(), "{what} requires a right-normalized MPS");
        Ok(())
    }

    /// ⟨ψ|σ|ψ⟩ by one left-to-right transfer sweep.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        self.require_right_normalized("pauli_expectation")?;
        ensure!(
            p.len() == self.n_sites(),
            "Pauli string of length {} on a {}-site MPS",
            p.len(),
            self.n_sites()
        );
        let mut scratch = TransferScratch::default();
        let mut env = vec![C64::new(1.0, 0.0)];
        let mut dim = 1;
        for (tensor, letter) in self.tensors.iter().zip(p.iter()) {
            scratch.compute(&env, dim, tensor);
            scratch.combine_into(letter, &mut env);
            dim = scratch.dim();
        }
        real_part_checked(env[0], "pauli_expectation")
    }

    /// Expectations of several operators, each given as a start site and a
    /// contiguous run of letters. Shares one left-environment pass, so the
    /// total cost is O(Nχ³) plus O(χ³) per site touched by the operators.
    pub fn local_expectations(&self, terms: &[(usize, Vec<Pauli>)]) -> Result<Vec<f64>> {
        self.require_right_normalized("local_expectations")?;
        let n = self.n_sites();
        let mut scratch = TransferScratch::default();
        let mut envs: Vec<(Vec<C64>, usize)> = Vec::with_capacity(n);
        let mut env = vec![C64::new(1.0, 0.0)];
        let mut dim = 1;
        for tensor in &self.tensors {
            envs.push((env.clone(), dim));
            scratch.compute(&env, dim, tensor);
            scratch.combine_into(Pauli::I, &mut env);
            dim = scratch.dim();
        }
        terms
            .iter()
            .map(|(start, letters)| {
                ensure!(
                    !letters.is_empty() && start + letters.len() <= n,
                    "local operator at {start} with {} letters on {n} sites",
                    letters.len()
                );
                let (mut env, mut dim) = envs[*start].clone();
                for (k, &letter) in letters.iter().enumerate() {
                    scratch.compute(&env, dim, &self.tensors[start + k]);
                    scratch.combine_into(letter, &mut env);
                    dim = scratch.dim();
                }
                // right-normalization closes everything to the right with a trace
                let tr: C64 = (0..dim).map(|i| env[i * dim + i]).sum();
                real_part_checked(tr, "local_expectations")
            })
            .collect()
    }

    pub fn apply_one_qubit_gate(&self, site: usize, gate: &ComplexMatrix) -> Result<Mps> {
        ensure!(site < self.n_sites(), "site {site} out of range for {} sites", self.n_sites());
        ensure!(gate.rows() == 2 && gate.cols() == 2, "one-qubit gate must be 2x2");
        ensure_unitary(gate)?;
        let mut out = self.clone();
        out.tensors[site] = apply_one_site(&self.tensors[site], gate);
        Ok(out)
    }

    /// Contract sites `(site, site+1)`, apply a 4×4 unitary in the
    /// `|s_site s_{site+1}⟩` basis (index `2 s_site + s_{site+1}`), split by
    /// truncated SVD and restore the right-canonical gauge. Returns the new
    /// state and the discarded weight of the split.
    pub fn apply_two_qubit_gate(
        &self,
        site: usize,
        gate: &ComplexMatrix,
        chi_max: usize,
        cutoff: f64,
    ) -> Result<(Mps, f64)> {
        ensure!(
            site + 1 < self.n_sites(),
            "two-qubit gate at site {site} needs a right neighbour ({} sites)",
            self.n_sites()
        );
        ensure!(gate.rows() == 4 && gate.cols() == 4, "two-qubit gate must be 4x4");
        ensure_unitary(gate)?;
        let mut centered = Centered::from_mps(self)?;
        let update = centered.apply_two_site(site, gate, chi_max, cutoff, CenterSide::Left)?;
        Ok((centered.into_right_normalized()?, update.discarded_weight))
    }

    /// Schmidt coefficients across the bond left of site `cut`, descending.
    pub fn schmidt_values(&self, cut: usize) -> Result<Vec<f64>> {
        ensure!(
            cut >= 1 && cut < self.n_sites(),
            "cut {cut} outside 1..{} for {} sites",
            self.n_sites(),
            self.n_sites()
        );
        let mut centered = Centered::from_mps(self)?;
        centered.schmidt_values(cut)
    }

    /// Von Neumann entropy (natural log) across the bond left of site `cut`.
    pub fn entanglement_entropy(&self, cut: usize) -> Result<f64> {
        Ok(entropy_of(&self.schmidt_values(cut)?))
    }

    /// Sites `first_site..N` in a right-canonical gauge whose left bond is the
    /// Schmidt basis of the cut, together with the Schmidt coefficients.
    pub fn schmidt_gauge_right(&self, first_site: usize) -> Result<(Vec<f64>, Vec<Tensor3>)> {
        ensure!(
            first_site >= 1 && first_site < self.n_sites(),
            "subsystem start {first_site} outside 1..{}",
            self.n_sites()
        );
        let mut centered = Centered::from_mps(self)?;
        centered.move_center_to(first_site)?;
        let t = &centered.tensors[first_site];
        let svd = svd_truncate(&t.to_right_fused(), usize::MAX, 0.0)?;
        let norm = svd.singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
        let schmidt = svd.singular_values.iter().map(|s| s / norm).collect();
        let mut tensors = centered.tensors.split_off(first_site);
        tensors[0] = Tensor3::from_right_fused(svd.vt, 2)?;
        Ok((schmidt, tensors))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&MpsFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Mps> {
        let file: MpsFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Mps> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn entropy_of(schmidt: &[f64]) -> f64 {
    schmidt
        .iter()
        .map(|l| l * l)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

fn real_part_checked(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_DROP_TOL {
        return Err(Error::Numerical(format!("{what}: imaginary residual {:e}", z.im)));
    }
    Ok(z.re)
}

fn validate_chain(tensors: &[Tensor3]) -> Result<()> {
    ensure!(!tensors.is_empty(), "MPS needs at least one site");
    ensure!(tensors[0].left_dim() == 1, "left boundary bond must be 1");
    ensure!(tensors[tensors.len() - 1].right_dim() == 1, "right boundary bond must be 1");
    for (j, t) in tensors.iter().enumerate() {
        ensure!(t.phys_dim() == 2, "site {j} has physical dimension {}", t.phys_dim());
        ensure!(t.is_finite(), "site {j} has non-finite entries");
    }
    for (j, pair) in tensors.windows(2).enumerate() {
        ensure!(
            pair[0].right_dim() == pair[1].left_dim(),
            "bond mismatch between sites {j} and {}: {} vs {}",
            j + 1,
            pair[0].right_dim(),
            pair[1].left_dim()
        );
    }
    Ok(())
}

fn ensure_unitary(gate: &ComplexMatrix) -> Result<()> {
    let residual = gate.column_orthonormality_residual();
    ensure!(residual <= UNITARY_TOL, "gate is not unitary (residual {residual:e})");
    Ok(())
}

pub(crate) fn apply_one_site(t: &Tensor3, gate: &ComplexMatrix) -> Tensor3 {
    let mut out = Tensor3::zeros(t.left_dim(), 2, t.right_dim());
    for l in 0..t.left_dim() {
        for r in 0..t.right_dim() {
            let a0 = t.get(l, 0, r);
            let a1 = t.get(l, 1, r);
            *out.get_mut(l, 0, r) = gate[(0, 0)] * a0 + gate[(0, 1)] * a1;
            *out.get_mut(l, 1, r) = gate[(1, 0)] * a0 + gate[(1, 1)] * a1;
        }
    }
    out
}

/// Per-site transfer blocks `C^{s's} = (A^{s'})† L A^s` for a square left
/// environment `L`. Any single-site operator transfer is a linear
/// combination of the four blocks, so one `compute` serves all four Pauli
/// letters at a cost of six χ×χ products.
#[derive(Default)]
pub(crate) struct TransferScratch {
    left_applied: [Vec<C64>; 2],
    blocks: [Vec<C64>; 4],
    dim: usize,
}

impl TransferScratch {
    pub(crate) fn compute(&mut self, env: &[C64], env_dim: usize, tensor: &Tensor3) {
        debug_assert_eq!(env_dim, tensor.left_dim());
        let (l, r) = (tensor.left_dim(), tensor.right_dim());
        let env_view = MatView::dense(env, env_dim, env_dim);
        for s in 0..2 {
            let buf = &mut self.left_applied[s];
            buf.resize(l * r, C64::new(0.0, 0.0));
            gemm_into(buf, env_view, tensor.slice(s));
        }
        for sp in 0..2 {
            for s in 0..2 {
                let buf = &mut self.blocks[sp * 2 + s];
                buf.resize(r * r, C64::new(0.0, 0.0));
                gemm_into(
                    buf,
                    tensor.slice(sp).adjoint(),
                    MatView::dense(&self.left_applied[s], l, r),
                );
            }
        }
        self.dim = r;
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    /// `out = Σ_{s',s} σ_{s's} C^{s's}`.
    pub(crate) fn combine_into(&self, p: Pauli, out: &mut Vec<C64>) {
        let n = self.dim * self.dim;
        out.clear();
        out.resize(n, C64::new(0.0, 0.0));
        let m = p.matrix();
        for sp in 0..2 {
            for s in 0..2 {
                let coeff = m[sp][s];
                if coeff.re == 0.0 && coeff.im == 0.0 {
                    continue;
                }
                for (o, &c) in out.iter_mut().zip(&self.blocks[sp * 2 + s]) {
                    *o += coeff * c;
                }
            }
        }
    }

    /// `‖Σ_{s',s} σ_{s's} C^{s's}‖_F²` for every letter, in `Pauli::ALL` order.
    pub(crate) fn combined_norms_sqr(&self) -> [f64; 4] {
        let [c00, c01, c10, c11] = &self.blocks;
        let i = C64::new(0.0, 1.0);
        let mut out = [0.0; 4];
        for k in 0..self.dim * self.dim {
            out[0] += (c00[k] + c11[k]).norm_sqr();
            out[1] += (c01[k] + c10[k]).norm_sqr();
            out[2] += (-i * c01[k] + i * c10[k]).norm_sqr();
            out[3] += (c00[k] - c11[k]).norm_sqr();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CenterSide {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct BondUpdate {
    pub discarded_weight: f64,
    /// Squared norm retained after truncation, before renormalization.
    pub norm_sqr_kept: f64,
}

/// Mixed-canonical working form: sites left of `center` are
/// left-orthonormal, sites right of it right-orthonormal.
#[derive(Clone, Debug)]
pub(crate) struct Centered {
    pub(crate) tensors: Vec<Tensor3>,
    pub(crate) center: usize,
}

impl Centered {
    pub(crate) fn from_mps(mps: &Mps) -> Result<Self> {
        if mps.is_right_normalized() {
            Ok(Self { tensors: mps.tensors.clone(), center: 0 })
        } else {
            let normalized = mps.right_normalize()?;
            Ok(Self { tensors: normalized.tensors, center: 0 })
        }
    }

    pub(crate) fn move_center_to(&mut self, target: usize) -> Result<()> {
        while self.center < target {
            let c = self.center;
            let (q, r) = qr_decompose(&self.tensors[c].to_left_fused())?;
            let next = linalg::matmul(&r, &self.tensors[c + 1].to_right_fused())?;
            self.tensors[c] = Tensor3::from_left_fused(q, 2)?;
            self.tensors[c + 1] = Tensor3::from_right_fused(next, 2)?;
            self.center += 1;
        }
        while self.center > target {
            let c = self.center;
            // LQ via QR of the adjoint: M = R† Q†
            let (q, r) = qr_decompose(&self.tensors[c].to_right_fused().adjoint())?;
            let prev = linalg::matmul(&self.tensors[c - 1].to_left_fused(), &r.adjoint())?;
            self.tensors[c] = Tensor3::from_right_fused(q.adjoint(), 2)?;
            self.tensors[c - 1] = Tensor3::from_left_fused(prev, 2)?;
            self.center -= 1;
        }
        Ok(())
    }

    pub(crate) fn apply_one_site(&mut self, site: usize, gate: &ComplexMatrix) {
        self.tensors[site] = apply_one_site(&self.tensors[site], gate);
    }

    /// Gate on `(site, site+1)`; the kept singular values are renormalized to
    /// unit norm and absorbed on `side`, which becomes the new center.
    pub(crate) fn apply_two_site(
        &mut self,
        site: usize,
        gate: &ComplexMatrix,
        chi_max: usize,
        cutoff: f64,
        side: CenterSide,
    ) -> Result<BondUpdate> {
        if self.center < site {
            self.move_center_to(site)?;
        } else if self.center > site + 1 {
            self.move_center_to(site + 1)?;
        }
        let a = &self.tensors[site];
        let b = &self.tensors[site + 1];
        let (l, r) = (a.left_dim(), b.right_dim());
        let theta = linalg::matmul(&a.to_left_fused(), &b.to_right_fused())?;
        // theta rows (l, s), cols (t, r); gated[(l,s'),(t',r)] = Σ G[(s't'),(st)] theta[(l,s),(t,r)]
        let mut gated = ComplexMatrix::zeros(2 * l, 2 * r);
        for li in 0..l {
            for ri in 0..r {
                let mut local = [C64::new(0.0, 0.0); 4];
                for s in 0..2 {
                    for t in 0..2 {
                        local[2 * s + t] = theta[(li * 2 + s, t * r + ri)];
                    }
                }
                for sp in 0..2 {
                    for tp in 0..2 {
                        let row = 2 * sp + tp;
                        let v: C64 = (0..4).map(|k| gate[(row, k)] * local[k]).sum();
                        gated[(li * 2 + sp, tp * r + ri)] = v;
                    }
                }
            }
        }
        let svd = svd_truncate(&gated, chi_max, cutoff)?;
        let norm_sqr_kept: f64 = svd.singular_values.iter().map(|s| s * s).sum();
        if !(norm_sqr_kept > 0.0) || !norm_sqr_kept.is_finite() {
            return Err(Error::Numerical("two-site block collapsed to zero norm".into()));
        }
        let scale = norm_sqr_kept.sqrt();
        let k = svd.rank();
        let s: Vec<f64> = svd.singular_values.iter().map(|v| v / scale).collect();
        let (left, right) = match side {
            CenterSide::Left => {
                let us = ComplexMatrix::from_fn(2 * l, k, |i, j| svd.u[(i, j)] * s[j]);
                (us, svd.vt)
            }
            CenterSide::Right => {
                let svt = ComplexMatrix::from_fn(k, 2 * r, |i, j| svd.vt[(i, j)] * s[i]);
                (svd.u, svt)
            }
        };
        self.tensors[site] = Tensor3::from_left_fused(left, 2)?;
        self.tensors[site + 1] = Tensor3::from_right_fused(right, 2)?;
        self.center = match side {
            CenterSide::Left => site,
            CenterSide::Right => site + 1,
        };
        Ok(BondUpdate { discarded_weight: svd.discarded_weight, norm_sqr_kept })
    }

    pub(crate) fn schmidt_values(&mut self, cut: usize) -> Result<Vec<f64>> {
        self.move_center_to(cut)?;
        let svd = svd_truncate(&self.tensors[cut].to_right_fused(), usize::MAX, 0.0)?;
        let norm = svd.singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
        ensure!(norm > 0.0, "zero-norm state has no Schmidt decomposition");
        Ok(svd.singular_values.iter().map(|s| s / norm).collect())
    }

    pub(crate) fn into_right_normalized(mut self) -> Result<Mps> {
        self.move_center_to(0)?;
        let norm = self.tensors[0].frobenius_norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Contract("cannot normalize a zero-norm state".into()));
        }
        self.tensors[0].scale(C64::new(1.0 / norm, 0.0));
        Ok(Mps { tensors: self.tensors, form: CanonicalForm::RightNormalized })
    }
}

fn pow2_cap(k: usize) -> usize {
    if k >= 30 { usize::MAX } else { 1usize << k }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpsFile {
    n_sites: usize,
    canonical_form: CanonicalForm,
    tensors: Vec<Tensor3>,
}

impl From<&Mps> for MpsFile {
    fn from(mps: &Mps) -> Self {
        Self { n_sites: mps.n_sites(), canonical_form: mps.form, tensors: mps.tensors.clone() }
    }
}

impl TryFrom<MpsFile> for Mps {
    type Error = Error;

    fn try_from(file: MpsFile) -> Result<Self> {
        let tensors = file
            .tensors
            .into_iter()
            .map(|t| {
                let (l, p, r) = (t.left_dim(), t.phys_dim(), t.right_dim());
                Tensor3::from_vec(l, p, r, t.as_slice().to_vec())
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Format(e.to_string()))?;
        if tensors.len() != file.n_sites {
            return Err(Error::Format(format!(
                "n_sites is {} but {} tensors are stored",
                file.n_sites,
                tensors.len()
            )));
        }
        validate_chain(&tensors).map_err(|e| Error::Format(e.to_string()))?;
        let mps = Mps { tensors, form: file.canonical_form };
        if mps.is_right_normalized() && mps.right_orthonormality_residual() > 1e-8 {
            return Err(Error::Format("file claims right-normalized tensors but they are not".into()));
        }
        Ok(mps)
    }
}
