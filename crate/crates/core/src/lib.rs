//! Stabilizer Rényi entropies of qubit matrix product states, estimated by
//! perfect sampling of Pauli strings.
//!
//! Sampling a string costs O(Nχ³) for an N-site MPS of bond dimension χ, and
//! the estimators need only the sampled log-probabilities. Small systems can
//! be checked against the brute-force routines in [`exact`].
//!
//! ```
//! use magic_mps::{circuits, estimator, sampler};
//!
//! let mps = circuits::t_state_mps(6, std::f64::consts::FRAC_PI_4).unwrap();
//! let records = sampler::sample_batch(&mps, 2000, 7).unwrap();
//! let m2 = estimator::estimate(&records, 2.0, 6).unwrap();
//! assert!((m2.m_density - (4.0f64 / 3.0).ln()).abs() < 5.0 * m2.std_error);
//! ```

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circuits;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod harness;
pub mod linalg;
pub mod mps;
pub mod pauli;
pub mod sampler;

pub use error::{Error, Result};
pub use mps::{CanonicalForm, Mps};
pub use pauli::{Pauli, PauliString};
pub use sampler::{sample_batch, sample_string, SampleRecord};
