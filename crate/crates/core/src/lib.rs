//! Exact simulation and certification engine for sequential weak-measurement
//! Bell tests on a pair of qubits.
//!
//! One party holds a qubit of the pure state `cos(θ)|00⟩ + sin(θ)|11⟩` and
//! measures it once; the other subjects his qubit to a chain of weak
//! measurements, each tuned by a strength parameter ξ that interpolates
//! between projective (ξ = 0) and non-interacting (ξ = π/4). Every step in
//! the chain violates a tilted two-input Bell inequality, and each violation
//! converts into a device-independent bound on an eavesdropper's guessing
//! probability, hence into certified min-entropy.
//!
//! The crate is organised around that pipeline:
//!
//! - [`qstate`] — exact two-qubit linear algebra: state construction, Kraus
//!   updates, expectation values, and a numerically stable Schmidt
//!   decomposition.
//! - [`bell`] — the `I_{α,β}` Bell family, its maximal quantum value, and the
//!   violation → guessing-probability → min-entropy conversion.
//! - [`sequence`] — the protocol engine: branch trees over outcome histories,
//!   corrective unitaries, the measurement bank, and certification reports.
//! - [`optimize`] — a seeded derivative-free search over all qubit strategies
//!   used to verify the conjectured quadratic bound behind the conversion.
//! - [`montecarlo`] — finite statistics: seeded round sampling, correlator
//!   estimation with standard errors, and white-noise robustness sweeps.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` to build without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("seqbell-core needs a float math backend: enable `std` or `libm`");

mod math;

pub mod bell;
pub mod error;
pub mod mat2;
pub mod montecarlo;
pub mod optimize;
pub mod qstate;
pub mod sequence;

pub use error::{Error, Result};
pub use qstate::{BlochObservable, KrausPair, Outcome, SchmidtForm, TwoQubitState};
