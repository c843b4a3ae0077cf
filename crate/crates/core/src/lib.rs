//! Linear-optics simulation of photonic entanglement swapping on a truncated
//! Fock space.
//!
//! States are sparse kets over named modes ([`fock`]). Passive optics act as
//! mode unitaries lifted to Fock space ([`optics`]), sources produce SPDC
//! pairs and the hand-written product states ([`sources`]), and threshold
//! detectors with efficiency `η` condition the rest of the state
//! ([`detection`]). [`protocols`] strings these together into the swapping
//! pipelines and reports probabilities and Bell-state fidelities.
//! [`oracle`] is an independent dense engine used to cross-check everything.
//!
//! ```
//! use fockswap::protocols::{run_scheme_a, SchemeAParams};
//!
//! let report = run_scheme_a(SchemeAParams::from_tau2(1e-3, 1.0, 1)).unwrap();
//! let e1 = report.event("event1").unwrap();
//! assert!(e1.fidelity_psi_plus > 0.999);
//! ```
//!
//! The `examples/` directory has one runnable program per pipeline:
//! `bell_decomposition`, `theta_swapping`, `scheme_a`, `phase_verification`,
//! `scheme_b`, `polarization_postselection`, `vacuum_one_photon`,
//! `oracle_crosscheck`, `sampling` and `sweep_scaling`.

pub mod cli;
pub mod detection;
pub mod error;
pub mod fock;
pub mod optics;
pub mod oracle;
pub mod protocols;
pub mod sources;

pub use error::{Error, Result};
pub use fock::{bell_state, BellKind, FockKet, ModeRegister, Occupation, WeightedEnsemble};
pub use num_complex::Complex64;
pub use optics::{apply_mode_unitary, balanced_bs, unbalanced_bs, ModeUnitary};
