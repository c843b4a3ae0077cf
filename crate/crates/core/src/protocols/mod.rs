//! End-to-end pipelines. Each is generic over an [`Engine`] so the same code
//! runs on the sparse engine and on the dense oracle.

mod engine;
mod postselection;
mod report;
mod sampling;
mod scheme_a;
mod scheme_b;
mod swapping;

pub use engine::{Engine, SparseEngine};
pub use postselection::{
    analyze_polarization_postselection, analyze_polarization_postselection_with, analyze_vacuum_one_photon,
    analyze_vacuum_one_photon_with, polarization_psi, PolParams, VacParams,
};
pub use report::{Branch, EventRecord, ProtocolReport, BRANCH_REPORT_THRESHOLD};
pub use sampling::{sample_run, SampledCounts, SampledRow};
pub use scheme_a::{
    ideal_herald_state, run_phase_verification, run_phase_verification_with, run_scheme_a, run_scheme_a_with, Herald,
    PhaseParams, SchemeAParams,
};
pub use scheme_b::{run_scheme_b, run_scheme_b_with, scheme_b_state, scheme_b_state_with, SchemeBParams, Variant};
pub use swapping::{
    bell_decomposition_check, bell_decomposition_check_with, run_theta_swapping, run_theta_swapping_with,
};

use crate::error::Result;

/// A fully parameterized run of one pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    A(SchemeAParams),
    B(SchemeBParams),
    Theta(f64),
    BellCheck,
    PostselectPol(PolParams),
    PostselectVac(VacParams),
    VerifyPhase(PhaseParams),
}

impl Scheme {
    pub fn run(&self) -> Result<ProtocolReport> {
        self.run_with(&SparseEngine::default())
    }

    pub fn run_with<E: Engine>(&self, engine: &E) -> Result<ProtocolReport> {
        match *self {
            Scheme::A(p) => run_scheme_a_with(engine, p),
            Scheme::B(p) => run_scheme_b_with(engine, p),
            Scheme::Theta(theta) => run_theta_swapping_with(engine, theta),
            Scheme::BellCheck => bell_decomposition_check_with(engine),
            Scheme::PostselectPol(p) => analyze_polarization_postselection_with(engine, p),
            Scheme::PostselectVac(p) => analyze_vacuum_one_photon_with(engine, p),
            Scheme::VerifyPhase(p) => run_phase_verification_with(engine, p),
        }
    }
}
