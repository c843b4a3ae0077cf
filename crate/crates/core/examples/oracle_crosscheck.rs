//! Runs every pipeline on both the sparse engine and the dense permanent
//! oracle and reports the largest disagreement.

use fockswap::oracle::DenseEngine;
use fockswap::protocols::{
    Herald, PhaseParams, PolParams, Scheme, SchemeAParams, SchemeBParams, SparseEngine, VacParams, Variant,
};
use fockswap::sources::PolarizationWeights;
use fockswap::Complex64;
use std::time::Instant;

fn main() -> fockswap::Result<()> {
    let tau = Complex64::new(0.1, 0.0);
    let schemes = [
        Scheme::BellCheck,
        Scheme::Theta(0.4),
        Scheme::A(SchemeAParams::from_tau2(0.01, 0.7, 2)),
        Scheme::VerifyPhase(PhaseParams {
            tau,
            eta: 0.8,
            order: 2,
            herald: Herald::SchemeA,
        }),
        Scheme::B(SchemeBParams::new(0.2, 0.6)),
        Scheme::B(SchemeBParams {
            order: 2,
            tau,
            ..SchemeBParams::new(0.2, 0.6).variant(Variant::Pbs)
        }),
        Scheme::PostselectPol(PolParams {
            eta: 0.9,
            weights: PolarizationWeights::AS_PRINTED,
        }),
        Scheme::PostselectVac(VacParams { eta: 0.9 }),
    ];
    for scheme in schemes {
        let t0 = Instant::now();
        let sparse = scheme.run_with(&SparseEngine::default())?;
        let t1 = Instant::now();
        let dense = scheme.run_with(&DenseEngine)?;
        let t2 = Instant::now();
        println!(
            "{:<8} deviation {:.2e}   sparse {:>8.2?}  dense {:>8.2?}",
            sparse.scheme,
            sparse.max_deviation(&dense),
            t1 - t0,
            t2 - t1
        );
    }
    Ok(())
}
