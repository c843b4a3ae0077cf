//! After a scheme A herald, mix beams 3 and 4 on a balanced beam splitter
//! and look at which of D3, D4 fires. An ideal Ψ⁺ herald always exits at D3.

use fockswap::protocols::{run_phase_verification, Herald, PhaseParams};
use fockswap::Complex64;

fn main() -> fockswap::Result<()> {
    for herald in [Herald::Ideal, Herald::SchemeA] {
        println!("{herald:?} herald");
        for eta in [1.0, 0.8, 0.5] {
            let params = PhaseParams {
                tau: Complex64::new(1e-3f64.sqrt(), 0.0),
                eta,
                order: 1,
                herald,
            };
            let report = run_phase_verification(params)?;
            let get = |name: &str| report.event(name).map_or(f64::NAN, |e| e.probability);
            println!(
                "  eta = {eta:.1}: P(D3|E1) = {:.6}  P(D4|E1) = {:.3e}  P(D3|E2) = {:.3e}  P(D4|E2) = {:.6}",
                get("d3|event1"),
                get("d4|event1"),
                get("d3|event2"),
                get("d4|event2"),
            );
        }
    }
    Ok(())
}
