//! A vacuum–one-photon source. Threshold detection cannot tell the swapped
//! state from the vacuum-contaminated one; number resolution on beam 2'
//! removes the contamination.

use fockswap::protocols::{analyze_vacuum_one_photon, VacParams};

fn main() -> fockswap::Result<()> {
    for eta in [1.0, 0.9, 0.5] {
        let report = analyze_vacuum_one_photon(VacParams { eta })?;
        println!("eta = {eta}");
        for e in &report.events {
            let vac = e.metrics.get("vacuum_weight").map(|v| format!("  vacuum = {v:.6}"));
            println!(
                "  {:<6} P = {:.6}  F = {:.6}{}",
                e.name,
                e.probability,
                e.fidelity_target.unwrap_or(e.fidelity_psi_plus),
                vac.unwrap_or_default(),
            );
        }
    }
    Ok(())
}
