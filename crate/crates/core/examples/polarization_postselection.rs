//! Polarization-encoded swapping on the double-pass source. Conditioning on
//! a D2 & D3 coincidence, most of the weight sits in terms with an empty
//! outer beam, so the event-ready fidelity is low.

use fockswap::protocols::{analyze_polarization_postselection, PolParams};
use fockswap::sources::PolarizationWeights;

fn main() -> fockswap::Result<()> {
    let cases = [
        ("as printed", PolarizationWeights::AS_PRINTED),
        ("x only", PolarizationWeights::X_ONLY),
        ("second order, tau=0.1", PolarizationWeights::second_order(0.1)),
    ];
    for (label, weights) in cases {
        let report = analyze_polarization_postselection(PolParams { eta: 1.0, weights })?;
        let e = &report.events[0];
        println!(
            "{label:<22} P = {:.6}  F(psi-) = {:.6}  empty beam weight = {:.6}",
            e.probability,
            e.fidelity_target.unwrap_or(f64::NAN),
            e.metrics.get("empty_beam_weight").copied().unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
