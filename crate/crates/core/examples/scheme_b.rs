//! Swapping with one pair and a weakly reflecting beam splitter (or the
//! equivalent polarization rotation plus PBS). The infidelity scales as ε².

use fockswap::protocols::{run_scheme_b, SchemeBParams, Variant};

fn main() -> fockswap::Result<()> {
    println!(
        "{:>8} {:>6} {:>12} {:>14} {:>14}",
        "epsilon", "eta", "P(D2)", "F(psi+)", "1-F"
    );
    for eps in [0.3, 0.1, 0.03, 0.01] {
        for eta in [1.0, 0.5] {
            let r = run_scheme_b(SchemeBParams::new(eps, eta))?;
            let d2 = r.event("d2").expect("d2 event");
            println!(
                "{eps:>8} {eta:>6} {:>12.6e} {:>14.12} {:>14.6e}",
                d2.probability,
                d2.fidelity_psi_plus,
                1.0 - d2.fidelity_psi_plus
            );
        }
    }

    let ubs = run_scheme_b(SchemeBParams::new(0.2, 0.9))?;
    let pbs = run_scheme_b(SchemeBParams::new(0.2, 0.9).variant(Variant::Pbs))?;
    println!("\nUBS vs PBS variant, max deviation: {:.3e}", ubs.max_deviation(&pbs));
    Ok(())
}
