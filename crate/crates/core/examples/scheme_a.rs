//! Heralded swapping from a double-passed SPDC crystal with threshold
//! detectors D1, D2. Shows the headline point and how fidelity degrades
//! with pair probability and detector efficiency.

use fockswap::protocols::{run_scheme_a, SchemeAParams};

fn main() -> fockswap::Result<()> {
    let report = run_scheme_a(SchemeAParams::from_tau2(1e-3, 1.0, 1))?;
    for e in &report.events {
        println!(
            "{}: P = {:.6e}, F(psi+) = {:.9}, F(psi-) = {:.9}",
            e.name, e.probability, e.fidelity_psi_plus, e.fidelity_psi_minus
        );
    }
    if let Some(table) = &report.coincidences {
        println!("\n{:?}", table.detectors);
        for row in &table.rows {
            println!("  {:?}  {:.6e}", row.clicks, row.probability);
        }
    }

    println!("\n{:>8} {:>6} {:>6}  {:>12}", "|tau|^2", "eta", "order", "F(event1)");
    for tau2 in [1e-4, 1e-3, 1e-2, 1e-1] {
        for eta in [1.0, 0.5, 0.1] {
            for order in [1, 2] {
                let r = run_scheme_a(SchemeAParams::from_tau2(tau2, eta, order))?;
                let f = r.event("event1").map_or(f64::NAN, |e| e.fidelity_psi_plus);
                println!("{tau2:>8.0e} {eta:>6.2} {order:>6}  {f:>12.9}");
            }
        }
    }
    Ok(())
}
