//! Non-maximally entangled inputs cos θ|00⟩ + sin θ|11⟩. The swap still
//! succeeds but the Bell outcomes become unequally likely.

use std::f64::consts::PI;

use fockswap::protocols::run_theta_swapping;

fn main() -> fockswap::Result<()> {
    println!(
        "{:>8}  {:>10} {:>10} {:>10} {:>10}",
        "theta/pi", "P(psi+)", "P(psi-)", "P(phi+)", "P(phi-)"
    );
    for k in 0..=8 {
        let theta = PI * k as f64 / 16.0;
        let report = run_theta_swapping(theta)?;
        let p: Vec<f64> = report.events.iter().map(|e| e.probability).collect();
        println!(
            "{:>8.4}  {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            theta / PI,
            p[0],
            p[1],
            p[2],
            p[3]
        );
    }
    Ok(())
}
