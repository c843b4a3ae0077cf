//! Swapping with perfect pairs: each Bell outcome on modes 2,3 happens with
//! probability 1/4 and leaves 1,4 in the matching Bell state.

use fockswap::protocols::bell_decomposition_check;

fn main() -> fockswap::Result<()> {
    let report = bell_decomposition_check()?;
    println!("{:<6} {:>12} {:>10}  target", "event", "probability", "fidelity");
    for e in &report.events {
        println!(
            "{:<6} {:>12.6} {:>10.6}  {}",
            e.name,
            e.probability,
            e.fidelity_target.unwrap_or(f64::NAN),
            e.target.as_deref().unwrap_or("-"),
        );
    }
    Ok(())
}
