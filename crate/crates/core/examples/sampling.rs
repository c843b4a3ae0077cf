//! Finite-statistics run: draw detector records from the phase-verification
//! coincidence table and compare with the exact probabilities.

use fockswap::protocols::{run_phase_verification, sample_run, Herald, PhaseParams};
use fockswap::Complex64;

fn main() -> fockswap::Result<()> {
    let params = PhaseParams {
        tau: Complex64::new(0.1, 0.0),
        eta: 0.8,
        order: 2,
        herald: Herald::SchemeA,
    };
    let report = run_phase_verification(params)?;
    let table = report.coincidences.expect("phase verification records coincidences");
    let counts = sample_run(&table, 100_000, 7)?;

    println!(
        "{:?}  shots = {}, seed = {}",
        counts.detectors, counts.shots, counts.seed
    );
    for (i, row) in counts.rows.iter().enumerate() {
        if row.probability == 0.0 {
            continue;
        }
        let bits: String = row.clicks.iter().map(|&c| if c { '1' } else { '0' }).collect();
        println!(
            "  {bits}  {:>7}  {:.5}  (exact {:.5})",
            row.count,
            counts.frequency(i),
            row.probability
        );
    }
    Ok(())
}
