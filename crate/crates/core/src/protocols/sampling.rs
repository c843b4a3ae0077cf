use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::detection::CoincidenceTable;
use crate::error::{param, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledRow {
    pub clicks: Vec<bool>,
    pub count: u64,
    pub probability: f64,
}

/// Synthetic click counts drawn from an exact coincidence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledCounts {
    pub detectors: Vec<String>,
    pub shots: u64,
    pub seed: u64,
    pub rows: Vec<SampledRow>,
}

impl SampledCounts {
    pub fn frequency(&self, row: usize) -> f64 {
        self.rows[row].count as f64 / self.shots as f64
    }
}

/// Multinomial sample of `shots` runs, drawn as a chain of conditional
/// binomials from a ChaCha8 stream seeded with `seed`.
pub fn sample_run(table: &CoincidenceTable, shots: u64, seed: u64) -> Result<SampledCounts> {
    if shots == 0 {
        return Err(param("shots", 0.0, "at least one shot is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining_shots = shots;
    let mut remaining_mass: f64 = table.rows.iter().map(|r| r.probability.max(0.0)).sum();
    let last = table.rows.iter().rposition(|r| r.probability > 0.0);
    let mut rows = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let p = row.probability.max(0.0);
        let count = if Some(i) == last {
            remaining_shots
        } else if remaining_shots == 0 || p == 0.0 {
            0
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining_shots, q)
                .map_err(|_| param("probability", q, "invalid binomial parameter"))?
                .sample(&mut rng)
        };
        remaining_shots -= count;
        remaining_mass -= p;
        rows.push(SampledRow {
            clicks: row.clicks.clone(),
            count,
            probability: row.probability,
        });
    }
    Ok(SampledCounts {
        detectors: table.detectors.clone(),
        shots,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::CoincidenceRow;

    fn table(ps: &[f64]) -> CoincidenceTable {
        CoincidenceTable {
            detectors: vec!["A".into(), "B".into()],
            rows: CoincidenceTable::outcomes(2)
                .zip(ps)
                .map(|(clicks, &probability)| CoincidenceRow { clicks, probability })
                .collect(),
        }
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(sample_run(&table(&[0.25; 4]), 0, 1).is_err());
    }

    #[test]
    fn counts_sum_to_shots_and_repeat_with_seed() {
        let t = table(&[0.1, 0.2, 0.3, 0.4]);
        let a = sample_run(&t, 10_000, 7).unwrap();
        assert_eq!(a.rows.iter().map(|r| r.count).sum::<u64>(), 10_000);
        assert_eq!(a, sample_run(&t, 10_000, 7).unwrap());
        assert_ne!(a, sample_run(&t, 10_000, 8).unwrap());
    }

    #[test]
    fn zero_probability_rows_stay_empty() {
        let s = sample_run(&table(&[0.5, 0.0, 0.5, 0.0]), 1000, 3).unwrap();
        assert_eq!(s.rows[1].count, 0);
        assert_eq!(s.rows[3].count, 0);
    }
}
