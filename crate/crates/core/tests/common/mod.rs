#![allow(dead_code)]

use fockswap::detection::{ClickPattern, Outcome, ThresholdDetector};
use fockswap::fock::{FockKet, ModeRegister, Occupation};
use fockswap::optics::ModeUnitary;
use fockswap::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("m{i}")).collect()
}

pub fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-ish unitary: Gram–Schmidt on the columns of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ModeUnitary {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for c in &cols {
            let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let entries = (0..n).flat_map(|r| cols.iter().map(move |c| c[r])).collect::<Vec<_>>();
    ModeUnitary::new(n, entries).expect("orthonormalized columns")
}

/// Random normalized ket on `m` modes with every occupation at most
/// `cutoff` and total photon number at most `max_photons`.
pub fn random_ket<R: Rng>(rng: &mut R, m: usize, cutoff: usize, max_photons: u32) -> FockKet {
    random_ket_on(rng, &labels(m), cutoff, max_photons)
}

pub fn random_ket_on<R: Rng, S: AsRef<str>>(rng: &mut R, names: &[S], cutoff: usize, max_photons: u32) -> FockKet {
    let register = ModeRegister::new(names.iter().map(|s| s.as_ref()), cutoff).unwrap();
    let mut all = vec![vec![]];
    for _ in 0..names.len() {
        all = all
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=cutoff as u32).map(move |n| {
                    let mut p = prefix.clone();
                    p.push(n);
                    p
                })
            })
            .collect();
    }
    all.retain(|o| o.iter().sum::<u32>() <= max_photons);
    loop {
        let mut terms: Vec<(Occupation, C64)> = Vec::new();
        for o in &all {
            if rng.random_bool(0.6) {
                terms.push((Occupation::new(o.clone()), gaussian(rng)));
            }
        }
        if let Ok(k) = FockKet::from_terms(register.clone(), terms).and_then(|k| k.normalize()) {
            return k;
        }
    }
}

/// A pattern on the first `watched` modes with random outcomes.
pub fn random_pattern<R: Rng>(rng: &mut R, m: usize, watched: usize, eta: f64) -> ClickPattern {
    let det = ThresholdDetector::new(eta).unwrap();
    let labels = labels(m);
    let mut p = ClickPattern::new();
    for l in labels.iter().take(watched) {
        let outcome = if rng.random_bool(0.5) {
            Outcome::Click
        } else {
            Outcome::Silent
        };
        p = p.watch(&[l.as_str()], det, outcome);
    }
    p
}

/// Largest amplitude difference over the union of both kets' terms.
pub fn max_amplitude_gap(a: &FockKet, b: &FockKet) -> f64 {
    let mut gap: f64 = 0.0;
    for (o, x) in a.terms() {
        gap = gap.max((x - b.amplitude(o.counts())).norm());
    }
    for (o, y) in b.terms() {
        gap = gap.max((y - a.amplitude(o.counts())).norm());
    }
    gap
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
