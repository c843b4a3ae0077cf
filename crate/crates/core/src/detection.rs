//! Threshold (click / no-click) detectors with finite efficiency.
//!
//! Each photon reaching a detector survives independently with probability
//! `η`, so a detector that sees `n` photons stays silent with probability
//! `(1−η)ⁿ`. The POVM is diagonal in the Fock basis of the watched modes, so
//! conditioning keys the post-measurement branches on the measured
//! occupation: branches with different measured occupations add
//! incoherently, branches with the same one stay coherent.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::fock::{FockKet, ModeRegister, Occupation, WeightedEnsemble};

/// Outcome probabilities below this are treated as an impossible event.
pub const IMPOSSIBLE_PROBABILITY: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq)]
#[non_exhaustive]
pub struct ThresholdDetector {
    pub eta: f64,
}

impl ThresholdDetector {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(param("eta", eta, "detector efficiency must lie in [0, 1]"));
        }
        Ok(Self { eta })
    }

    pub fn ideal() -> Self {
        Self { eta: 1.0 }
    }

    /// `1 − (1−η)ⁿ`, evaluated without cancellation for small `η`.
    pub fn click_probability(&self, photons: u32) -> f64 {
        if photons == 0 || self.eta == 0.0 {
            0.0
        } else if self.eta == 1.0 {
            1.0
        } else {
            -(photons as f64 * (-self.eta).ln_1p()).exp_m1()
        }
    }

    pub fn silent_probability(&self, photons: u32) -> f64 {
        if photons == 0 {
            1.0
        } else {
            (1.0 - self.eta).powi(photons as i32)
        }
    }

    pub fn probability(&self, outcome: Outcome, photons: u32) -> f64 {
        match outcome {
            Outcome::Click => self.click_probability(photons),
            Outcome::Silent => self.silent_probability(photons),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Click,
    Silent,
}

/// One detector watching one or more modes (e.g. both polarizations of a beam).
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub modes: Vec<String>,
    pub detector: ThresholdDetector,
    pub outcome: Outcome,
}

/// Required outcome for each of a set of detectors on distinct modes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClickPattern {
    assignments: Vec<Assignment>,
}

impl ClickPattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn click(self, mode: &str, detector: ThresholdDetector) -> Self {
        self.watch(&[mode], detector, Outcome::Click)
    }

    pub fn silent(self, mode: &str, detector: ThresholdDetector) -> Self {
        self.watch(&[mode], detector, Outcome::Silent)
    }

    pub fn watch(mut self, modes: &[&str], detector: ThresholdDetector, outcome: Outcome) -> Self {
        self.assignments.push(Assignment {
            modes: modes.iter().map(|m| m.to_string()).collect(),
            detector,
            outcome,
        });
        self
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    /// All watched modes, in assignment order.
    pub fn modes(&self) -> Vec<&str> {
        self.assignments
            .iter()
            .flat_map(|a| a.modes.iter().map(String::as_str))
            .collect()
    }

    /// Both patterns' assignments; modes must stay disjoint.
    pub fn and(mut self, other: &ClickPattern) -> Self {
        self.assignments.extend(other.assignments.iter().cloned());
        self
    }

    /// Register indices of the watched modes, validated to be known and distinct.
    pub(crate) fn indices(&self, register: &ModeRegister) -> Result<Vec<usize>> {
        if self.assignments.iter().any(|a| a.modes.is_empty()) {
            return Err(Error::InvalidPattern("detector watches no modes".into()));
        }
        register.indices_of(&self.modes()).map_err(|e| match e {
            Error::DuplicateMode(m) => Error::InvalidPattern(format!("mode `{m}` watched twice")),
            other => other,
        })
    }
}

/// Probability of a click pattern and the state left on the unmeasured modes.
#[derive(Clone, Debug)]
pub struct ConditionalOutcome {
    pub probability: f64,
    /// `None` when the pattern is impossible.
    pub ensemble: Option<WeightedEnsemble>,
}

impl ConditionalOutcome {
    pub fn impossible(probability: f64) -> Self {
        Self {
            probability,
            ensemble: None,
        }
    }

    pub fn is_impossible(&self) -> bool {
        self.ensemble.is_none()
    }
}

/// Conditions a normalized state on `pattern`.
pub fn measure_pattern(state: &FockKet, pattern: &ClickPattern) -> Result<ConditionalOutcome> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let measured = pattern.indices(state.register())?;
    let mut branches = Vec::new();
    let mut total = 0.0;
    for (key, rest) in state.split(&measured) {
        let povm = povm_weight(pattern, &key);
        let w = povm * rest.norm_sqr();
        if w > 0.0 {
            total += w;
            branches.push((w, rest));
        }
    }
    if total < IMPOSSIBLE_PROBABILITY {
        return Ok(ConditionalOutcome::impossible(total));
    }
    let members = branches
        .into_iter()
        .map(|(w, ket)| Ok((w / total, ket.normalize()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalOutcome {
        probability: total.min(1.0),
        ensemble: Some(WeightedEnsemble::new(members)?),
    })
}

/// `Π_a p(outcome_a | photons on a's modes)` for a measured occupation laid
/// out in pattern order.
fn povm_weight(pattern: &ClickPattern, measured: &Occupation) -> f64 {
    let counts = measured.counts();
    let mut offset = 0;
    let mut p = 1.0;
    for a in pattern.assignments() {
        let n: u32 = counts[offset..offset + a.modes.len()].iter().sum();
        offset += a.modes.len();
        p *= a.detector.probability(a.outcome, n);
    }
    p
}

/// A named detector position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectorPort {
    pub name: String,
    pub modes: Vec<String>,
}

impl DetectorPort {
    pub fn new(name: &str, modes: &[&str]) -> Self {
        Self {
            name: name.into(),
            modes: modes.iter().map(|m| m.to_string()).collect(),
        }
    }

    pub fn single(name: &str, mode: &str) -> Self {
        Self::new(name, &[mode])
    }
}

/// Joint click statistics of several detectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoincidenceTable {
    pub detectors: Vec<String>,
    pub rows: Vec<CoincidenceRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoincidenceRow {
    /// One flag per detector, `true` for a click.
    pub clicks: Vec<bool>,
    pub probability: f64,
}

impl CoincidenceTable {
    /// Every click assignment of `k` detectors, first detector most significant,
    /// silent before click.
    pub fn outcomes(k: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1usize << k).map(move |bits| (0..k).map(|d| bits >> (k - 1 - d) & 1 == 1).collect())
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.probability).sum()
    }

    pub fn probability(&self, clicks: &[bool]) -> Option<f64> {
        self.rows.iter().find(|r| r.clicks == clicks).map(|r| r.probability)
    }

    /// `P(detector d clicks)`, marginalizing the others.
    pub fn marginal_click(&self, d: usize) -> f64 {
        self.rows.iter().filter(|r| r.clicks[d]).map(|r| r.probability).sum()
    }
}

/// Probability of every click/silent combination of `ports`, all with
/// efficiency `eta`. Computed from the measured-mode photon distribution.
pub fn coincidence_table(state: &FockKet, ports: &[DetectorPort], eta: f64) -> Result<CoincidenceTable> {
    let detector = ThresholdDetector::new(eta)?;
    let modes: Vec<&str> = ports.iter().flat_map(|p| p.modes.iter().map(String::as_str)).collect();
    let measured = state.register().indices_of(&modes)?;

    let mut photon_weights: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (key, rest) in state.split(&measured) {
        let mut per_port = Vec::with_capacity(ports.len());
        let mut offset = 0;
        for p in ports {
            per_port.push(key.counts()[offset..offset + p.modes.len()].iter().sum());
            offset += p.modes.len();
        }
        *photon_weights.entry(per_port).or_default() += rest.norm_sqr();
    }

    let rows = CoincidenceTable::outcomes(ports.len())
        .map(|clicks| {
            let probability = photon_weights
                .iter()
                .map(|(photons, w)| {
                    clicks
                        .iter()
                        .zip(photons)
                        .map(|(&c, &n)| detector.probability(if c { Outcome::Click } else { Outcome::Silent }, n))
                        .product::<f64>()
                        * w
                })
                .sum();
            CoincidenceRow { clicks, probability }
        })
        .collect();
    Ok(CoincidenceTable {
        detectors: ports.iter().map(|p| p.name.clone()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{bell_state, BellKind};
    use crate::optics::{apply_mode_unitary, balanced_bs};
    use num_complex::Complex64 as C64;

    fn reg(labels: &[&str], cutoff: usize) -> ModeRegister {
        ModeRegister::new(labels.iter().copied(), cutoff).unwrap()
    }

    fn det(eta: f64) -> ThresholdDetector {
        ThresholdDetector::new(eta).unwrap()
    }

    #[test]
    fn efficiency_range() {
        assert!(ThresholdDetector::new(-0.1).is_err());
        assert!(ThresholdDetector::new(1.1).is_err());
        assert!(ThresholdDetector::new(f64::NAN).is_err());
    }

    #[test]
    fn projection_of_split_photon() {
        let r = reg(&["1", "2"], 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let state = FockKet::from_terms(r, [([1, 0], C64::new(s, 0.0)), ([0, 1], C64::new(s, 0.0))]).unwrap();
        let out = measure_pattern(&state, &ClickPattern::new().click("1", det(1.0))).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        let ens = out.ensemble.unwrap();
        assert_eq!(ens.len(), 1);
        assert_eq!(ens.register().labels(), ["2"]);
        assert!((ens.members()[0].1.amplitude(&[0]).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_photon_click_is_eta() {
        let one = FockKet::basis(reg(&["d"], 2), &[1]).unwrap();
        let out = measure_pattern(&one, &ClickPattern::new().click("d", det(0.5))).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_photon_click_matches_binomial_loss() {
        // Oracle: sum over k ≥ 1 surviving photons of C(2,k) η^k (1−η)^{2−k}.
        let eta: f64 = 0.5;
        let oracle: f64 = (1..=2)
            .map(|k| {
                let binom = [1.0, 2.0, 1.0][k as usize];
                binom * eta.powi(k) * (1.0 - eta).powi(2 - k)
            })
            .sum();
        let two = FockKet::basis(reg(&["d"], 2), &[2]).unwrap();
        let out = measure_pattern(&two, &ClickPattern::new().click("d", det(eta))).unwrap();
        assert!((out.probability - oracle).abs() < 1e-15);
        assert!((out.probability - 0.75).abs() < 1e-15);
    }

    #[test]
    fn impossible_pattern_flagged() {
        let vac = FockKet::vacuum(reg(&["1", "2"], 1));
        let out = measure_pattern(&vac, &ClickPattern::new().click("1", det(1.0))).unwrap();
        assert!(out.is_impossible());
        assert_eq!(out.probability, 0.0);
        let one = FockKet::basis(reg(&["1"], 1), &[1]).unwrap();
        assert!(measure_pattern(&one, &ClickPattern::new().click("1", det(0.0)))
            .unwrap()
            .is_impossible());
    }

    #[test]
    fn pattern_validation() {
        let vac = FockKet::vacuum(reg(&["1", "2"], 1));
        let twice = ClickPattern::new().click("1", det(1.0)).silent("1", det(1.0));
        assert!(matches!(measure_pattern(&vac, &twice), Err(Error::InvalidPattern(_))));
        let unknown = ClickPattern::new().click("9", det(1.0));
        assert!(matches!(measure_pattern(&vac, &unknown), Err(Error::UnknownMode(_))));
        let scaled = vac.scaled(C64::new(2.0, 0.0));
        assert!(matches!(
            measure_pattern(&scaled, &ClickPattern::new().silent("1", det(1.0))),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn coincidence_after_beam_splitter() {
        // Ψ⁺ on (3,4) through the balanced splitter leaves the photon in 3.
        let r = reg(&["3", "4"], 1);
        let plus = bell_state(BellKind::PsiPlus, &r, ["3", "4"]).unwrap();
        let out = apply_mode_unitary(&plus, &balanced_bs(), &["3", "4"]).unwrap();
        let ports = [DetectorPort::single("D3", "3"), DetectorPort::single("D4", "4")];
        let table = coincidence_table(&out, &ports, 1.0).unwrap();
        assert!((table.probability(&[true, false]).unwrap() - 1.0).abs() < 1e-15);
        assert!(table.probability(&[false, true]).unwrap().abs() < 1e-15);
        let lossy = coincidence_table(&out, &ports, 0.8).unwrap();
        assert!((lossy.marginal_click(0) - 0.8).abs() < 1e-15);
        let dark = coincidence_table(&out, &ports, 0.0).unwrap();
        assert!((dark.probability(&[false, false]).unwrap() - 1.0).abs() < 1e-15);
        assert!((table.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multi_mode_detector_sums_photons() {
        let r = reg(&["bH", "bV", "x"], 1);
        let state = FockKet::basis(r, &[1, 1, 0]).unwrap();
        let pattern = ClickPattern::new().watch(&["bH", "bV"], det(0.5), Outcome::Silent);
        let out = measure_pattern(&state, &pattern).unwrap();
        assert!((out.probability - 0.25).abs() < 1e-15);
    }

    #[test]
    fn click_and_silent_are_complementary() {
        for eta in [0.0, 1e-9, 0.3, 0.999, 1.0] {
            let d = det(eta);
            for n in 0..6 {
                let sum = d.click_probability(n) + d.silent_probability(n);
                assert!((sum - 1.0).abs() < 1e-12, "eta={eta} n={n}");
            }
        }
    }

    #[test]
    fn outcome_order() {
        let rows: Vec<_> = CoincidenceTable::outcomes(2).collect();
        assert_eq!(
            rows,
            vec![
                vec![false, false],
                vec![false, true],
                vec![true, false],
                vec![true, true]
            ]
        );
    }
}
