//! Click-conditioned states of the polarization double-pass source and of
//! the vacuum–one-photon arrangement.

use num_complex::Complex64 as C64;

use super::{Engine, EventRecord, ProtocolReport, SparseEngine};
use crate::detection::{ClickPattern, DetectorPort, Outcome, ThresholdDetector};
use crate::error::Result;
use crate::fock::{bell_state, BellKind, FockKet, ModeRegister};
use crate::optics::balanced_bs;
use crate::oracle::{number_resolving_measure, DenseEngine, DenseState};
use crate::sources::{polarization_double_pass, vacuum_one_photon_postbs, PolarizationWeights};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolParams {
    pub eta: f64,
    pub weights: PolarizationWeights,
}

const OUTER_POL: [&str; 4] = ["1H", "1V", "4H", "4V"];

/// `(|H⟩₁|V⟩₄ ± |V⟩₁|H⟩₄)/√2` on modes `1H,1V,4H,4V`.
pub fn polarization_psi(sign: f64) -> Result<FockKet> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    FockKet::from_terms(
        ModeRegister::new(OUTER_POL, 1)?,
        [([1, 0, 0, 1], s), ([0, 1, 1, 0], sign * s)].map(|(o, a)| (o, C64::new(a, 0.0))),
    )
}

pub fn analyze_polarization_postselection(params: PolParams) -> Result<ProtocolReport> {
    analyze_polarization_postselection_with(&SparseEngine::default(), params)
}

/// Conditions on a D2 ∧ D3 coincidence behind balanced splitters on
/// (2H,3H) and (2V,3V). `empty_beam_weight` is the share of that event in
/// which beam 1 or beam 4 holds no photon.
pub fn analyze_polarization_postselection_with<E: Engine>(engine: &E, params: PolParams) -> Result<ProtocolReport> {
    let det = ThresholdDetector::new(params.eta)?;
    let state = engine.load(&polarization_double_pass(2, params.weights)?)?;
    let state = engine.apply(&state, &balanced_bs(), &["2H", "3H"])?;
    let state = engine.apply(&state, &balanced_bs(), &["2V", "3V"])?;
    let plus = polarization_psi(1.0)?;
    let minus = polarization_psi(-1.0)?;

    let event = ClickPattern::new()
        .watch(&["2H", "2V"], det, Outcome::Click)
        .watch(&["3H", "3V"], det, Outcome::Click);
    let outcome = engine.measure(&state, &event)?;
    let mut record = EventRecord::from_outcome(engine, "d2&d3", &outcome, &OUTER_POL, &plus, &minus)?;
    record = record.clone().with_target("psi-_pol", record.fidelity_psi_minus);
    if !record.impossible {
        let ideal = ThresholdDetector::ideal();
        let both_full =
            event
                .clone()
                .watch(&["1H", "1V"], ideal, Outcome::Click)
                .watch(&["4H", "4V"], ideal, Outcome::Click);
        let full = engine.measure(&state, &both_full)?.probability;
        record = record.with_metric("empty_beam_weight", (1.0 - full / outcome.probability).max(0.0));
    }

    let mut report = ProtocolReport::new("postselect-pol", engine.name())
        .param("eta", params.eta)
        .param("x_weight", params.weights.x)
        .param("y_weight", params.weights.y)
        .note("balanced splitters on (2H,3H) and (2V,3V); D2 and D3 are polarization-insensitive threshold detectors");
    report.push(record);
    report.coincidences = Some(engine.coincidences(
        &state,
        &[
            DetectorPort::new("D2", &["2H", "2V"]),
            DetectorPort::new("D3", &["3H", "3V"]),
        ],
        det,
    )?);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VacParams {
    pub eta: f64,
}

pub fn analyze_vacuum_one_photon(params: VacParams) -> Result<ProtocolReport> {
    analyze_vacuum_one_photon_with(&SparseEngine::default(), params)
}

/// Threshold events on 2′ and 3′, plus the oracle's exactly-one-photon
/// projection of 2′ for comparison.
pub fn analyze_vacuum_one_photon_with<E: Engine>(engine: &E, params: VacParams) -> Result<ProtocolReport> {
    let det = ThresholdDetector::new(params.eta)?;
    let source = vacuum_one_photon_postbs();
    let state = engine.load(&source)?;
    let outer = ModeRegister::new(["1", "4"], 1)?;
    let plus = bell_state(BellKind::PsiPlus, &outer, ["1", "4"])?;
    let minus = bell_state(BellKind::PsiMinus, &outer, ["1", "4"])?;
    let vacuum = FockKet::vacuum(outer);

    let mut report = ProtocolReport::new("postselect-vac", engine.name()).param("eta", params.eta);
    for (name, pattern) in [
        ("d2'", ClickPattern::new().click("2'", det).silent("3'", det)),
        ("d3'", ClickPattern::new().click("3'", det).silent("2'", det)),
    ] {
        let outcome = engine.measure(&state, &pattern)?;
        let mut record = EventRecord::from_outcome(engine, name, &outcome, &["1", "4"], &plus, &minus)?;
        if let Some(ens) = &outcome.ensemble {
            let vac = engine.fidelity(&ens.permuted(&["1", "4"])?, &vacuum)?;
            record = record.with_metric("vacuum_weight", vac);
        }
        report.push(record);
    }

    let rest = ModeRegister::new(["3'"], 1)?;
    let with_vac = |k: BellKind| -> Result<FockKet> {
        FockKet::vacuum(rest.clone()).tensor(&bell_state(k, &ModeRegister::new(["1", "4"], 1)?, ["1", "4"])?)
    };
    let (plus3, minus3) = (with_vac(BellKind::PsiPlus)?, with_vac(BellKind::PsiMinus)?);
    let resolved = number_resolving_measure(&DenseState::from_ket(&source)?, "2'", 1)?;
    let record = EventRecord::from_outcome(&DenseEngine, "n2'=1", &resolved, &["3'", "1", "4"], &plus3, &minus3)?;
    let f = record.fidelity_psi_plus;
    report.push(record.with_target("vac_3'*psi+_14", f));
    report.coincidences = Some(engine.coincidences(
        &state,
        &[DetectorPort::single("D2'", "2'"), DetectorPort::single("D3'", "3'")],
        det,
    )?);
    Ok(report.note("n2'=1 uses the oracle's photon-number-resolving projection"))
}
