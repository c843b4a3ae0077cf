//! Double-pass source heralded by D1/D2 behind a balanced splitter on (1,2),
//! and the phase check that routes (3,4) through a second splitter.

use num_complex::Complex64 as C64;

use super::{Engine, EventRecord, ProtocolReport, SparseEngine};
use crate::detection::{ClickPattern, DetectorPort, ThresholdDetector};
use crate::error::Result;
use crate::fock::{bell_state, BellKind, FockKet, ModeRegister, Occupation};
use crate::optics::balanced_bs;
use crate::sources::{double_pass_source, SpdcParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeAParams {
    pub tau: C64,
    pub eta: f64,
    pub order: usize,
}

impl SchemeAParams {
    /// Real pair amplitude `τ = √tau2`.
    pub fn from_tau2(tau2: f64, eta: f64, order: usize) -> Self {
        Self {
            tau: C64::new(tau2.sqrt(), 0.0),
            eta,
            order,
        }
    }

    fn validate(&self) -> Result<(SpdcParams, ThresholdDetector)> {
        Ok((
            SpdcParams::new(self.tau, self.order)?,
            ThresholdDetector::new(self.eta)?,
        ))
    }
}

fn events(det: ThresholdDetector) -> [(&'static str, ClickPattern); 2] {
    [
        ("event1", ClickPattern::new().click("1", det).silent("2", det)),
        ("event2", ClickPattern::new().click("2", det).silent("1", det)),
    ]
}

fn bell_34() -> Result<(FockKet, FockKet)> {
    let r = ModeRegister::new(["3", "4"], 1)?;
    Ok((
        bell_state(BellKind::PsiPlus, &r, ["3", "4"])?,
        bell_state(BellKind::PsiMinus, &r, ["3", "4"])?,
    ))
}

pub fn run_scheme_a(params: SchemeAParams) -> Result<ProtocolReport> {
    run_scheme_a_with(&SparseEngine::default(), params)
}

pub fn run_scheme_a_with<E: Engine>(engine: &E, params: SchemeAParams) -> Result<ProtocolReport> {
    let (spdc, det) = params.validate()?;
    let state = engine.load(&double_pass_source(spdc)?)?;
    let state = engine.apply(&state, &balanced_bs(), &["1", "2"])?;
    let (plus, minus) = bell_34()?;

    let mut report = ProtocolReport::new("A", engine.name())
        .param("tau", params.tau.norm())
        .param("tau2", params.tau.norm_sqr())
        .param("eta", params.eta)
        .param("order", params.order as f64);
    for (name, pattern) in events(det) {
        let outcome = engine.measure(&state, &pattern)?;
        report.push(EventRecord::from_outcome(
            engine,
            name,
            &outcome,
            &["3", "4"],
            &plus,
            &minus,
        )?);
    }
    report.coincidences = Some(engine.coincidences(
        &state,
        &[DetectorPort::single("D1", "1"), DetectorPort::single("D2", "2")],
        det,
    )?);
    Ok(report)
}

/// Which state the phase check starts from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Herald {
    /// The scheme A state after the (1,2) splitter.
    #[default]
    SchemeA,
    /// `(|1⟩₁|0⟩₂Ψ⁺₃₄ + |0⟩₁|1⟩₂Ψ⁻₃₄)/√2`, the heralded state without
    /// vacuum or double-pair terms.
    Ideal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseParams {
    pub tau: C64,
    pub eta: f64,
    pub order: usize,
    pub herald: Herald,
}

/// The ideal heralded state on modes (1,2,3,4).
pub fn ideal_herald_state() -> Result<FockKet> {
    let r = ModeRegister::new(["1", "2", "3", "4"], 1)?;
    let h = 0.5;
    FockKet::from_terms(
        r,
        [
            ([1, 0, 0, 1], h),
            ([1, 0, 1, 0], h),
            ([0, 1, 0, 1], h),
            ([0, 1, 1, 0], -h),
        ]
        .map(|(o, a)| (Occupation::from(o), C64::new(a, 0.0))),
    )
}

pub fn run_phase_verification(params: PhaseParams) -> Result<ProtocolReport> {
    run_phase_verification_with(&SparseEngine::default(), params)
}

/// Reports, per herald event, the Bell fidelities of (3,4), the split of
/// single-detector events between beams 3 and 4 under direct detection, and
/// `P(D3|event)`, `P(D4|event)` behind the second splitter.
pub fn run_phase_verification_with<E: Engine>(engine: &E, params: PhaseParams) -> Result<ProtocolReport> {
    let det = ThresholdDetector::new(params.eta)?;
    let heralded = match params.herald {
        Herald::SchemeA => {
            let spdc = SpdcParams::new(params.tau, params.order)?;
            let s = engine.load(&double_pass_source(spdc)?)?;
            engine.apply(&s, &balanced_bs(), &["1", "2"])?
        }
        Herald::Ideal => engine.load(&ideal_herald_state()?)?,
    };
    let verified = engine.apply(&heralded, &balanced_bs(), &["3", "4"])?;
    let (plus, minus) = bell_34()?;

    let mut report = ProtocolReport::new("verify-phase", engine.name())
        .param("eta", params.eta)
        .param("ideal", f64::from(u8::from(params.herald == Herald::Ideal)));
    if params.herald == Herald::SchemeA {
        report = report
            .param("tau", params.tau.norm())
            .param("tau2", params.tau.norm_sqr())
            .param("order", params.order as f64)
            .note("P(D4|event1) is bounded by tau2");
    }

    let mut conditionals = Vec::new();
    for (name, pattern) in events(det) {
        let outcome = engine.measure(&heralded, &pattern)?;
        let p_event = outcome.probability;
        let only3 = pattern.clone().click("3", det).silent("4", det);
        let only4 = pattern.clone().silent("3", det).click("4", det);
        let a = engine.measure(&heralded, &only3)?.probability;
        let b = engine.measure(&heralded, &only4)?.probability;
        let (share3, share4) = if a + b > 0.0 {
            (a / (a + b), b / (a + b))
        } else {
            (0.0, 0.0)
        };
        let record = EventRecord::from_outcome(engine, name, &outcome, &["3", "4"], &plus, &minus)?
            .with_metric("beam3_share", share3)
            .with_metric("beam4_share", share4);
        for mode in ["3", "4"] {
            let joint = engine
                .measure(&verified, &pattern.clone().click(mode, det))?
                .probability;
            let cond = if record.impossible {
                0.0
            } else {
                (joint / p_event).min(1.0)
            };
            conditionals.push(EventRecord::bare(&format!("d{mode}|{name}"), cond).inherit(&record));
        }
        report.push(record);
    }
    for c in conditionals {
        report.push(c);
    }
    report.coincidences = Some(engine.coincidences(
        &verified,
        &[
            DetectorPort::single("D1", "1"),
            DetectorPort::single("D2", "2"),
            DetectorPort::single("D3", "3"),
            DetectorPort::single("D4", "4"),
        ],
        det,
    )?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_are_symmetric_at_first_order() {
        let r = run_scheme_a(SchemeAParams::from_tau2(0.01, 1.0, 1)).unwrap();
        let (e1, e2) = (r.event("event1").unwrap(), r.event("event2").unwrap());
        assert_eq!(e1.probability, e2.probability);
        assert_eq!(e1.favored, Some(BellKind::PsiPlus));
        assert_eq!(e2.favored, Some(BellKind::PsiMinus));
    }

    #[test]
    fn zero_tau_heralds_nothing() {
        let r = run_scheme_a(SchemeAParams::from_tau2(0.0, 1.0, 1)).unwrap();
        assert!(r.events.iter().all(|e| e.probability == 0.0 && e.impossible));
    }

    #[test]
    fn ideal_herald_is_normalized() {
        assert!((ideal_herald_state().unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_ranges() {
        assert!(run_scheme_a(SchemeAParams::from_tau2(1.0, 1.0, 1)).is_err());
        assert!(run_scheme_a(SchemeAParams::from_tau2(0.1, 1.5, 1)).is_err());
        assert!(run_scheme_a(SchemeAParams::from_tau2(0.1, 1.0, 0)).is_err());
    }
}
