//! Single pair split by two unbalanced splitters (or polarization rotators
//! followed by PBSs), then a balanced splitter on (2,3) and detectors D2/D3.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{Engine, EventRecord, ProtocolReport, SparseEngine};
use crate::detection::{ClickPattern, DetectorPort, ThresholdDetector};
use crate::error::{param, Result};
use crate::fock::{bell_state, BellKind, FockKet, ModeRegister};
use crate::optics::{balanced_bs, pbs, polarization_rotation, unbalanced_bs};
use crate::sources::{spdc_pair, SpdcParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Ubs,
    Pbs,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeBParams {
    pub epsilon: f64,
    pub eta: f64,
    /// 1 for the single pair `|1⟩_u|1⟩_l`; higher orders use a truncated
    /// pair with amplitude `tau`.
    pub order: usize,
    pub tau: C64,
    pub variant: Variant,
}

impl SchemeBParams {
    pub fn new(epsilon: f64, eta: f64) -> Self {
        Self {
            epsilon,
            eta,
            order: 1,
            tau: C64::new(0.0, 0.0),
            variant: Variant::Ubs,
        }
    }

    pub fn variant(self, variant: Variant) -> Self {
        Self { variant, ..self }
    }

    fn validate(&self) -> Result<ThresholdDetector> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(param("epsilon", self.epsilon, "must lie in (0, 1)"));
        }
        if self.order == 0 {
            return Err(param("order", 0.0, "order must be at least 1"));
        }
        ThresholdDetector::new(self.eta)
    }

    /// The pair on `(u, l)` inside `register`.
    fn pair(&self, register: &ModeRegister, modes: [&str; 2]) -> Result<FockKet> {
        if self.order == 1 {
            let mut counts = vec![0; register.len()];
            counts[register.index_of(modes[0])?] = 1;
            counts[register.index_of(modes[1])?] = 1;
            FockKet::basis(register.clone(), &counts)
        } else {
            spdc_pair(SpdcParams::new(self.tau, self.order)?, register, modes)
        }
    }
}

/// The four-mode state on (1,2,3,4) after the splitting optics, before the
/// balanced splitter.
pub fn scheme_b_state(params: SchemeBParams) -> Result<FockKet> {
    let engine = SparseEngine::default();
    scheme_b_state_with(&engine, params)
}

pub fn scheme_b_state_with<E: Engine>(engine: &E, params: SchemeBParams) -> Result<E::State> {
    params.validate()?;
    match params.variant {
        Variant::Ubs => {
            let reg = ModeRegister::new(["1", "2", "3", "4"], params.order)?;
            let s = engine.load(&params.pair(&reg, ["1", "4"])?)?;
            let ubs = unbalanced_bs(params.epsilon)?;
            let s = engine.apply(&s, &ubs, &["1", "2"])?;
            engine.apply(&s, &ubs, &["4", "3"])
        }
        Variant::Pbs => {
            let reg = ModeRegister::new(["uH", "uV", "lH", "lV"], params.order)?;
            let s = engine.load(&params.pair(&reg, ["uH", "lH"])?)?;
            let rot = polarization_rotation(params.epsilon)?;
            let s = engine.apply(&s, &rot, &["uH", "uV"])?;
            let s = engine.apply(&s, &rot, &["lH", "lV"])?;
            let s = engine.relabel(&s, &pbs(("uH", "uV"), ("1", "2"))?.routing())?;
            let s = engine.relabel(&s, &pbs(("lH", "lV"), ("4", "3"))?.routing())?;
            engine.permute(&s, &["1", "2", "3", "4"])
        }
    }
}

pub fn run_scheme_b(params: SchemeBParams) -> Result<ProtocolReport> {
    run_scheme_b_with(&SparseEngine::default(), params)
}

pub fn run_scheme_b_with<E: Engine>(engine: &E, params: SchemeBParams) -> Result<ProtocolReport> {
    let det = params.validate()?;
    let state = scheme_b_state_with(engine, params)?;
    let state = engine.apply(&state, &balanced_bs(), &["2", "3"])?;
    let r = ModeRegister::new(["1", "4"], 1)?;
    let plus = bell_state(BellKind::PsiPlus, &r, ["1", "4"])?;
    let minus = bell_state(BellKind::PsiMinus, &r, ["1", "4"])?;

    let mut report = ProtocolReport::new("B", engine.name())
        .param("epsilon", params.epsilon)
        .param("eta", params.eta)
        .param("order", params.order as f64)
        .param("pbs", f64::from(u8::from(params.variant == Variant::Pbs)));
    if params.order > 1 {
        report = report
            .param("tau", params.tau.norm())
            .param("tau2", params.tau.norm_sqr());
    }
    for (name, pattern) in [
        ("d2", ClickPattern::new().click("2", det).silent("3", det)),
        ("d3", ClickPattern::new().click("3", det).silent("2", det)),
    ] {
        let outcome = engine.measure(&state, &pattern)?;
        report.push(EventRecord::from_outcome(
            engine,
            name,
            &outcome,
            &["1", "4"],
            &plus,
            &minus,
        )?);
    }
    report.coincidences = Some(engine.coincidences(
        &state,
        &[DetectorPort::single("D2", "2"), DetectorPort::single("D3", "3")],
        det,
    )?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_state_is_product_of_splits() {
        // (|1⟩₁ + ε|1⟩₂)(|1⟩₄ + ε|1⟩₃)/(1+ε²)
        let eps = 0.2;
        let s = scheme_b_state(SchemeBParams::new(eps, 1.0)).unwrap();
        let n = 1.0 + eps * eps;
        for (occ, a) in [
            ([1, 0, 0, 1], 1.0),
            ([1, 0, 1, 0], eps),
            ([0, 1, 0, 1], eps),
            ([0, 1, 1, 0], eps * eps),
        ] {
            assert!((s.amplitude(&occ).re - a / n).abs() < 1e-15, "{occ:?}");
        }
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn variants_agree() {
        let ubs = scheme_b_state(SchemeBParams::new(0.3, 1.0)).unwrap();
        let pbs = scheme_b_state(SchemeBParams::new(0.3, 1.0).variant(Variant::Pbs)).unwrap();
        assert!((ubs.inner(&pbs).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn epsilon_range() {
        assert!(run_scheme_b(SchemeBParams::new(0.0, 1.0)).is_err());
        assert!(run_scheme_b(SchemeBParams::new(1.0, 1.0)).is_err());
    }
}
