use std::collections::BTreeMap;

use serde::Serialize;

use super::Engine;
use crate::detection::{CoincidenceTable, ConditionalOutcome};
use crate::error::Result;
use crate::fock::{BellKind, FockKet};

/// Branches lighter than this are left out of reports and counted in
/// [`ProtocolReport::dropped_mass`].
pub const BRANCH_REPORT_THRESHOLD: f64 = 1e-12;

/// One member of a conditional ensemble.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub weight: f64,
    pub state: FockKet,
}

#[derive(Clone, Debug, Serialize)]
pub struct EventRecord {
    pub name: String,
    pub probability: f64,
    pub fidelity_psi_plus: f64,
    pub fidelity_psi_minus: f64,
    /// The Ψ state with the larger fidelity; `None` for impossible events or
    /// when both fidelities vanish.
    pub favored: Option<BellKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_target: Option<f64>,
    pub impossible: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ensemble: Vec<Branch>,
    #[serde(skip)]
    pub(crate) dropped: f64,
}

impl EventRecord {
    /// A record with only a probability; fidelities are zero.
    pub fn bare(name: &str, probability: f64) -> Self {
        Self {
            name: name.into(),
            probability,
            fidelity_psi_plus: 0.0,
            fidelity_psi_minus: 0.0,
            favored: None,
            target: None,
            fidelity_target: None,
            impossible: false,
            metrics: BTreeMap::new(),
            ensemble: Vec::new(),
            dropped: 0.0,
        }
    }

    /// Fidelities of the conditional ensemble, reordered to `order`, against
    /// `psi_plus` and `psi_minus`.
    pub fn from_outcome<E: Engine>(
        engine: &E,
        name: &str,
        outcome: &ConditionalOutcome,
        order: &[&str],
        psi_plus: &FockKet,
        psi_minus: &FockKet,
    ) -> Result<Self> {
        let mut record = Self::bare(name, outcome.probability);
        let Some(ensemble) = &outcome.ensemble else {
            record.impossible = true;
            return Ok(record);
        };
        let ensemble = ensemble.permuted(order)?;
        record.fidelity_psi_plus = engine.fidelity(&ensemble, psi_plus)?;
        record.fidelity_psi_minus = engine.fidelity(&ensemble, psi_minus)?;
        let best = record.fidelity_psi_plus.max(record.fidelity_psi_minus);
        record.favored = if best < BRANCH_REPORT_THRESHOLD {
            None
        } else if record.fidelity_psi_plus >= record.fidelity_psi_minus {
            Some(BellKind::PsiPlus)
        } else {
            Some(BellKind::PsiMinus)
        };
        for (w, ket) in ensemble.members() {
            if *w >= BRANCH_REPORT_THRESHOLD {
                record.ensemble.push(Branch {
                    weight: *w,
                    state: ket.clone(),
                });
            } else {
                record.dropped += w * outcome.probability;
            }
        }
        Ok(record)
    }

    pub fn with_target(mut self, target: &str, fidelity: f64) -> Self {
        self.target = Some(target.into());
        self.fidelity_target = Some(fidelity);
        self
    }

    pub fn with_metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.into(), value);
        self
    }

    /// Copies the fidelity columns of `parent`, for rows that refine it.
    pub(crate) fn inherit(mut self, parent: &EventRecord) -> Self {
        self.fidelity_psi_plus = parent.fidelity_psi_plus;
        self.fidelity_psi_minus = parent.fidelity_psi_minus;
        self.favored = parent.favored;
        self.impossible = parent.impossible;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub scheme: String,
    pub engine: String,
    pub params: BTreeMap<String, f64>,
    pub events: Vec<EventRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coincidences: Option<CoincidenceTable>,
    pub dropped_mass: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ProtocolReport {
    pub fn new(scheme: &str, engine: &str) -> Self {
        Self {
            scheme: scheme.into(),
            engine: engine.into(),
            params: BTreeMap::new(),
            events: Vec::new(),
            coincidences: None,
            dropped_mass: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn push(&mut self, event: EventRecord) {
        self.dropped_mass += event.dropped;
        self.events.push(event);
    }

    pub fn event(&self, name: &str) -> Option<&EventRecord> {
        self.events.iter().find(|e| e.name == name)
    }

    /// Largest absolute difference between any two corresponding numbers of
    /// two reports of the same run: probabilities, fidelities, metrics and
    /// coincidence rows. Structural mismatches count as infinite.
    pub fn max_deviation(&self, other: &ProtocolReport) -> f64 {
        if self.scheme != other.scheme || self.events.len() != other.events.len() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        let mut diff = |a: f64, b: f64| dev = dev.max((a - b).abs());
        for (a, b) in self.events.iter().zip(&other.events) {
            if a.name != b.name || a.impossible != b.impossible || a.metrics.len() != b.metrics.len() {
                return f64::INFINITY;
            }
            diff(a.probability, b.probability);
            diff(a.fidelity_psi_plus, b.fidelity_psi_plus);
            diff(a.fidelity_psi_minus, b.fidelity_psi_minus);
            match (a.fidelity_target, b.fidelity_target) {
                (Some(x), Some(y)) => diff(x, y),
                (None, None) => {}
                _ => return f64::INFINITY,
            }
            for ((ka, va), (kb, vb)) in a.metrics.iter().zip(&b.metrics) {
                if ka != kb {
                    return f64::INFINITY;
                }
                diff(*va, *vb);
            }
        }
        match (&self.coincidences, &other.coincidences) {
            (Some(x), Some(y)) => {
                if x.rows.len() != y.rows.len() {
                    return f64::INFINITY;
                }
                for (r, s) in x.rows.iter().zip(&y.rows) {
                    diff(r.probability, s.probability);
                }
            }
            (None, None) => {}
            _ => return f64::INFINITY,
        }
        dev
    }
}
