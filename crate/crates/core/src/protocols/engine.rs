use crate::detection::{
    measure_pattern, ClickPattern, CoincidenceRow, CoincidenceTable, ConditionalOutcome, DetectorPort, Outcome,
    ThresholdDetector,
};
use crate::error::Result;
use crate::fock::{fidelity, FockKet, WeightedEnsemble, PRUNE_TOLERANCE};
use crate::optics::{apply_mode_unitary_with, CutoffPolicy, ModeUnitary};

/// The operations a protocol pipeline needs from a simulator backend.
///
/// Pipelines are written once against this trait and run on either the
/// sparse engine or the dense oracle.
pub trait Engine: Sync {
    type State: Clone + Send;

    fn name(&self) -> &'static str;
    fn load(&self, ket: &FockKet) -> Result<Self::State>;
    fn to_ket(&self, state: &Self::State) -> Result<FockKet>;
    fn apply(&self, state: &Self::State, u: &ModeUnitary, modes: &[&str]) -> Result<Self::State>;
    fn relabel(&self, state: &Self::State, map: &[(&str, &str)]) -> Result<Self::State>;
    fn permute(&self, state: &Self::State, order: &[&str]) -> Result<Self::State>;
    fn measure(&self, state: &Self::State, pattern: &ClickPattern) -> Result<ConditionalOutcome>;
    /// Unnormalized `⟨bra|_A ψ⟩` on the modes not covered by `bra`.
    fn project(&self, state: &Self::State, bra: &FockKet) -> Result<FockKet>;
    fn fidelity(&self, ensemble: &WeightedEnsemble, target: &FockKet) -> Result<f64>;

    /// Joint click statistics, one [`Engine::measure`] call per outcome.
    fn coincidences(
        &self,
        state: &Self::State,
        ports: &[DetectorPort],
        detector: ThresholdDetector,
    ) -> Result<CoincidenceTable> {
        let rows = CoincidenceTable::outcomes(ports.len())
            .map(|clicks| {
                let mut pattern = ClickPattern::new();
                for (port, &c) in ports.iter().zip(&clicks) {
                    let modes: Vec<&str> = port.modes.iter().map(String::as_str).collect();
                    let outcome = if c { Outcome::Click } else { Outcome::Silent };
                    pattern = pattern.watch(&modes, detector, outcome);
                }
                let probability = self.measure(state, &pattern)?.probability;
                Ok(CoincidenceRow { clicks, probability })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoincidenceTable {
            detectors: ports.iter().map(|p| p.name.clone()).collect(),
            rows,
        })
    }
}

/// The production backend: sparse kets and multinomial mode lifting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseEngine {
    pub policy: CutoffPolicy,
    pub prune_tolerance: f64,
}

impl Default for SparseEngine {
    fn default() -> Self {
        Self {
            policy: CutoffPolicy::Grow,
            prune_tolerance: PRUNE_TOLERANCE,
        }
    }
}

impl SparseEngine {
    pub fn unpruned() -> Self {
        Self {
            prune_tolerance: 0.0,
            ..Self::default()
        }
    }
}

impl Engine for SparseEngine {
    type State = FockKet;

    fn name(&self) -> &'static str {
        "sparse"
    }

    fn load(&self, ket: &FockKet) -> Result<FockKet> {
        Ok(ket.clone().with_prune_tolerance(self.prune_tolerance))
    }

    fn to_ket(&self, state: &FockKet) -> Result<FockKet> {
        Ok(state.clone())
    }

    fn apply(&self, state: &FockKet, u: &ModeUnitary, modes: &[&str]) -> Result<FockKet> {
        apply_mode_unitary_with(state, u, modes, self.policy)
    }

    fn relabel(&self, state: &FockKet, map: &[(&str, &str)]) -> Result<FockKet> {
        state.relabeled(map)
    }

    fn permute(&self, state: &FockKet, order: &[&str]) -> Result<FockKet> {
        state.permuted(order)
    }

    fn measure(&self, state: &FockKet, pattern: &ClickPattern) -> Result<ConditionalOutcome> {
        measure_pattern(state, pattern)
    }

    fn project(&self, state: &FockKet, bra: &FockKet) -> Result<FockKet> {
        state.partial_overlap(bra)
    }

    fn fidelity(&self, ensemble: &WeightedEnsemble, target: &FockKet) -> Result<f64> {
        fidelity(ensemble, target)
    }
}
