//! Ideal Bell-basis projection of the inner modes (2,3) of two pairs.

use super::{Engine, EventRecord, ProtocolReport, SparseEngine};
use crate::detection::{ConditionalOutcome, IMPOSSIBLE_PROBABILITY};
use crate::error::Result;
use crate::fock::{bell_state, BellKind, FockKet, ModeRegister, WeightedEnsemble};
use crate::sources::theta_product;

/// Projects modes (2,3) of `state` onto each Bell state and records the
/// conditional (1,4) state against the same Bell state on (1,4).
fn bell_projection<E: Engine>(engine: &E, mut report: ProtocolReport, state: &FockKet) -> Result<ProtocolReport> {
    let loaded = engine.load(state)?;
    let inner = ModeRegister::new(["2", "3"], 1)?;
    let outer = ModeRegister::new(["1", "4"], 1)?;
    let plus = bell_state(BellKind::PsiPlus, &outer, ["1", "4"])?;
    let minus = bell_state(BellKind::PsiMinus, &outer, ["1", "4"])?;
    for kind in BellKind::ALL {
        let bra = bell_state(kind, &inner, ["2", "3"])?;
        let cond = engine.project(&loaded, &bra)?.permuted(&["1", "4"])?;
        let probability = cond.norm_sqr();
        let target = bell_state(kind, &outer, ["1", "4"])?;
        let coefficient = target.inner(&cond)?;
        let outcome = if probability < IMPOSSIBLE_PROBABILITY {
            ConditionalOutcome::impossible(probability)
        } else {
            ConditionalOutcome {
                probability,
                ensemble: Some(WeightedEnsemble::pure(cond)?),
            }
        };
        let fidelity = match &outcome.ensemble {
            Some(ens) => engine.fidelity(ens, &target)?,
            None => 0.0,
        };
        let record = EventRecord::from_outcome(engine, kind.symbol(), &outcome, &["1", "4"], &plus, &minus)?
            .with_target(&format!("{kind}_14"), fidelity)
            .with_metric("coefficient_re", coefficient.re)
            .with_metric("coefficient_im", coefficient.im);
        report.push(record);
    }
    Ok(report)
}

/// `Ψ⁻₁₂ ⊗ Ψ⁻₃₄` projected on the Bell basis of (2,3).
pub fn bell_decomposition_check() -> Result<ProtocolReport> {
    bell_decomposition_check_with(&SparseEngine::default())
}

pub fn bell_decomposition_check_with<E: Engine>(engine: &E) -> Result<ProtocolReport> {
    let pair = |a: &str, b: &str| -> Result<FockKet> {
        bell_state(BellKind::PsiMinus, &ModeRegister::new([a, b], 1)?, [a, b])
    };
    let state = pair("1", "2")?.tensor(&pair("3", "4")?)?;
    let report = ProtocolReport::new("bell-check", engine.name())
        .note("ideal Bell projection of modes (2,3); coefficient = <B_14|conditional state>");
    bell_projection(engine, report, &state)
}

/// `|θ⟩₁₂|θ⟩₃₄` projected on the Bell basis of (2,3).
pub fn run_theta_swapping(theta: f64) -> Result<ProtocolReport> {
    run_theta_swapping_with(&SparseEngine::default(), theta)
}

pub fn run_theta_swapping_with<E: Engine>(engine: &E, theta: f64) -> Result<ProtocolReport> {
    let state = theta_product(theta)?;
    let report = ProtocolReport::new("theta", engine.name())
        .param("theta", theta)
        .note("outcome probabilities are taken from the normalized input state");
    bell_projection(engine, report, &state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_check_coefficients_follow_sign_pattern() {
        let report = bell_decomposition_check().unwrap();
        let expected = [0.5, -0.5, -0.5, 0.5];
        for (event, c) in report.events.iter().zip(expected) {
            assert!((event.probability - 0.25).abs() < 1e-15);
            assert!((event.metrics["coefficient_re"] - c).abs() < 1e-15, "{}", event.name);
            assert!((event.fidelity_target.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_zero_never_heralds_psi() {
        let report = run_theta_swapping(0.0).unwrap();
        assert!(report.event("psi+").unwrap().impossible);
        assert!(report.event("psi-").unwrap().impossible);
        assert!((report.event("phi+").unwrap().probability - 0.5).abs() < 1e-15);
    }
}
