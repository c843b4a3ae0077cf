//! Initial states: SPDC pairs, the double-pass sources and the
//! non-maximally entangled product states.
//!
//! Polarization-resolved beams use two modes per beam, `"<beam>H"` and
//! `"<beam>V"`; `|HV⟩_b` is occupation `(1, 1)` on that pair and `|2H⟩_b` is
//! occupation 2 in the H mode.

use num_complex::Complex64 as C64;

use crate::error::{param, Error, Result};
use crate::fock::{FockKet, ModeRegister, Occupation};

/// Truncated two-mode squeezed vacuum `Σ_{n≤order} τⁿ|n,n⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdcParams {
    pub tau: C64,
    pub order: usize,
}

impl SpdcParams {
    pub fn new(tau: C64, order: usize) -> Result<Self> {
        if tau.norm().is_nan() || tau.norm() >= 1.0 {
            return Err(param("tau", tau.norm(), "|tau| must be below 1"));
        }
        if order == 0 {
            return Err(param("order", 0.0, "order must be at least 1"));
        }
        Ok(Self { tau, order })
    }

    pub fn real(tau: f64, order: usize) -> Result<Self> {
        Self::new(C64::new(tau, 0.0), order)
    }
}

/// Normalized `Σ_{n=0}^{order} τⁿ |n⟩_a|n⟩_b` on `register`, vacuum elsewhere.
pub fn spdc_pair(params: SpdcParams, register: &ModeRegister, modes: [&str; 2]) -> Result<FockKet> {
    if params.order > register.cutoff() {
        return Err(param(
            "order",
            params.order as f64,
            "truncation order exceeds the register cutoff",
        ));
    }
    let idx = register.indices_of(&modes)?;
    let mut amp = C64::new(1.0, 0.0);
    let mut terms = Vec::with_capacity(params.order + 1);
    for n in 0..=params.order as u32 {
        let mut counts = vec![0; register.len()];
        counts[idx[0]] = n;
        counts[idx[1]] = n;
        terms.push((Occupation::new(counts), amp));
        amp *= params.tau;
    }
    FockKet::from_terms(register.clone(), terms)?.normalize()
}

/// Two independent pairs on beams (1,4) and (2,3), register order `1,4,2,3`.
///
/// At `order = 1` this is `(|00⟩+τ|11⟩)₁₄(|00⟩+τ|11⟩)₂₃ / (1+|τ|²)`.
pub fn double_pass_source(params: SpdcParams) -> Result<FockKet> {
    let left = ModeRegister::new(["1", "4"], params.order)?;
    let right = ModeRegister::new(["2", "3"], params.order)?;
    spdc_pair(params, &left, ["1", "4"])?.tensor(&spdc_pair(params, &right, ["2", "3"])?)
}

/// H and V mode labels of a beam.
pub fn polarization_modes(beam: &str) -> (String, String) {
    (format!("{beam}H"), format!("{beam}V"))
}

/// Relative amplitudes of the singlet-pair and double-pair addends of the
/// polarization double-pass state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationWeights {
    /// Weight of `|X⟩₁₃₂₄`.
    pub x: f64,
    /// Weight of each of `|Y⟩₁₃` and `|Y⟩₂₄`.
    pub y: f64,
}

impl PolarizationWeights {
    /// Unit weights on all three addends.
    pub const AS_PRINTED: Self = Self { x: 1.0, y: 1.0 };

    /// `|X⟩` only: the ideal two-singlet input.
    pub const X_ONLY: Self = Self { x: 1.0, y: 0.0 };

    /// Every addend is second order in the pair amplitude, so a physical
    /// double-pass source weights them all by `τ²`.
    pub fn second_order(tau: f64) -> Self {
        Self {
            x: tau * tau,
            y: tau * tau,
        }
    }
}

impl Default for PolarizationWeights {
    fn default() -> Self {
        Self::AS_PRINTED
    }
}

/// Normalized `x·|X⟩₁₃₂₄ + y·(|Y⟩₁₃ + |Y⟩₂₄)` on modes
/// `1H,1V,2H,2V,3H,3V,4H,4V`, with
/// `|X⟩ = (|H⟩₁|V⟩₃ − |V⟩₁|H⟩₃)(|H⟩₂|V⟩₄ − |V⟩₂|H⟩₄)` and
/// `|Y⟩ᵢⱼ = |2H⟩ᵢ|2V⟩ⱼ + |2V⟩ᵢ|2H⟩ⱼ − |HV⟩ᵢ|HV⟩ⱼ`.
pub fn polarization_double_pass(cutoff: usize, weights: PolarizationWeights) -> Result<FockKet> {
    if cutoff < 2 {
        return Err(param("cutoff", cutoff as f64, "double-pair terms need cutoff >= 2"));
    }
    let register = ModeRegister::new(["1H", "1V", "2H", "2V", "3H", "3V", "4H", "4V"], cutoff)?;
    // (beam, H count, V count) triples → occupation vector
    let occ = |parts: &[(usize, u32, u32)]| {
        let mut counts = vec![0; 8];
        for &(beam, h, v) in parts {
            counts[2 * (beam - 1)] += h;
            counts[2 * (beam - 1) + 1] += v;
        }
        Occupation::new(counts)
    };
    let x = C64::new(weights.x, 0.0);
    let y = C64::new(weights.y, 0.0);
    let mut terms = vec![
        (occ(&[(1, 1, 0), (3, 0, 1), (2, 1, 0), (4, 0, 1)]), x),
        (occ(&[(1, 1, 0), (3, 0, 1), (2, 0, 1), (4, 1, 0)]), -x),
        (occ(&[(1, 0, 1), (3, 1, 0), (2, 1, 0), (4, 0, 1)]), -x),
        (occ(&[(1, 0, 1), (3, 1, 0), (2, 0, 1), (4, 1, 0)]), x),
    ];
    for (i, j) in [(1, 3), (2, 4)] {
        terms.push((occ(&[(i, 2, 0), (j, 0, 2)]), y));
        terms.push((occ(&[(i, 0, 2), (j, 2, 0)]), y));
        terms.push((occ(&[(i, 1, 1), (j, 1, 1)]), -y));
    }
    FockKet::from_terms(register, terms)?.normalize()
}

/// The five-branch state of beams `2′,3′,1,4` after the beam splitter of the
/// vacuum–one-photon experiment, normalized:
/// `|00⟩|11⟩ + ½(|10⟩|Ψ⁺⟩ + |01⟩|Ψ⁻⟩) + (|20⟩|00⟩ − |02⟩|00⟩)/√2`.
pub fn vacuum_one_photon_postbs() -> FockKet {
    let register = ModeRegister::new(["2'", "3'", "1", "4"], 2).expect("static register");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // ½|10⟩Ψ⁺ expands to (½·h)(|10 01⟩ + |10 10⟩); Ψ± = (|0⟩₁|1⟩₄ ± |1⟩₁|0⟩₄)/√2.
    let q = 0.5 * h;
    let terms = [
        ([0, 0, 1, 1], 1.0),
        ([1, 0, 0, 1], q),
        ([1, 0, 1, 0], q),
        ([0, 1, 0, 1], q),
        ([0, 1, 1, 0], -q),
        ([2, 0, 0, 0], h),
        ([0, 2, 0, 0], -h),
    ];
    FockKet::from_terms(register, terms.map(|(o, a)| (o, C64::new(a, 0.0))))
        .and_then(|k| k.normalize())
        .expect("static state")
}

/// `(cos θ|00⟩ + sin θ|11⟩)₁₂ ⊗ (cos θ|00⟩ + sin θ|11⟩)₃₄`.
pub fn theta_product(theta: f64) -> Result<FockKet> {
    if !theta.is_finite() {
        return Err(param("theta", theta, "must be finite"));
    }
    let pair = |a: &str, b: &str| -> Result<FockKet> {
        let reg = ModeRegister::new([a, b], 1)?;
        FockKet::from_terms(
            reg,
            [
                ([0, 0], C64::new(theta.cos(), 0.0)),
                ([1, 1], C64::new(theta.sin(), 0.0)),
            ],
        )
    };
    pair("1", "2")?.tensor(&pair("3", "4")?)?.normalize()
}

/// `(|00⟩ + ε|11⟩)/√(1+ε²)` on a fresh two-mode register.
pub fn chi_state(epsilon: f64, modes: [&str; 2]) -> Result<FockKet> {
    if !epsilon.is_finite() {
        return Err(param("epsilon", epsilon, "must be finite"));
    }
    let reg = ModeRegister::new(modes, 1)?;
    FockKet::from_terms(reg, [([0, 0], C64::new(1.0, 0.0)), ([1, 1], C64::new(epsilon, 0.0))])?
        .normalize()
        .map_err(|_| Error::ZeroKet)
}
