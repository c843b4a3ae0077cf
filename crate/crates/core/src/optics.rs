//! Passive linear-optical elements and their action on Fock states.
//!
//! A [`ModeUnitary`] `M` acts on creation operators as
//! `a_k† ↦ Σ_j M[j][k] a_j†`, i.e. column `k` is the image of input mode `k`.
//! A Fock term `Π_k (a_k†)^{n_k}/√(n_k!) |0⟩` is rewritten by substituting every
//! creation operator, expanding each power multinomially and collecting
//! monomials `Π_j (a_j†)^{m_j} |0⟩ = Π_j √(m_j!) |m⟩`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{param, Error, Result};
use crate::fock::{FockKet, Occupation};

/// Largest photon number the exact factorial table covers (20! < 2^64).
pub const MAX_EXPANSION_PHOTONS: u32 = 20;

pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Square unitary acting on an ordered subset of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    size: usize,
    entries: Vec<C64>,
}

impl ModeUnitary {
    /// `entries` in row-major order; rejected unless `‖M†M − I‖_max ≤ 1e-12`.
    pub fn new(size: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::ArityMismatch {
                expected: size * size,
                found: entries.len(),
            });
        }
        let u = Self { size, entries };
        let err = u.unitarity_error();
        if err.is_nan() || err > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(err));
        }
        Ok(u)
    }

    pub fn from_real(size: usize, entries: &[f64]) -> Result<Self> {
        Self::new(size, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn identity(size: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); size * size];
        for i in 0..size {
            entries[i * size + i] = C64::new(1.0, 0.0);
        }
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.size + col]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.size;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entry(r, c).conj();
            }
        }
        Self { size: n, entries }
    }

    /// Matrix product `self · rhs`.
    pub fn product(&self, rhs: &ModeUnitary) -> Self {
        let n = self.size;
        assert_eq!(n, rhs.size, "unitary size mismatch");
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = (0..n).map(|k| self.entry(r, k) * rhs.entry(k, c)).sum();
            }
        }
        Self { size: n, entries }
    }

    /// `max |(M†M − I)_{rc}|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().product(self);
        let mut worst: f64 = 0.0;
        for r in 0..self.size {
            for c in 0..self.size {
                let id = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((p.entry(r, c) - C64::new(id, 0.0)).norm());
            }
        }
        worst
    }
}

/// Balanced beam splitter `(1/√2)·[[1, 1], [1, −1]]`.
pub fn balanced_bs() -> ModeUnitary {
    let s = FRAC_1_SQRT_2;
    ModeUnitary::from_real(2, &[s, s, s, -s]).expect("balanced beam splitter is unitary")
}

/// Nearly transparent beam splitter `(1/√(1+ε²))·[[1, ε], [ε, −1]]`, `0 < ε ≤ 1`.
///
/// `ε = 1` reproduces [`balanced_bs`].
pub fn unbalanced_bs(epsilon: f64) -> Result<ModeUnitary> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(param("epsilon", epsilon, "must satisfy 0 < epsilon <= 1"));
    }
    let n = (1.0 + epsilon * epsilon).sqrt().recip();
    ModeUnitary::from_real(2, &[n, epsilon * n, epsilon * n, -n])
}

/// Rotation on a beam's `(H, V)` mode pair taking `a_H† ↦ (a_H† + ε a_V†)/√(1+ε²)`
/// and `a_V† ↦ (−ε a_H† + a_V†)/√(1+ε²)`.
pub fn polarization_rotation(epsilon: f64) -> Result<ModeUnitary> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(param("epsilon", epsilon, "must be finite and non-negative"));
    }
    let n = (1.0 + epsilon * epsilon).sqrt().recip();
    ModeUnitary::from_real(2, &[n, -epsilon * n, epsilon * n, n])
}

/// What to do when an element pushes a mode above the register cutoff.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CutoffPolicy {
    /// Fail with [`Error::CutoffOverflow`].
    Strict,
    /// Raise the register cutoff to fit.
    #[default]
    Grow,
}

/// Applies `u` to the modes `modes` (in matrix index order) with the
/// [`CutoffPolicy::Grow`] policy.
pub fn apply_mode_unitary(state: &FockKet, u: &ModeUnitary, modes: &[&str]) -> Result<FockKet> {
    apply_mode_unitary_with(state, u, modes, CutoffPolicy::Grow)
}

pub fn apply_mode_unitary_with(
    state: &FockKet,
    u: &ModeUnitary,
    modes: &[&str],
    policy: CutoffPolicy,
) -> Result<FockKet> {
    if modes.len() != u.size() {
        return Err(Error::ArityMismatch {
            expected: u.size(),
            found: modes.len(),
        });
    }
    let register = state.register();
    let idx = register.indices_of(modes)?;

    let mut images: HashMap<Vec<u32>, Vec<(Vec<u32>, C64)>> = HashMap::new();
    let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let local: Vec<u32> = idx.iter().map(|&i| occ.counts()[i]).collect();
        if !images.contains_key(&local) {
            let image = lift_configuration(u, &local)?;
            images.insert(local.clone(), image);
        }
        for (image_local, coeff) in &images[&local] {
            let mut counts = occ.counts().to_vec();
            for (k, &i) in idx.iter().enumerate() {
                counts[i] = image_local[k];
            }
            *out.entry(Occupation::new(counts)).or_default() += amp * coeff;
        }
    }

    let result = FockKet::from_map(register.clone(), out, state.prune_tolerance());
    let needed = result.max_occupation() as usize;
    if needed <= register.cutoff() {
        return Ok(result);
    }
    match policy {
        CutoffPolicy::Grow => {
            let grown = register.with_cutoff(needed)?;
            Ok(result.with_register(grown))
        }
        CutoffPolicy::Strict => {
            let (occ, _) = result
                .terms()
                .find(|(o, _)| o.max_count() as usize > register.cutoff())
                .expect("some term exceeds the cutoff");
            let (i, &count) = occ
                .counts()
                .iter()
                .enumerate()
                .max_by_key(|(_, n)| **n)
                .expect("non-empty occupation");
            Err(Error::CutoffOverflow {
                mode: register.labels()[i].clone(),
                count,
                cutoff: register.cutoff(),
            })
        }
    }
}

/// Image of the local Fock configuration `input` under `u`, as
/// (output configuration, amplitude) pairs.
fn lift_configuration(u: &ModeUnitary, input: &[u32]) -> Result<Vec<(Vec<u32>, C64)>> {
    let total: u32 = input.iter().sum();
    if total > MAX_EXPANSION_PHOTONS {
        return Err(Error::TooManyPhotons(total));
    }
    let s = u.size();
    let norm_in: f64 = input.iter().map(|&n| factorial(n) as f64).product();
    let mut poly: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
    poly.insert(vec![0; s], C64::new(norm_in.sqrt().recip(), 0.0));

    for (k, &n) in input.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let mut next: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for split in compositions(n, s) {
            let mut coeff = C64::new(multinomial(n, &split) as f64, 0.0);
            for (j, &m) in split.iter().enumerate() {
                coeff *= u.entry(j, k).powu(m);
            }
            if coeff == C64::new(0.0, 0.0) {
                continue;
            }
            for (exps, c) in &poly {
                let merged: Vec<u32> = exps.iter().zip(&split).map(|(a, b)| a + b).collect();
                *next.entry(merged).or_default() += c * coeff;
            }
        }
        poly = next;
    }

    Ok(poly
        .into_iter()
        .map(|(exps, c)| {
            let norm_out: f64 = exps.iter().map(|&m| factorial(m) as f64).product();
            (exps, c * norm_out.sqrt())
        })
        .filter(|(_, c)| *c != C64::new(0.0, 0.0))
        .collect())
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

fn multinomial(n: u32, parts: &[u32]) -> u64 {
    parts.iter().fold(factorial(n), |acc, &m| acc / factorial(m))
}

/// All length-`slots` vectors of non-negative integers summing to `n`.
fn compositions(n: u32, slots: usize) -> Vec<Vec<u32>> {
    if slots == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, slots - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Polarizing beam splitter on one beam, modelled as a mode relabeling.
///
/// The input beam's H mode leaves through `transmitted` and its V mode
/// through `reflected`. Both ports carry phase +1, so no amplitude changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pbs {
    h_in: String,
    v_in: String,
    transmitted: String,
    reflected: String,
}

/// `input = (H mode, V mode)`, `outputs = (transmitted, reflected)`; all four
/// labels must differ.
pub fn pbs(input: (&str, &str), outputs: (&str, &str)) -> Result<Pbs> {
    let labels = [input.0, input.1, outputs.0, outputs.1];
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateMode(l.to_string()));
        }
    }
    Ok(Pbs {
        h_in: input.0.into(),
        v_in: input.1.into(),
        transmitted: outputs.0.into(),
        reflected: outputs.1.into(),
    })
}

impl Pbs {
    /// (old label, new label) pairs.
    pub fn routing(&self) -> [(&str, &str); 2] {
        [
            (self.h_in.as_str(), self.transmitted.as_str()),
            (self.v_in.as_str(), self.reflected.as_str()),
        ]
    }

    pub fn apply(&self, state: &FockKet) -> Result<FockKet> {
        state.relabeled(&self.routing())
    }
}
