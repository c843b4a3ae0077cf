//! Dense brute-force reference engine.
//!
//! Amplitudes live in a full `(cutoff+1)^m` array. Mode unitaries are lifted
//! one matrix element at a time with the permanent formula
//! `⟨m|U|n⟩ = Per(U[m,n]) / √(Π mⱼ! Π nₖ!)`, detector POVMs are summed over
//! every basis index and nothing is ever pruned. None of this shares code
//! with the sparse engine; it exists to cross-check it on small instances.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64 as C64;

use crate::detection::{ClickPattern, ConditionalOutcome, Outcome, IMPOSSIBLE_PROBABILITY};
use crate::error::{Error, Result};
use crate::fock::{FockKet, ModeRegister, Occupation, WeightedEnsemble};
use crate::optics::ModeUnitary;
use crate::protocols::Engine;

pub const MAX_MODES: usize = 8;
pub const MAX_CUTOFF: usize = 4;

#[derive(Clone, Debug)]
pub struct DenseState {
    register: ModeRegister,
    amplitudes: Vec<C64>,
}

fn check_limits(modes: usize, cutoff: usize) -> Result<()> {
    if modes > MAX_MODES {
        return Err(Error::SizeLimit(format!("{modes} modes (max {MAX_MODES})")));
    }
    if cutoff > MAX_CUTOFF {
        return Err(Error::SizeLimit(format!("cutoff {cutoff} (max {MAX_CUTOFF})")));
    }
    Ok(())
}

impl DenseState {
    pub fn zeros(register: ModeRegister) -> Result<Self> {
        check_limits(register.len(), register.cutoff())?;
        let dim = (register.cutoff() + 1).pow(register.len() as u32);
        Ok(Self {
            register,
            amplitudes: vec![C64::new(0.0, 0.0); dim],
        })
    }

    pub fn from_ket(ket: &FockKet) -> Result<Self> {
        Self::from_ket_with_cutoff(ket, ket.register().cutoff())
    }

    /// Embeds `ket` with a per-mode cutoff of `cutoff`, which must hold every term.
    pub fn from_ket_with_cutoff(ket: &FockKet, cutoff: usize) -> Result<Self> {
        let mut state = Self::zeros(ket.register().with_cutoff(cutoff)?)?;
        for (occ, amp) in ket.terms() {
            if occ.max_count() as usize > cutoff {
                return Err(Error::SizeLimit(format!("term {occ} exceeds dense cutoff {cutoff}")));
            }
            let i = state.index(occ.counts());
            state.amplitudes[i] = *amp;
        }
        Ok(state)
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).fold(0.0, |acc, x| acc + x)
    }

    /// Mixed-radix index; mode 0 is the most significant digit.
    pub fn index(&self, counts: &[u32]) -> usize {
        let base = self.register.cutoff() + 1;
        counts.iter().fold(0, |acc, &n| acc * base + n as usize)
    }

    pub fn occupation(&self, mut index: usize) -> Vec<u32> {
        let base = self.register.cutoff() + 1;
        let mut counts = vec![0; self.register.len()];
        for slot in counts.iter_mut().rev() {
            *slot = (index % base) as u32;
            index /= base;
        }
        counts
    }

    /// Every nonzero amplitude, unpruned.
    pub fn to_ket(&self) -> Result<FockKet> {
        let terms: BTreeMap<Occupation, C64> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != C64::new(0.0, 0.0))
            .map(|(i, a)| (Occupation::new(self.occupation(i)), *a))
            .collect();
        Ok(FockKet::from_map(self.register.clone(), terms, 0.0))
    }

    fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        if cutoff == self.register.cutoff() {
            return Ok(self.clone());
        }
        let mut out = Self::zeros(self.register.with_cutoff(cutoff)?)?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if *a != C64::new(0.0, 0.0) {
                let occ = self.occupation(i);
                if occ.iter().any(|&n| n as usize > cutoff) {
                    return Err(Error::SizeLimit(format!("cannot shrink cutoff to {cutoff}")));
                }
                let j = out.index(&occ);
                out.amplitudes[j] = *a;
            }
        }
        Ok(out)
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.amplitudes
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, a)| *a != C64::new(0.0, 0.0))
    }
}

fn mode_positions(register: &ModeRegister, modes: &[&str]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(modes.len());
    for m in modes {
        let i = register.index_of(m)?;
        if out.contains(&i) {
            return Err(Error::DuplicateMode(m.to_string()));
        }
        out.push(i);
    }
    Ok(out)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn permanent(a: &[Vec<C64>]) -> C64 {
    fn go(a: &[Vec<C64>], row: usize, used: &mut Vec<bool>) -> C64 {
        if row == a.len() {
            return C64::new(1.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..a.len() {
            if !used[col] {
                used[col] = true;
                acc += a[row][col] * go(a, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    go(a, 0, &mut vec![false; a.len()])
}

/// All occupation vectors over `slots` modes with total `n`.
fn sector(n: u32, slots: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0; slots];
    fn fill(n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k + 1 == cur.len() {
            cur[k] = n;
            out.push(cur.clone());
            return;
        }
        for v in (0..=n).rev() {
            cur[k] = v;
            fill(n - v, k + 1, cur, out);
        }
    }
    if slots > 0 {
        fill(n, 0, &mut cur, &mut out);
    }
    out
}

/// `⟨out|Û|inp⟩` for local configurations of equal photon number.
fn lifted_element(u: &ModeUnitary, out: &[u32], inp: &[u32]) -> C64 {
    let rows: Vec<usize> = out
        .iter()
        .enumerate()
        .flat_map(|(j, &m)| std::iter::repeat_n(j, m as usize))
        .collect();
    let cols: Vec<usize> = inp
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| std::iter::repeat_n(k, n as usize))
        .collect();
    let sub: Vec<Vec<C64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| u.entry(r, c)).collect())
        .collect();
    let norm: f64 = out.iter().chain(inp).map(|&k| factorial(k)).product();
    permanent(&sub) / norm.sqrt()
}

/// Applies `u` to `modes`. The per-mode cutoff grows to the largest local
/// photon number present, up to [`MAX_CUTOFF`].
pub fn dense_apply(state: &DenseState, u: &ModeUnitary, modes: &[&str]) -> Result<DenseState> {
    if modes.len() != u.size() {
        return Err(Error::ArityMismatch {
            expected: u.size(),
            found: modes.len(),
        });
    }
    let pos = mode_positions(&state.register, modes)?;
    let needed = state
        .nonzero()
        .map(|(i, _)| {
            let occ = state.occupation(i);
            pos.iter().map(|&p| occ[p]).sum::<u32>() as usize
        })
        .max()
        .unwrap_or(0);
    let state = state.with_cutoff(state.register.cutoff().max(needed))?;
    let mut out = DenseState::zeros(state.register.clone())?;

    let mut columns: HashMap<Vec<u32>, Vec<(Vec<u32>, C64)>> = HashMap::new();
    for (i, amp) in state.nonzero() {
        let mut occ = state.occupation(i);
        let local: Vec<u32> = pos.iter().map(|&p| occ[p]).collect();
        let column = columns.entry(local.clone()).or_insert_with(|| {
            let n = local.iter().sum();
            sector(n, u.size())
                .into_iter()
                .map(|m| {
                    let c = lifted_element(u, &m, &local);
                    (m, c)
                })
                .collect()
        });
        for (m, c) in column.iter() {
            for (k, &p) in pos.iter().enumerate() {
                occ[p] = m[k];
            }
            let j = out.index(&occ);
            out.amplitudes[j] += amp * c;
        }
    }
    Ok(out)
}

fn povm(eta: f64, outcome: Outcome, photons: u32) -> f64 {
    let silent = (1.0 - eta).powi(photons as i32);
    match outcome {
        Outcome::Silent => silent,
        Outcome::Click => 1.0 - silent,
    }
}

/// Groups of unmeasured-mode vectors keyed by measured occupation, each with
/// its POVM weight, reduced to a [`ConditionalOutcome`].
fn condition(state: &DenseState, measured: &[usize], weight: impl Fn(&[u32]) -> f64) -> Result<ConditionalOutcome> {
    let rest_register = state.register.without(measured);
    let rest_template = DenseState::zeros(rest_register.clone())?;
    let mut groups: BTreeMap<Vec<u32>, DenseState> = BTreeMap::new();
    for (i, amp) in state.nonzero() {
        let occ = state.occupation(i);
        let key: Vec<u32> = measured.iter().map(|&p| occ[p]).collect();
        let rest: Vec<u32> = (0..occ.len())
            .filter(|p| !measured.contains(p))
            .map(|p| occ[p])
            .collect();
        let group = groups.entry(key).or_insert_with(|| rest_template.clone());
        let j = group.index(&rest);
        group.amplitudes[j] += amp;
    }
    let mut total = 0.0;
    let mut branches = Vec::new();
    for (key, group) in groups {
        let w = weight(&key) * group.norm_sqr();
        if w > 0.0 {
            total += w;
            branches.push((w, group));
        }
    }
    if total < IMPOSSIBLE_PROBABILITY {
        return Ok(ConditionalOutcome::impossible(total));
    }
    let members = branches
        .into_iter()
        .map(|(w, group)| {
            let n = group.norm_sqr().sqrt();
            let ket = group.to_ket()?.scaled(C64::new(1.0 / n, 0.0));
            Ok((w / total, ket))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalOutcome {
        probability: total.min(1.0),
        ensemble: Some(WeightedEnsemble::new(members)?),
    })
}

fn check_normalized(state: &DenseState) -> Result<()> {
    let norm = state.norm_sqr().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Threshold-detector conditioning by explicit summation over the full basis.
pub fn dense_measure(state: &DenseState, pattern: &ClickPattern) -> Result<ConditionalOutcome> {
    check_normalized(state)?;
    let mut measured = Vec::new();
    let mut spans = Vec::new();
    for a in pattern.assignments() {
        let modes: Vec<&str> = a.modes.iter().map(String::as_str).collect();
        if modes.is_empty() {
            return Err(Error::InvalidPattern("detector watches no modes".into()));
        }
        for p in mode_positions(&state.register, &modes)? {
            if measured.contains(&p) {
                return Err(Error::InvalidPattern(format!(
                    "mode `{}` watched twice",
                    state.register.labels()[p]
                )));
            }
            measured.push(p);
        }
        spans.push((modes.len(), a.detector.eta, a.outcome));
    }
    condition(state, &measured, |key| {
        let mut offset = 0;
        let mut p = 1.0;
        for &(len, eta, outcome) in &spans {
            let n: u32 = key[offset..offset + len].iter().sum();
            offset += len;
            p *= povm(eta, outcome, n);
        }
        p
    })
}

/// Projection of `mode` onto exactly `n` photons.
pub fn number_resolving_measure(state: &DenseState, mode: &str, n: u32) -> Result<ConditionalOutcome> {
    check_normalized(state)?;
    let p = state.register.index_of(mode)?;
    condition(state, &[p], |key| if key[0] == n { 1.0 } else { 0.0 })
}

/// Inner product of two dense vectors over identically labelled registers.
fn dense_inner(a: &DenseState, b: &DenseState) -> C64 {
    a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum()
}

pub fn dense_fidelity(ensemble: &WeightedEnsemble, target: &FockKet) -> Result<f64> {
    if ensemble.register().labels() != target.register().labels() {
        return Err(Error::RegisterMismatch {
            left: ensemble.register().labels().to_vec(),
            right: target.register().labels().to_vec(),
        });
    }
    let mut f = 0.0;
    for (w, ket) in ensemble.members() {
        let cutoff = (ket.max_occupation().max(target.max_occupation()).max(1)) as usize;
        let t = DenseState::from_ket_with_cutoff(target, cutoff)?;
        let k = DenseState::from_ket_with_cutoff(ket, cutoff)?;
        f += w * dense_inner(&t, &k).norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `⟨bra|_A ψ⟩` on the modes of `state` outside `bra`, unnormalized.
pub fn dense_partial_overlap(state: &DenseState, bra: &FockKet) -> Result<FockKet> {
    let labels: Vec<&str> = bra.register().labels().iter().map(String::as_str).collect();
    let pos = mode_positions(&state.register, &labels)?;
    let bra_dense = DenseState::from_ket_with_cutoff(
        &FockKet::from_map(
            bra.register().with_cutoff(state.register.cutoff())?,
            bra.terms()
                .filter(|(o, _)| o.max_count() as usize <= state.register.cutoff())
                .map(|(o, a)| (o.clone(), *a))
                .collect(),
            0.0,
        ),
        state.register.cutoff(),
    )?;
    let mut rest = DenseState::zeros(state.register.without(&pos))?;
    for (i, amp) in state.nonzero() {
        let occ = state.occupation(i);
        let picked: Vec<u32> = pos.iter().map(|&p| occ[p]).collect();
        let b = bra_dense.amplitudes[bra_dense.index(&picked)];
        if b != C64::new(0.0, 0.0) {
            let r: Vec<u32> = (0..occ.len()).filter(|p| !pos.contains(p)).map(|p| occ[p]).collect();
            let j = rest.index(&r);
            rest.amplitudes[j] += b.conj() * amp;
        }
    }
    rest.to_ket()
}

/// The dense oracle as a protocol backend.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DenseEngine;

impl Engine for DenseEngine {
    type State = DenseState;

    fn name(&self) -> &'static str {
        "dense"
    }

    fn load(&self, ket: &FockKet) -> Result<DenseState> {
        DenseState::from_ket_with_cutoff(ket, ket.max_occupation().max(1) as usize)
    }

    fn to_ket(&self, state: &DenseState) -> Result<FockKet> {
        state.to_ket()
    }

    fn apply(&self, state: &DenseState, u: &ModeUnitary, modes: &[&str]) -> Result<DenseState> {
        dense_apply(state, u, modes)
    }

    fn relabel(&self, state: &DenseState, map: &[(&str, &str)]) -> Result<DenseState> {
        let mut labels = state.register.labels().to_vec();
        for (old, new) in map {
            labels[state.register.index_of(old)?] = new.to_string();
        }
        Ok(DenseState {
            register: ModeRegister::new(labels, state.register.cutoff())?,
            amplitudes: state.amplitudes.clone(),
        })
    }

    fn permute(&self, state: &DenseState, order: &[&str]) -> Result<DenseState> {
        if order.len() != state.register.len() {
            return Err(Error::RegisterMismatch {
                left: state.register.labels().to_vec(),
                right: order.iter().map(|s| s.to_string()).collect(),
            });
        }
        let pos = mode_positions(&state.register, order)?;
        let mut out = DenseState::zeros(ModeRegister::new(order.iter().copied(), state.register.cutoff())?)?;
        for (i, amp) in state.nonzero() {
            let occ = state.occupation(i);
            let new: Vec<u32> = pos.iter().map(|&p| occ[p]).collect();
            let j = out.index(&new);
            out.amplitudes[j] = amp;
        }
        Ok(out)
    }

    fn measure(&self, state: &DenseState, pattern: &ClickPattern) -> Result<ConditionalOutcome> {
        dense_measure(state, pattern)
    }

    fn project(&self, state: &DenseState, bra: &FockKet) -> Result<FockKet> {
        dense_partial_overlap(state, bra)
    }

    fn fidelity(&self, ensemble: &WeightedEnsemble, target: &FockKet) -> Result<f64> {
        dense_fidelity(ensemble, target)
    }
}
