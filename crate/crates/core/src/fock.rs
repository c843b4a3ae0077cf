//! Sparse multimode Fock states over an ordered mode register.
//!
//! A [`FockKet`] maps occupation vectors to complex amplitudes. Modes are
//! addressed by label, and every printed or serialized ket lists the modes
//! left to right in register order. Mixed states only ever appear as a
//! [`WeightedEnsemble`] of pure kets.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with magnitude below this are dropped from a ket.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Allowed deviation from unit norm for kets and ensemble weights.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Ordered, uniquely labelled optical modes sharing a photon-number cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRegister {
    labels: Vec<String>,
    cutoff: usize,
}

impl ModeRegister {
    pub fn new<I, S>(labels: I, cutoff: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if cutoff == 0 {
            return Err(Error::ZeroCutoff);
        }
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateMode(label.clone()));
            }
        }
        Ok(Self { labels, cutoff })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(self.labels.iter().cloned(), cutoff)
    }

    /// Concatenation `self ++ other`; the larger cutoff wins.
    pub fn concat(&self, other: &ModeRegister) -> Result<Self> {
        Self::new(
            self.labels.iter().chain(other.labels.iter()).cloned(),
            self.cutoff.max(other.cutoff),
        )
    }

    /// Register with the modes at `removed` dropped, order otherwise kept.
    pub fn without(&self, removed: &[usize]) -> Self {
        Self {
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, l)| l.clone())
                .collect(),
            cutoff: self.cutoff,
        }
    }

    pub(crate) fn indices_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let idx = labels.iter().map(|l| self.index_of(l)).collect::<Result<Vec<_>>>()?;
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateMode(label.to_string()));
            }
        }
        Ok(idx)
    }

    pub(crate) fn same_modes(&self, other: &ModeRegister) -> bool {
        self.labels == other.labels
    }

    pub(crate) fn ensure_same_modes(&self, other: &ModeRegister) -> Result<()> {
        if self.same_modes(other) {
            Ok(())
        } else {
            Err(Error::RegisterMismatch {
                left: self.labels.clone(),
                right: other.labels.clone(),
            })
        }
    }
}

/// Photon count per register mode; the basis label of one Fock term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    fn pick(&self, idx: &[usize]) -> Occupation {
        Occupation(idx.iter().map(|&i| self.0[i]).collect())
    }

    fn drop_indices(&self, idx: &[usize]) -> Occupation {
        Occupation(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !idx.contains(i))
                .map(|(_, &n)| n)
                .collect(),
        )
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(counts: Vec<u32>) -> Self {
        Self(counts)
    }
}

impl From<&[u32]> for Occupation {
    fn from(counts: &[u32]) -> Self {
        Self(counts.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(counts: [u32; N]) -> Self {
        Self(counts.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.0.iter().map(u32::to_string).collect();
        if self.0.iter().all(|&n| n < 10) {
            write!(f, "|{}⟩", body.concat())
        } else {
            write!(f, "|{}⟩", body.join(","))
        }
    }
}

/// Sparse pure state: occupation vector → amplitude over a [`ModeRegister`].
#[derive(Clone, Debug)]
pub struct FockKet {
    register: ModeRegister,
    terms: BTreeMap<Occupation, C64>,
    prune_tol: f64,
}

impl FockKet {
    pub fn zero(register: ModeRegister) -> Self {
        Self {
            register,
            terms: BTreeMap::new(),
            prune_tol: PRUNE_TOLERANCE,
        }
    }

    pub fn vacuum(register: ModeRegister) -> Self {
        let mut ket = Self::zero(register);
        ket.terms
            .insert(Occupation::vacuum(ket.register.len()), C64::new(1.0, 0.0));
        ket
    }

    pub fn basis(register: ModeRegister, counts: &[u32]) -> Result<Self> {
        Self::from_terms(register, [(Occupation::from(counts), C64::new(1.0, 0.0))])
    }

    /// Builds a ket from (occupation, amplitude) pairs. Repeated occupations
    /// are summed; occupations are checked against the register.
    pub fn from_terms<I, O>(register: ModeRegister, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, C64)>,
        O: Into<Occupation>,
    {
        let mut map: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in terms {
            let occ = occ.into();
            check_occupation(&register, &occ)?;
            *map.entry(occ).or_default() += amp;
        }
        Ok(Self::from_map(register, map, PRUNE_TOLERANCE))
    }

    pub(crate) fn from_map(register: ModeRegister, terms: BTreeMap<Occupation, C64>, prune_tol: f64) -> Self {
        let mut ket = Self {
            register,
            terms,
            prune_tol,
        };
        ket.prune();
        ket
    }

    fn prune(&mut self) {
        let tol = self.prune_tol;
        self.terms.retain(|_, a| a.norm() >= tol && *a != C64::new(0.0, 0.0));
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, counts: &[u32]) -> C64 {
        self.terms.get(&Occupation::from(counts)).copied().unwrap_or_default()
    }

    pub fn prune_tolerance(&self) -> f64 {
        self.prune_tol
    }

    /// Same state with a different zero-pruning tolerance (0 disables pruning).
    pub fn with_prune_tolerance(mut self, tol: f64) -> Self {
        self.prune_tol = tol;
        self.prune();
        self
    }

    /// Largest photon count over all terms and modes.
    pub fn max_occupation(&self) -> u32 {
        self.terms.keys().map(Occupation::max_count).max().unwrap_or(0)
    }

    pub fn max_photon_number(&self) -> u32 {
        self.terms.keys().map(Occupation::total).max().unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(C64::norm_sqr).fold(0.0, |acc, x| acc + x)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroKet);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_map(
            self.register.clone(),
            self.terms.iter().map(|(o, a)| (o.clone(), a * factor)).collect(),
            self.prune_tol,
        )
    }

    pub fn add(&self, other: &FockKet) -> Result<Self> {
        self.register.ensure_same_modes(&other.register)?;
        let mut terms = self.terms.clone();
        for (o, a) in &other.terms {
            *terms.entry(o.clone()).or_default() += a;
        }
        let register = self
            .register
            .with_cutoff(self.register.cutoff.max(other.register.cutoff))?;
        Ok(Self::from_map(register, terms, self.prune_tol.min(other.prune_tol)))
    }

    /// `self ⊗ other` on the concatenated register. Labels must be disjoint.
    pub fn tensor(&self, other: &FockKet) -> Result<Self> {
        let register = self.register.concat(&other.register)?;
        let mut terms = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut counts = u.0.clone();
                counts.extend_from_slice(&v.0);
                terms.insert(Occupation(counts), a * b);
            }
        }
        Ok(Self::from_map(register, terms, self.prune_tol.min(other.prune_tol)))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockKet) -> Result<C64> {
        self.register.ensure_same_modes(&other.register)?;
        let (small, large, flip) = if self.terms.len() <= other.terms.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (o, a) in &small.terms {
            if let Some(b) = large.terms.get(o) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// Reorders modes to `order`, which must be a permutation of the labels.
    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.register.len() {
            return Err(Error::RegisterMismatch {
                left: self.register.labels.clone(),
                right: order.iter().map(|s| s.to_string()).collect(),
            });
        }
        let idx = self.register.indices_of(order)?;
        let register = ModeRegister::new(order.iter().copied(), self.register.cutoff)?;
        let terms = self.terms.iter().map(|(o, a)| (o.pick(&idx), *a)).collect();
        Ok(Self::from_map(register, terms, self.prune_tol))
    }

    /// Renames modes; amplitudes are untouched.
    pub fn relabeled(&self, map: &[(&str, &str)]) -> Result<Self> {
        let mut labels = self.register.labels.clone();
        for (old, new) in map {
            let i = self.register.index_of(old)?;
            labels[i] = new.to_string();
        }
        let register = ModeRegister::new(labels, self.register.cutoff)?;
        Ok(Self {
            register,
            terms: self.terms.clone(),
            prune_tol: self.prune_tol,
        })
    }

    /// Groups terms by the occupation of the modes at `measured`, returning
    /// for each group the (unnormalized) ket on the remaining modes.
    pub(crate) fn split(&self, measured: &[usize]) -> BTreeMap<Occupation, FockKet> {
        let rest_register = self.register.without(measured);
        let mut groups: BTreeMap<Occupation, BTreeMap<Occupation, C64>> = BTreeMap::new();
        for (o, a) in &self.terms {
            *groups
                .entry(o.pick(measured))
                .or_default()
                .entry(o.drop_indices(measured))
                .or_default() += a;
        }
        groups
            .into_iter()
            .map(|(k, terms)| (k, Self::from_map(rest_register.clone(), terms, self.prune_tol)))
            .collect()
    }

    /// Partial inner product `⟨bra|_A |self⟩_{AB}`: an unnormalized ket on
    /// the modes of `self` not covered by `bra`.
    pub fn partial_overlap(&self, bra: &FockKet) -> Result<FockKet> {
        let labels: Vec<&str> = bra.register.labels.iter().map(String::as_str).collect();
        let idx = self.register.indices_of(&labels)?;
        let rest_register = self.register.without(&idx);
        let mut terms: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (o, a) in &self.terms {
            if let Some(b) = bra.terms.get(&o.pick(&idx)) {
                *terms.entry(o.drop_indices(&idx)).or_default() += b.conj() * a;
            }
        }
        Ok(Self::from_map(rest_register, terms, self.prune_tol))
    }

    /// Replaces the register (same labels, possibly larger cutoff).
    pub(crate) fn with_register(mut self, register: ModeRegister) -> Self {
        debug_assert!(self.register.same_modes(&register));
        self.register = register;
        self
    }
}

fn check_occupation(register: &ModeRegister, occ: &Occupation) -> Result<()> {
    if occ.0.len() != register.len() {
        return Err(Error::OccupationLength {
            expected: register.len(),
            found: occ.0.len(),
        });
    }
    for (label, &n) in register.labels.iter().zip(&occ.0) {
        if n as usize > register.cutoff {
            return Err(Error::CutoffOverflow {
                mode: label.clone(),
                count: n,
                cutoff: register.cutoff,
            });
        }
    }
    Ok(())
}

impl fmt::Display for FockKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (o, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if a.im == 0.0 {
                write!(f, "{:.6}{}", a.re, o)?;
            } else {
                write!(f, "({:.6}{:+.6}i){}", a.re, a.im, o)?;
            }
        }
        write!(f, "  [{}]", self.register.labels.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    occ: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct KetJson {
    modes: Vec<String>,
    terms: Vec<TermJson>,
}

impl Serialize for FockKet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KetJson {
            modes: self.register.labels.clone(),
            terms: self
                .terms
                .iter()
                .map(|(o, a)| TermJson {
                    occ: o.0.clone(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockKet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = KetJson::deserialize(d)?;
        let cutoff = raw
            .terms
            .iter()
            .flat_map(|t| t.occ.iter().copied())
            .max()
            .unwrap_or(1)
            .max(1) as usize;
        let register = ModeRegister::new(raw.modes, cutoff).map_err(serde::de::Error::custom)?;
        FockKet::from_terms(
            register,
            raw.terms.into_iter().map(|t| (Occupation(t.occ), C64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Convex mixture of normalized pure kets on a common register.
#[derive(Clone, Debug)]
pub struct WeightedEnsemble {
    register: ModeRegister,
    members: Vec<(f64, FockKet)>,
}

impl WeightedEnsemble {
    pub fn new(members: Vec<(f64, FockKet)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidEnsemble("no members".into()));
        };
        let mut cutoff = first.register.cutoff;
        for (w, ket) in &members {
            first.register.ensure_same_modes(&ket.register)?;
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidEnsemble(format!("weight {w} is not positive")));
            }
            if (ket.norm() - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::NotNormalized(ket.norm()));
            }
            cutoff = cutoff.max(ket.register.cutoff);
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self {
            register: first.register.with_cutoff(cutoff)?,
            members,
        })
    }

    pub fn pure(ket: FockKet) -> Result<Self> {
        Self::new(vec![(1.0, ket.normalize()?)])
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn members(&self) -> &[(f64, FockKet)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn fidelity(&self, target: &FockKet) -> Result<f64> {
        fidelity(self, target)
    }

    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        Self::new(
            self.members
                .iter()
                .map(|(w, k)| Ok((*w, k.permuted(order)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// `Σᵢ wᵢ |⟨target|ψᵢ⟩|²`, clamped to [0, 1] against rounding.
pub fn fidelity(ensemble: &WeightedEnsemble, target: &FockKet) -> Result<f64> {
    ensemble.register.ensure_same_modes(&target.register)?;
    let mut f = 0.0;
    for (w, ket) in &ensemble.members {
        f += w * target.inner(ket)?.norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// The four Bell states of a vacuum–one-photon qubit pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Bell state on `modes = [i, j]` of `register`, all other modes in vacuum.
///
/// `Φ± = (|0⟩ᵢ|0⟩ⱼ ± |1⟩ᵢ|1⟩ⱼ)/√2` and `Ψ± = (|0⟩ᵢ|1⟩ⱼ ± |1⟩ᵢ|0⟩ⱼ)/√2`.
pub fn bell_state(kind: BellKind, register: &ModeRegister, modes: [&str; 2]) -> Result<FockKet> {
    let idx = register.indices_of(&modes)?;
    let (i, j) = (idx[0], idx[1]);
    let (first, second, sign) = match kind {
        BellKind::PhiPlus => ((0, 0), (1, 1), 1.0),
        BellKind::PhiMinus => ((0, 0), (1, 1), -1.0),
        BellKind::PsiPlus => ((0, 1), (1, 0), 1.0),
        BellKind::PsiMinus => ((0, 1), (1, 0), -1.0),
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let occ = |(a, b): (u32, u32)| {
        let mut counts = vec![0; register.len()];
        counts[i] = a;
        counts[j] = b;
        Occupation(counts)
    };
    FockKet::from_terms(
        register.clone(),
        [(occ(first), C64::new(s, 0.0)), (occ(second), C64::new(sign * s, 0.0))],
    )
}
