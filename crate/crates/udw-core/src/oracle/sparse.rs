//! Sparse Fock vectors and exact vacuum expectation values of operator words.

use super::space::{apply_ladder, Ladder, ModeTable, OperatorSum};
use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::lattice::{scalar_mode_full, FieldKind};
use crate::spinor::{spinor_mode, Charge, Spin, SpinLabel};
use crate::wick::{Algebra, Event, GroupItem, OperatorSymbol, OperatorWord, SpinorIndex, WickConfig};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A state as a map from occupation vectors to amplitudes. No occupancy cap.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    pub amps: BTreeMap<Vec<u8>, Complex64>,
}

impl FockVector {
    pub fn vacuum(modes: usize) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(vec![0; modes], Complex64::new(1.0, 0.0));
        Self { amps }
    }

    pub fn basis(occ: Vec<u8>) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(occ, Complex64::new(1.0, 0.0));
        Self { amps }
    }

    pub fn amplitude(&self, occ: &[u8]) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn dot(&self, other: &FockVector) -> Complex64 {
        self.amps
            .iter()
            .filter_map(|(k, a)| other.amps.get(k).map(|b| a.conj() * b))
            .sum()
    }

    /// `op |self⟩`. States holding more quanta than `budget` are dropped; pass
    /// `usize::MAX` to keep everything.
    pub fn apply(&self, table: &ModeTable, op: &OperatorSum, budget: usize) -> FockVector {
        let mut out = FockVector::default();
        for (occ0, a0) in &self.amps {
            'term: for (c, ops) in &op.terms {
                let mut occ = occ0.clone();
                let mut amp = a0 * c;
                for l in ops.iter().rev() {
                    match apply_ladder(table, &mut occ, *l, None) {
                        Some(f) => amp *= f,
                        None => continue 'term,
                    }
                }
                if occ.iter().map(|n| *n as usize).sum::<usize>() <= budget {
                    *out.amps.entry(occ).or_default() += amp;
                }
            }
        }
        out
    }
}

/// `⟨0|op|0⟩`
pub fn vacuum_expectation(table: &ModeTable, op: &OperatorSum) -> Complex64 {
    let v = FockVector::vacuum(table.len());
    v.apply(table, op, usize::MAX).amplitude(&vec![0; table.len()])
}

/// A spinor component as a column (`Ψ^A`) or conjugate row (`Ψ̄_A`) entry.
fn spinor_component(ev: &Event, fm: &crate::wick::FieldModes, k: &crate::lattice::ModeIndex, label: SpinLabel, conj: bool, a: usize) -> Complex64 {
    let kv = fm.field.momentum(k);
    let psi = spinor_mode(ev.t, &ev.x, &kv, label, &fm.field);
    if conj {
        GammaSet::dirac().bar(&psi)[a]
    } else {
        psi[a]
    }
}

/// Mode expansion of one symbol with spinor component `a` fixed.
pub fn expand_symbol(sym: &OperatorSymbol, a: usize, table: &ModeTable, cfg: &WickConfig) -> Result<OperatorSum> {
    let mut out = OperatorSum::new();
    let one = Complex64::new(1.0, 0.0);
    let field_of = |id: u32| {
        cfg.fields
            .get(&id)
            .ok_or_else(|| Error::OutsideSpace(format!("field {id} is not configured")))
    };
    match sym {
        OperatorSymbol::Ladder {
            field,
            charge,
            mode,
            spin,
            dagger,
            ..
        } => {
            out.push(one, vec![Ladder::new(table.field_mode(*field, *charge, *mode, *spin)?, *dagger)]);
        }
        OperatorSymbol::Sigma { detector, raising } => {
            out.push(one, vec![Ladder::new(table.detector(*detector)?, *raising)]);
        }
        OperatorSymbol::Monopole { detector, time, .. } => {
            let gap = *cfg
                .detectors
                .get(detector)
                .ok_or_else(|| Error::OutsideSpace(format!("detector {detector} is not configured")))?;
            let id = table.detector(*detector)?;
            out.push(Complex64::from_polar(1.0, -gap * time), vec![Ladder::new(id, false)]);
            out.push(Complex64::from_polar(1.0, gap * time), vec![Ladder::new(id, true)]);
        }
        OperatorSymbol::Scalar { field, point, dagger } => {
            let fm = field_of(*field)?;
            let ev = point.event(&fm.field)?;
            let real = fm.field.kind() == FieldKind::RealScalar;
            for k in &fm.modes {
                let phi = scalar_mode_full(ev.t, &ev.x, &fm.field.momentum(k), &fm.field);
                let a_id = table.field_mode(*field, Charge::Particle, *k, None)?;
                let b_id = if real {
                    a_id
                } else {
                    table.field_mode(*field, Charge::Antiparticle, *k, None)?
                };
                if *dagger && !real {
                    out.push(phi.conj(), vec![Ladder::new(a_id, true)]);
                    out.push(phi, vec![Ladder::new(b_id, false)]);
                } else {
                    out.push(phi, vec![Ladder::new(a_id, false)]);
                    out.push(phi.conj(), vec![Ladder::new(b_id, true)]);
                }
            }
        }
        OperatorSymbol::Spinor { field, point, conj, .. } => {
            let fm = field_of(*field)?;
            let ev = point.event(&fm.field)?;
            for k in &fm.modes {
                for spin in Spin::ALL {
                    let part = SpinLabel { spin, charge: Charge::Particle };
                    let anti = SpinLabel { spin, charge: Charge::Antiparticle };
                    let a_id = table.field_mode(*field, Charge::Particle, *k, Some(spin))?;
                    let b_id = table.field_mode(*field, Charge::Antiparticle, *k, Some(spin))?;
                    // Ψ = Σ ψ₊ a + ψ₋ b†,  Ψ̄ = Σ ψ̄₊ a† + ψ̄₋ b
                    out.push(spinor_component(&ev, fm, k, part, *conj, a), vec![Ladder::new(a_id, *conj)]);
                    out.push(spinor_component(&ev, fm, k, anti, *conj, a), vec![Ladder::new(b_id, !*conj)]);
                }
            }
        }
    }
    Ok(out)
}

/// Count of fermionic symbols per algebra.
fn fermion_counts<'a>(syms: impl Iterator<Item = &'a OperatorSymbol>) -> BTreeMap<Algebra, usize> {
    let mut m = BTreeMap::new();
    for s in syms {
        if s.is_fermionic() {
            *m.entry(s.algebra()).or_insert(0) += 1;
        }
    }
    m
}

fn exchange_sign(a: &BTreeMap<Algebra, usize>, b: &BTreeMap<Algebra, usize>) -> f64 {
    let odd: usize = a.iter().map(|(alg, n)| n * b.get(alg).copied().unwrap_or(0)).sum();
    if odd % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `:X₁…X_r:` as a sum of reordered ladder products: every creation part
/// to the left of every annihilation part, with the exchange sign of
/// fermionic parts of the same algebra.
fn normal_ordered(parts: &[(OperatorSum, OperatorSum, Algebra, bool)]) -> OperatorSum {
    let r = parts.len();
    let mut out = OperatorSum::new();
    for choice in 0..(1usize << r) {
        // bit set: creation part of symbol i
        let mut sign = 1.0;
        for i in 0..r {
            if choice >> i & 1 == 0 {
                continue;
            }
            for j in 0..i {
                let (ai, fi) = (parts[i].2, parts[i].3);
                let (aj, fj) = (parts[j].2, parts[j].3);
                if choice >> j & 1 == 0 && fi && fj && ai == aj {
                    sign = -sign;
                }
            }
        }
        let mut prod = OperatorSum {
            terms: vec![(Complex64::new(sign, 0.0), Vec::new())],
        };
        for (i, p) in parts.iter().enumerate() {
            if choice >> i & 1 == 1 {
                prod = prod.times(&p.1);
            }
        }
        for (i, p) in parts.iter().enumerate() {
            if choice >> i & 1 == 0 {
                prod = prod.times(&p.0);
            }
        }
        out.terms.extend(prod.terms);
    }
    out
}

fn split(op: &OperatorSum) -> (OperatorSum, OperatorSum) {
    let mut ann = OperatorSum::new();
    let mut cre = OperatorSum::new();
    for (c, ops) in &op.terms {
        if ops.iter().all(|l| l.dagger) {
            cre.push(*c, ops.clone());
        } else {
            ann.push(*c, ops.clone());
        }
    }
    (ann, cre)
}

/// Word as a list of operator factors, leftmost first, with the overall
/// sign of the time ordering.
fn resolve(word: &OperatorWord, table: &ModeTable, cfg: &WickConfig, index_of: &dyn Fn(&SpinorIndex) -> usize) -> Result<(f64, Vec<OperatorSum>)> {
    let comp = |s: &OperatorSymbol| match s {
        OperatorSymbol::Spinor { index, .. } => index_of(index),
        _ => 0,
    };
    let mut factors = Vec::new();
    for s in &word.prefix {
        factors.push(expand_symbol(s, comp(s), table, cfg)?);
    }
    let times: Vec<f64> = word
        .core
        .iter()
        .map(|g| g.time().ok_or_else(|| Error::MalformedWord("untimed slot".into())))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..word.core.len()).collect();
    order.sort_by(|&a, &b| times[b].total_cmp(&times[a]));
    for w in order.windows(2) {
        if times[w[0]] == times[w[1]] {
            return Err(Error::CoincidentTimes(times[w[0]]));
        }
    }
    let counts: Vec<_> = word.core.iter().map(|g| fermion_counts(g.symbols())).collect();
    let mut sign = 1.0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                sign *= exchange_sign(&counts[order[i]], &counts[order[j]]);
            }
        }
    }
    for &g in &order {
        for item in &word.core[g].items {
            match item {
                GroupItem::Bare(s) => factors.push(expand_symbol(s, comp(s), table, cfg)?),
                GroupItem::Normal(run) => {
                    let parts = run
                        .iter()
                        .map(|s| {
                            let (ann, cre) = split(&expand_symbol(s, comp(s), table, cfg)?);
                            Ok((ann, cre, s.algebra(), s.is_fermionic()))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    factors.push(normal_ordered(&parts));
                }
            }
        }
    }
    for s in &word.suffix {
        factors.push(expand_symbol(s, comp(s), table, cfg)?);
    }
    Ok((sign, factors))
}

/// Ladder quanta a factor can remove from a state, at most.
fn removal_capacity(op: &OperatorSum) -> usize {
    op.terms
        .iter()
        .map(|(_, ops)| ops.iter().filter(|l| !l.dagger).count())
        .max()
        .unwrap_or(0)
}

/// Exact `⟨0|word|0⟩` by explicit reordering and application of ladder
/// operators on sparse occupation vectors. Labelled spinor indices are summed.
pub fn word_vev(table: &ModeTable, word: &OperatorWord, cfg: &WickConfig) -> Result<Complex64> {
    let mut word = word.clone();
    for (id, fm) in &cfg.fields {
        word.kinds.entry(*id).or_insert(fm.field.kind());
    }
    word.validate()?;
    let flat = word.flatten();
    let mut labels: Vec<String> = Vec::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for f in &flat {
        if let OperatorSymbol::Spinor {
            index: SpinorIndex::Label(l),
            ..
        } = &f.symbol
        {
            *counts.entry(l.clone()).or_default() += 1;
        }
    }
    if let Some((l, _)) = counts.iter().find(|(_, c)| **c != 2) {
        return Err(Error::OpenSpinorIndex(l.clone()));
    }
    labels.extend(counts.into_keys());
    let vac = vec![0u8; table.len()];
    let mut total = crate::numeric::CNeumaier::new();
    for assignment in 0..(1usize << (2 * labels.len())) {
        let index_of = |ix: &SpinorIndex| match ix {
            SpinorIndex::Fixed(v) => *v as usize,
            SpinorIndex::Label(l) => {
                let pos = labels.iter().position(|x| x == l).expect("collected label");
                (assignment >> (2 * pos)) & 3
            }
        };
        let (sign, factors) = resolve(&word, table, cfg, &index_of)?;
        // Quanta still removable by the factors to the left of each position.
        let mut budget = vec![0usize; factors.len() + 1];
        for i in 0..factors.len() {
            budget[i + 1] = budget[i] + removal_capacity(&factors[i]);
        }
        let mut state = FockVector::vacuum(table.len());
        for i in (0..factors.len()).rev() {
            state = state.apply(table, &factors[i], budget[i]);
            if state.amps.is_empty() {
                break;
            }
        }
        total.add(state.amplitude(&vac) * sign);
    }
    Ok(total.value())
}

/// `op` applied to `|state⟩`, projected back by `⟨bra|`.
pub fn matrix_element(table: &ModeTable, bra: &FockVector, op: &OperatorSum, ket: &FockVector) -> Complex64 {
    bra.dot(&ket.apply(table, op, usize::MAX))
}
