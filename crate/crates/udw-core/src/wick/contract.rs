//! Enumeration of full contractions and their fermionic signs.

use super::symbol::{Algebra, FlatSymbol, OperatorSymbol, OperatorWord, Slot};
use crate::error::Result;
use crate::lattice::FieldKind;

/// A full contraction: index pairs `(i, j)` with `i < j` into the flattened word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContractionPairing {
    pub pairs: Vec<(usize, usize)>,
    pub sign: i8,
}

/// How a pair is contracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PairOrder {
    /// Plain product `⟨X Y⟩` in written order.
    Written,
    /// Time-ordered product of two different slots.
    TimeOrdered,
}

pub(crate) fn pair_order(a: &FlatSymbol, b: &FlatSymbol) -> PairOrder {
    match (a.slot, b.slot) {
        (Slot::Core { group: g1, .. }, Slot::Core { group: g2, .. }) if g1 != g2 => PairOrder::TimeOrdered,
        _ => PairOrder::Written,
    }
}

/// Whether `⟨0|X Y|0⟩` can be nonzero by type.
pub(crate) fn written_nonzero(x: &OperatorSymbol, y: &OperatorSymbol, kx: Option<FieldKind>, ky: Option<FieldKind>) -> bool {
    if x.algebra() != y.algebra() {
        return false;
    }
    let (ann, _) = x.channels(kx);
    let (_, cre) = y.channels(ky);
    match (ann, cre) {
        (Some(a), Some(c)) if a == c => {}
        _ => return false,
    }
    match (x, y) {
        (
            OperatorSymbol::Ladder { mode: m1, spin: s1, .. },
            OperatorSymbol::Ladder { mode: m2, spin: s2, .. },
        ) => m1 == m2 && s1 == s2,
        _ => true,
    }
}

fn admissible(word: &OperatorWord, flat: &[FlatSymbol], i: usize, j: usize) -> bool {
    let (a, b) = (&flat[i], &flat[j]);
    if let (Slot::Core { run: Some(r1), .. }, Slot::Core { run: Some(r2), .. }) = (a.slot, b.slot) {
        if r1 == r2 {
            return false;
        }
    }
    let (ka, kb) = (word.kind_of(&a.symbol), word.kind_of(&b.symbol));
    match pair_order(a, b) {
        PairOrder::Written => written_nonzero(&a.symbol, &b.symbol, ka, kb),
        PairOrder::TimeOrdered => {
            written_nonzero(&a.symbol, &b.symbol, ka, kb) || written_nonzero(&b.symbol, &a.symbol, kb, ka)
        }
    }
}

/// All full contractions whose factors are not identically zero.
pub fn enumerate_full_contractions(word: &OperatorWord) -> Result<Vec<ContractionPairing>> {
    word.validate()?;
    let flat = word.flatten();
    Ok(enumerate_flat(word, &flat))
}

pub(crate) fn enumerate_flat(word: &OperatorWord, flat: &[FlatSymbol]) -> Vec<ContractionPairing> {
    let n = flat.len();
    let mut out = Vec::new();
    if n % 2 == 1 {
        return out;
    }
    let adm: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| j > i && admissible(word, flat, i, j)).collect())
        .collect();
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    recurse(&adm, &mut used, &mut pairs, &mut out, flat);
    out
}

fn recurse(
    adm: &[Vec<bool>],
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    out: &mut Vec<ContractionPairing>,
    flat: &[FlatSymbol],
) {
    let Some(i) = used.iter().position(|u| !u) else {
        let sign = fermion_sign(flat, pairs);
        out.push(ContractionPairing {
            pairs: pairs.clone(),
            sign,
        });
        return;
    };
    used[i] = true;
    for j in i + 1..used.len() {
        if !used[j] && adm[i][j] {
            used[j] = true;
            pairs.push((i, j));
            recurse(adm, used, pairs, out, flat);
            pairs.pop();
            used[j] = false;
        }
    }
    used[i] = false;
}

/// Parity of the reordering that makes every contracted fermionic pair
/// adjacent, counted separately within each algebra.
pub fn fermion_sign(flat: &[FlatSymbol], pairs: &[(usize, usize)]) -> i8 {
    let ferm: Vec<(usize, usize, Algebra)> = pairs
        .iter()
        .filter(|(i, _)| flat[*i].symbol.is_fermionic())
        .map(|&(i, j)| (i.min(j), i.max(j), flat[i].symbol.algebra()))
        .collect();
    let mut crossings = 0usize;
    for (a, &(i1, j1, g1)) in ferm.iter().enumerate() {
        for &(i2, j2, g2) in &ferm[a + 1..] {
            if g1 == g2 && ((i1 < i2 && i2 < j1 && j1 < j2) || (i2 < i1 && i1 < j2 && j2 < j1)) {
                crossings += 1;
            }
        }
    }
    if crossings.is_multiple_of(2) {
        1
    } else {
        -1
    }
}
