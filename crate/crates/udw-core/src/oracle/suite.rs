//! Randomized comparison of contraction sums against the oracle.

use super::space::ModeTable;
use super::sparse::word_vev;
use crate::error::Result;
use crate::lattice::{CavityField, FieldKind, ModeIndex};
use crate::spinor::{Charge, Spin};
use crate::wick::{Evaluation, FieldModes, Group, GroupItem, OperatorSymbol, OperatorWord, Point, SpinorIndex, WickConfig};
use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const REAL: u32 = 0;
pub const COMPLEX: u32 = 1;
pub const DIRAC: u32 = 2;

/// Fields with at most four modes each and two detectors.
pub fn suite_config() -> WickConfig {
    let modes = |ls: &[i64]| ls.iter().map(|l| ModeIndex::new(&[*l]).expect("nonzero")).collect::<Vec<_>>();
    let real = CavityField::new(1, 1.0, 0.5, FieldKind::RealScalar).expect("valid field");
    let complex = CavityField::new(1, 1.3, 0.0, FieldKind::ComplexScalar).expect("valid field");
    let dirac = CavityField::new(1, 1.0, 0.7, FieldKind::Spinor).expect("valid field");
    WickConfig::new()
        .with_field(REAL, FieldModes::new(real, modes(&[1, -1, 2, -2])).expect("distinct"))
        .with_field(COMPLEX, FieldModes::new(complex, modes(&[1, -1, 2])).expect("distinct"))
        .with_field(DIRAC, FieldModes::new(dirac, modes(&[1, -1, 2, -2])).expect("distinct"))
        .with_detector(0, 1.3)
        .with_detector(1, 0.6)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Field(u32),
    Detector(u32),
}

const SOURCES: [Source; 5] = [
    Source::Field(REAL),
    Source::Field(COMPLEX),
    Source::Field(DIRAC),
    Source::Detector(0),
    Source::Detector(1),
];

fn ladder(rng: &mut ChaCha8Rng, cfg: &WickConfig, src: Source, dagger: bool) -> OperatorSymbol {
    match src {
        Source::Detector(d) => OperatorSymbol::Sigma { detector: d, raising: dagger },
        Source::Field(id) => {
            let fm = &cfg.fields[&id];
            let mode = *fm.modes.choose(rng).expect("nonempty mode list");
            let charge = if id == REAL || rng.random_bool(0.5) {
                Charge::Particle
            } else {
                Charge::Antiparticle
            };
            if id == DIRAC {
                let spin = if rng.random_bool(0.5) { Spin::Up } else { Spin::Down };
                OperatorSymbol::spinor_ladder(id, charge, mode, spin, dagger)
            } else {
                OperatorSymbol::ladder(id, charge, mode, dagger)
            }
        }
    }
}

fn timed(rng: &mut ChaCha8Rng, src: Source, t: f64) -> OperatorSymbol {
    let x = rng.random_range(-0.5..0.5);
    let p = Point::new(t, &[x]);
    match src {
        Source::Detector(d) => OperatorSymbol::monopole(d, t),
        Source::Field(DIRAC) => {
            let ix = SpinorIndex::Fixed(rng.random_range(0..4));
            if rng.random_bool(0.5) {
                OperatorSymbol::psi(DIRAC, p, ix)
            } else {
                OperatorSymbol::psibar(DIRAC, p, ix)
            }
        }
        Source::Field(id) => OperatorSymbol::scalar(id, p, id == COMPLEX && rng.random_bool(0.5)),
    }
}

/// Timed symbol that can absorb a quantum created by ladder `l` (`l` on the
/// left) or emit the quantum removed by ladder `l` (`l` on the right).
fn partner_of(rng: &mut ChaCha8Rng, l: &OperatorSymbol, t: f64) -> OperatorSymbol {
    let x = rng.random_range(-0.5..0.5);
    let p = Point::new(t, &[x]);
    let ix = SpinorIndex::Fixed(rng.random_range(0..4));
    match l {
        OperatorSymbol::Sigma { detector, .. } => OperatorSymbol::monopole(*detector, t),
        OperatorSymbol::Ladder { field, charge, dagger, .. } => {
            let particle = *charge == Charge::Particle;
            if *field == DIRAC {
                // a pairs with Ψ̄ (left) or Ψ (right); b the other way round.
                if particle != *dagger {
                    OperatorSymbol::psibar(DIRAC, p, ix)
                } else {
                    OperatorSymbol::psi(DIRAC, p, ix)
                }
            } else {
                OperatorSymbol::scalar(*field, p, *field == COMPLEX && particle != *dagger)
            }
        }
        _ => unreachable!("partners are built for ladders"),
    }
}

/// Second half of a time-ordered pair whose first half is `s`.
fn timed_partner(rng: &mut ChaCha8Rng, s: &OperatorSymbol, t: f64) -> OperatorSymbol {
    let x = rng.random_range(-0.5..0.5);
    let p = Point::new(t, &[x]);
    match s {
        OperatorSymbol::Monopole { detector, .. } => OperatorSymbol::monopole(*detector, t),
        OperatorSymbol::Scalar { field, dagger, .. } => OperatorSymbol::scalar(*field, p, *field == COMPLEX && !*dagger),
        OperatorSymbol::Spinor { conj, .. } => {
            let ix = SpinorIndex::Fixed(rng.random_range(0..4));
            if *conj {
                OperatorSymbol::psi(DIRAC, p, ix)
            } else {
                OperatorSymbol::psibar(DIRAC, p, ix)
            }
        }
        _ => unreachable!("timed symbols only"),
    }
}

/// Fully random symbols, mostly giving vanishing words.
fn unstructured_word(rng: &mut ChaCha8Rng, cfg: &WickConfig, srcs: &[Source], times: &[f64]) -> OperatorWord {
    let pick = |rng: &mut ChaCha8Rng| *srcs.choose(rng).expect("nonempty");
    let prefix: Vec<_> = (0..rng.random_range(0..=2))
        .map(|_| {
            let s = pick(rng);
            ladder(rng, cfg, s, false)
        })
        .collect();
    let suffix: Vec<_> = (0..rng.random_range(0..=2))
        .map(|_| {
            let s = pick(rng);
            ladder(rng, cfg, s, true)
        })
        .collect();
    let core = times
        .iter()
        .map(|&t| Group {
            items: (0..rng.random_range(1..=2))
                .map(|_| {
                    let s = pick(rng);
                    GroupItem::Bare(timed(rng, s, t))
                })
                .collect(),
        })
        .collect();
    OperatorWord::new(prefix, core, suffix)
}

/// Words built from contractible pairs, so that most have nonzero value:
/// ladder/ladder, ladder/field, field/ladder and field/field pairs spread
/// over up to three time slots, with some slots grouped into normal-ordered
/// runs or interaction-vertex shapes.
fn structured_word(rng: &mut ChaCha8Rng, cfg: &WickConfig, srcs: &[Source], times: &[f64], max_len: usize) -> OperatorWord {
    let pick = |rng: &mut ChaCha8Rng| *srcs.choose(rng).expect("nonempty");
    let mut prefix = Vec::new();
    let mut suffix = Vec::new();
    let mut slots: Vec<Vec<OperatorSymbol>> = vec![Vec::new(); times.len()];
    let pairs = rng.random_range(1..=max_len / 2);
    for _ in 0..pairs {
        let src = pick(rng);
        let pattern = if times.is_empty() { 0 } else { rng.random_range(0..4) };
        let g = if times.is_empty() { 0 } else { rng.random_range(0..times.len()) };
        match pattern {
            0 => {
                let a = ladder(rng, cfg, src, false);
                let mut c = a.clone();
                if let OperatorSymbol::Ladder { dagger, .. } | OperatorSymbol::Sigma { raising: dagger, .. } = &mut c {
                    *dagger = true;
                }
                prefix.push(a);
                suffix.push(c);
            }
            1 => {
                let a = ladder(rng, cfg, src, false);
                slots[g].push(partner_of(rng, &a, times[g]));
                prefix.push(a);
            }
            2 => {
                let c = ladder(rng, cfg, src, true);
                slots[g].push(partner_of(rng, &c, times[g]));
                suffix.push(c);
            }
            _ => {
                let first = timed(rng, src, times[g]);
                let h = rng.random_range(0..times.len());
                let second = timed_partner(rng, &first, times[h]);
                slots[g].push(first);
                slots[h].push(second);
            }
        }
    }
    prefix.shuffle(rng);
    suffix.shuffle(rng);
    let mut core = Vec::new();
    for syms in slots.iter_mut() {
        if syms.is_empty() {
            continue;
        }
        syms.shuffle(rng);
        let mut items = Vec::new();
        let mut rest = syms.drain(..).collect::<Vec<_>>().into_iter().peekable();
        while let Some(s) = rest.next() {
            if rest.peek().is_some() && rng.random_bool(0.35) {
                let b = rest.next().expect("peeked");
                if s.is_fermionic() && matches!(s, OperatorSymbol::Monopole { .. }) && !matches!(b, OperatorSymbol::Monopole { .. }) {
                    // μ(t) :X(t):, the vertex shape.
                    items.push(GroupItem::Bare(s));
                    items.push(GroupItem::Normal(vec![b]));
                } else {
                    items.push(GroupItem::Normal(vec![s, b]));
                }
            } else {
                items.push(GroupItem::Bare(s));
            }
        }
        core.push(Group { items });
    }
    OperatorWord::new(prefix, core, suffix)
}

/// One random word of at most `max_len` symbols.
pub fn random_word(rng: &mut ChaCha8Rng, cfg: &WickConfig, max_len: usize) -> OperatorWord {
    loop {
        let k = if rng.random_bool(0.6) { 1 } else { 2 };
        let srcs: Vec<Source> = SOURCES.choose_multiple(rng, k).copied().collect();
        let groups = rng.random_range(0..=3);
        let mut times: Vec<f64> = Vec::new();
        while times.len() < groups {
            let t: f64 = (rng.random_range(-1.0f64..1.0) * 64.0).round() / 64.0;
            if !times.contains(&t) {
                times.push(t);
            }
        }
        let w = if rng.random_bool(0.2) {
            unstructured_word(rng, cfg, &srcs, &times)
        } else {
            structured_word(rng, cfg, &srcs, &times, max_len)
        };
        let mut w = w.with_kinds(&cfg.kinds());
        if w.is_empty() || w.len() > max_len {
            continue;
        }
        label_spinor_pair(rng, &mut w);
        return w;
    }
}

/// Turns two fixed spinor indices into a shared summed label half the time.
fn label_spinor_pair(rng: &mut ChaCha8Rng, w: &mut OperatorWord) {
    if !rng.random_bool(0.5) {
        return;
    }
    let mut slots: Vec<&mut SpinorIndex> = Vec::new();
    for g in &mut w.core {
        for item in &mut g.items {
            let syms: Vec<&mut OperatorSymbol> = match item {
                GroupItem::Bare(s) => vec![s],
                GroupItem::Normal(v) => v.iter_mut().collect(),
            };
            for s in syms {
                if let OperatorSymbol::Spinor { index, .. } = s {
                    slots.push(index);
                }
            }
        }
    }
    if slots.len() >= 2 {
        *slots[0] = SpinorIndex::Label("A".into());
        *slots[1] = SpinorIndex::Label("A".into());
    }
}

/// Contraction sum, oracle value and their scaled difference for one word.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub word: String,
    pub wick: Complex64,
    pub oracle: Complex64,
    /// `|wick − oracle| / max(|wick|, |oracle|, Σ|terms|)`, zero when all vanish.
    pub rel_diff: f64,
    pub pairings: usize,
}

pub fn compare_word(word: &OperatorWord, cfg: &WickConfig, table: &ModeTable) -> Result<Comparison> {
    let ev = Evaluation::new(word, cfg)?;
    let wick = ev.total();
    let scale: f64 = ev.pairings.iter().map(|p| ev.term(p).norm()).sum();
    let oracle = word_vev(table, word, cfg)?;
    let denom = wick.norm().max(oracle.norm()).max(scale);
    let rel_diff = if denom == 0.0 { 0.0 } else { (wick - oracle).norm() / denom };
    Ok(Comparison {
        word: word.to_string(),
        wick,
        oracle,
        rel_diff,
        pairings: ev.pairings.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub comparisons: Vec<Comparison>,
    pub tol: f64,
}

impl SuiteReport {
    pub fn max_rel_diff(&self) -> f64 {
        self.comparisons.iter().map(|c| c.rel_diff).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&Comparison> {
        self.comparisons.iter().filter(|c| !(c.rel_diff < self.tol)).collect()
    }

    pub fn nonzero(&self) -> usize {
        self.comparisons.iter().filter(|c| c.oracle.norm() > 0.0).count()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// `count` random words of at most eight symbols, compared in parallel.
/// The result order and values depend only on `seed`.
pub fn run_word_suite(count: usize, seed: u64, tol: f64) -> Result<SuiteReport> {
    let cfg = suite_config();
    let table = ModeTable::from_config(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<OperatorWord> = (0..count).map(|_| random_word(&mut rng, &cfg, 8)).collect();
    let comparisons = words
        .par_iter()
        .map(|w| compare_word(w, &cfg, &table))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { comparisons, tol })
}
