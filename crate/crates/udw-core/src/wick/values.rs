//! Numeric values of contractions, time-domain propagators and vacuum expectation values.

use super::contract::{enumerate_flat, pair_order, written_nonzero, ContractionPairing, PairOrder};
use super::symbol::{Algebra, Event, FlatSymbol, OperatorSymbol, OperatorWord, SpinorIndex};
use crate::error::{Error, Result};
use crate::gamma::{GammaSet, Mat4};
use crate::lattice::{scalar_mode_full, sup_ball, CavityField, FieldKind, ModeIndex};
use crate::numeric::CNeumaier;
use crate::spinor::{spinor_mode, Charge, Spin, SpinLabel};
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};

/// A field together with the explicit list of modes its expansion runs over.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldModes {
    pub field: CavityField,
    pub modes: Vec<ModeIndex>,
}

impl FieldModes {
    pub fn new(field: CavityField, modes: Vec<ModeIndex>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for m in &modes {
            if m.dim() != field.n() {
                return Err(Error::OutsideSpace(format!("mode ({m}) in a {}-dimensional cavity", field.n())));
            }
            if !seen.insert(*m) {
                return Err(Error::OutsideSpace(format!("mode ({m}) listed twice")));
            }
        }
        Ok(Self { field, modes })
    }

    /// All modes with `|l|_∞ ≤ cutoff`.
    pub fn ball(field: CavityField, cutoff: i64) -> Self {
        Self {
            modes: sup_ball(field.n(), cutoff),
            field,
        }
    }

    pub fn contains(&self, m: &ModeIndex) -> bool {
        self.modes.contains(m)
    }
}

/// Numeric context for evaluating words: fields by id and detector gaps by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WickConfig {
    pub fields: BTreeMap<u32, FieldModes>,
    pub detectors: BTreeMap<u32, f64>,
}

impl WickConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_field(mut self, id: u32, modes: FieldModes) -> Self {
        self.fields.insert(id, modes);
        self
    }

    pub fn with_detector(mut self, id: u32, gap: f64) -> Self {
        self.detectors.insert(id, gap);
        self
    }

    pub fn kinds(&self) -> BTreeMap<u32, FieldKind> {
        self.fields.iter().map(|(k, v)| (*k, v.field.kind())).collect()
    }

    fn field(&self, id: u32) -> Result<&FieldModes> {
        self.fields
            .get(&id)
            .ok_or_else(|| Error::OutsideSpace(format!("field {id} is not configured")))
    }

    fn gap(&self, id: u32) -> Result<f64> {
        self.detectors
            .get(&id)
            .copied()
            .ok_or_else(|| Error::OutsideSpace(format!("detector {id} is not configured")))
    }
}

/// A contraction value. Spinor-valued entries are indexed by the spinor index
/// of the first and/or second symbol of the pair.
#[derive(Debug, Clone, PartialEq)]
pub enum ContractionValue {
    Number(Complex64),
    /// Indexed by the first symbol.
    First([Complex64; 4]),
    /// Indexed by the second symbol.
    Second([Complex64; 4]),
    /// `[first][second]`
    Matrix(Mat4),
}

impl ContractionValue {
    pub fn zero() -> Self {
        ContractionValue::Number(Complex64::new(0.0, 0.0))
    }

    pub fn at(&self, a: usize, b: usize) -> Complex64 {
        match self {
            ContractionValue::Number(z) => *z,
            ContractionValue::First(v) => v[a],
            ContractionValue::Second(v) => v[b],
            ContractionValue::Matrix(m) => m[(a, b)],
        }
    }

    fn swapped(self) -> Self {
        match self {
            ContractionValue::First(v) => ContractionValue::Second(v),
            ContractionValue::Second(v) => ContractionValue::First(v),
            ContractionValue::Matrix(m) => ContractionValue::Matrix(m.transpose()),
            n => n,
        }
    }

    fn scaled(self, s: f64) -> Self {
        let c = Complex64::from(s);
        match self {
            ContractionValue::Number(z) => ContractionValue::Number(z * c),
            ContractionValue::First(v) => ContractionValue::First(v.map(|z| z * c)),
            ContractionValue::Second(v) => ContractionValue::Second(v.map(|z| z * c)),
            ContractionValue::Matrix(m) => ContractionValue::Matrix(m * c),
        }
    }

    pub fn max_abs(&self) -> f64 {
        (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| self.at(a, b).norm())
            .fold(0.0, f64::max)
    }
}

/// Mode-sum value with a truncation indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator<T> {
    pub value: T,
    /// Size of the contribution of the outermost shell of the mode list.
    pub tail: f64,
    /// Both arguments coincide; the untruncated sum diverges there.
    pub coincident: bool,
    /// Equal times, where the Θ split is ambiguous. The `x⁰ ≥ y⁰` branch is used.
    pub equal_time: bool,
}

fn spinor_column(ev: &Event, k: &ModeIndex, label: SpinLabel, field: &CavityField) -> [Complex64; 4] {
    let kv = field.momentum(k);
    let psi = spinor_mode(ev.t, &ev.x, &kv, label, field);
    [psi[0], psi[1], psi[2], psi[3]]
}

fn spinor_row(ev: &Event, k: &ModeIndex, label: SpinLabel, field: &CavityField) -> [Complex64; 4] {
    let kv = field.momentum(k);
    let psi = spinor_mode(ev.t, &ev.x, &kv, label, field);
    let row = GammaSet::dirac().bar(&psi);
    [row[0], row[1], row[2], row[3]]
}

/// `Σ_k φ̃_k(x) φ̃*_k(y)` over the listed modes, i.e. `⟨0|Φ(x)Φ†(y)|0⟩`.
pub fn scalar_wightman(x: &Event, y: &Event, fm: &FieldModes) -> Complex64 {
    fm.modes
        .iter()
        .map(|k| {
            let kv = fm.field.momentum(k);
            scalar_mode_full(x.t, &x.x, &kv, &fm.field) * scalar_mode_full(y.t, &y.x, &kv, &fm.field).conj()
        })
        .collect::<CNeumaier>()
        .value()
}

/// `Σ_{k,s} ψ_{k,s,ε}(x) ψ̄_{k,s,ε}(y)` as a matrix `[A][B]`.
pub fn spinor_spin_sum(x: &Event, y: &Event, charge: Charge, fm: &FieldModes) -> Mat4 {
    let mut acc = [[CNeumaier::new(); 4]; 4];
    for k in &fm.modes {
        for spin in Spin::ALL {
            let label = SpinLabel { spin, charge };
            let col = spinor_column(x, k, label, &fm.field);
            let row = spinor_row(y, k, label, &fm.field);
            for a in 0..4 {
                for b in 0..4 {
                    acc[a][b].add(col[a] * row[b]);
                }
            }
        }
    }
    Mat4::from_fn(|a, b| acc[a][b].value())
}

fn outer_shell(fm: &FieldModes) -> FieldModes {
    let top = fm.modes.iter().map(|m| m.sup_norm()).max().unwrap_or(0);
    FieldModes {
        field: fm.field,
        modes: fm.modes.iter().copied().filter(|m| m.sup_norm() == top).collect(),
    }
}

fn same_point(x: &Event, y: &Event) -> bool {
    x.t == y.t && x.x == y.x
}

/// `G_F(x−y) = ⟨0|TΦ(x)Φ†(y)|0⟩` as a Θ-split mode sum over `modes`.
pub fn scalar_propagator_timedomain(x: &Event, y: &Event, field: &CavityField, modes: &[ModeIndex]) -> Propagator<Complex64> {
    let fm = FieldModes {
        field: *field,
        modes: modes.to_vec(),
    };
    let (a, b) = if x.t >= y.t { (x, y) } else { (y, x) };
    Propagator {
        value: scalar_wightman(a, b, &fm),
        tail: scalar_wightman(a, b, &outer_shell(&fm)).norm(),
        coincident: same_point(x, y),
        equal_time: x.t == y.t,
    }
}

/// `S_F(x−y) = ⟨0|TΨ(x)Ψ̄(y)|0⟩`: the particle spin sum for `x⁰ ≥ y⁰`,
/// minus the antiparticle spin sum otherwise.
pub fn spinor_propagator_timedomain(x: &Event, y: &Event, field: &CavityField, modes: &[ModeIndex]) -> Propagator<Mat4> {
    let fm = FieldModes {
        field: *field,
        modes: modes.to_vec(),
    };
    let shell = outer_shell(&fm);
    let (value, tail) = if x.t >= y.t {
        (
            spinor_spin_sum(x, y, Charge::Particle, &fm),
            spinor_spin_sum(x, y, Charge::Particle, &shell),
        )
    } else {
        (
            -spinor_spin_sum(x, y, Charge::Antiparticle, &fm),
            -spinor_spin_sum(x, y, Charge::Antiparticle, &shell),
        )
    };
    Propagator {
        value,
        tail: crate::gamma::max_abs(&tail),
        coincident: same_point(x, y),
        equal_time: x.t == y.t,
    }
}

fn event_of(sym: &OperatorSymbol, cfg: &WickConfig) -> Result<Event> {
    match sym {
        OperatorSymbol::Scalar { field, point, .. } | OperatorSymbol::Spinor { field, point, .. } => {
            point.event(&cfg.field(*field)?.field)
        }
        _ => unreachable!("only field symbols carry points"),
    }
}

/// `⟨0|X Y|0⟩` for single symbols.
pub(crate) fn written_value(x: &OperatorSymbol, y: &OperatorSymbol, word: &OperatorWord, cfg: &WickConfig) -> Result<ContractionValue> {
    use OperatorSymbol as S;
    let (kx, ky) = (word.kind_of(x), word.kind_of(y));
    if !written_nonzero(x, y, kx, ky) {
        return Ok(ContractionValue::zero());
    }
    let one = Complex64::new(1.0, 0.0);
    let v = match (x, y) {
        (S::Ladder { .. }, S::Ladder { .. }) | (S::Sigma { .. }, S::Sigma { .. }) => ContractionValue::Number(one),
        (S::Sigma { detector, .. }, S::Monopole { time, .. }) => {
            ContractionValue::Number(Complex64::from_polar(1.0, cfg.gap(*detector)? * time))
        }
        (S::Monopole { detector, time, .. }, S::Sigma { .. }) => {
            ContractionValue::Number(Complex64::from_polar(1.0, -cfg.gap(*detector)? * time))
        }
        (S::Monopole { detector, time: t1, .. }, S::Monopole { time: t2, .. }) => {
            ContractionValue::Number(Complex64::from_polar(1.0, -cfg.gap(*detector)? * (t1 - t2)))
        }
        (S::Ladder { field, mode, .. }, S::Scalar { .. }) => {
            let fm = cfg.field(*field)?;
            let ev = event_of(y, cfg)?;
            ContractionValue::Number(scalar_mode_full(ev.t, &ev.x, &fm.field.momentum(mode), &fm.field).conj())
        }
        (S::Scalar { field, .. }, S::Ladder { mode, .. }) => {
            let fm = cfg.field(*field)?;
            let ev = event_of(x, cfg)?;
            ContractionValue::Number(scalar_mode_full(ev.t, &ev.x, &fm.field.momentum(mode), &fm.field))
        }
        (S::Ladder { field, charge, mode, spin, .. }, S::Spinor { conj, .. }) => {
            let fm = cfg.field(*field)?;
            let ev = event_of(y, cfg)?;
            let label = SpinLabel {
                spin: spin.expect("validated spinor ladder"),
                charge: *charge,
            };
            // a with Ψ̄ gives ψ̄_{+}; b with Ψ gives ψ_{−}.
            let v = if *conj {
                spinor_row(&ev, mode, label, &fm.field)
            } else {
                spinor_column(&ev, mode, label, &fm.field)
            };
            ContractionValue::Second(v)
        }
        (S::Spinor { conj, .. }, S::Ladder { field, charge, mode, spin, .. }) => {
            let fm = cfg.field(*field)?;
            let ev = event_of(x, cfg)?;
            let label = SpinLabel {
                spin: spin.expect("validated spinor ladder"),
                charge: *charge,
            };
            let v = if *conj {
                spinor_row(&ev, mode, label, &fm.field)
            } else {
                spinor_column(&ev, mode, label, &fm.field)
            };
            ContractionValue::First(v)
        }
        (S::Scalar { field, .. }, S::Scalar { .. }) => {
            let fm = cfg.field(*field)?;
            ContractionValue::Number(scalar_wightman(&event_of(x, cfg)?, &event_of(y, cfg)?, fm))
        }
        (S::Spinor { field, conj: false, .. }, S::Spinor { conj: true, .. }) => {
            let fm = cfg.field(*field)?;
            ContractionValue::Matrix(spinor_spin_sum(&event_of(x, cfg)?, &event_of(y, cfg)?, Charge::Particle, fm))
        }
        (S::Spinor { field, conj: true, .. }, S::Spinor { conj: false, .. }) => {
            let fm = cfg.field(*field)?;
            let m = spinor_spin_sum(&event_of(y, cfg)?, &event_of(x, cfg)?, Charge::Antiparticle, fm);
            ContractionValue::Matrix(m.transpose())
        }
        _ => ContractionValue::zero(),
    };
    Ok(v)
}

/// Value of the contraction of flattened symbols `i < j`, with time ordering
/// applied when they sit in different slots of the core.
pub fn contraction_value(word: &OperatorWord, flat: &[FlatSymbol], i: usize, j: usize, cfg: &WickConfig) -> Result<ContractionValue> {
    let (a, b) = (&flat[i], &flat[j]);
    match pair_order(a, b) {
        PairOrder::Written => written_value(&a.symbol, &b.symbol, word, cfg),
        PairOrder::TimeOrdered => {
            let ta = a.symbol.time().expect("core symbols are timed");
            let tb = b.symbol.time().expect("core symbols are timed");
            if ta > tb {
                written_value(&a.symbol, &b.symbol, word, cfg)
            } else if ta < tb {
                let sign = if a.symbol.is_fermionic() && b.symbol.is_fermionic() { -1.0 } else { 1.0 };
                Ok(written_value(&b.symbol, &a.symbol, word, cfg)?.swapped().scaled(sign))
            } else {
                Err(Error::CoincidentTimes(ta))
            }
        }
    }
}

/// A checked word with its contractions and cached pair values.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub word: OperatorWord,
    pub flat: Vec<FlatSymbol>,
    pub pairings: Vec<ContractionPairing>,
    labels: Vec<String>,
    values: HashMap<(usize, usize), ContractionValue>,
}

impl Evaluation {
    pub fn new(word: &OperatorWord, cfg: &WickConfig) -> Result<Self> {
        let mut word = word.clone();
        for (id, fm) in &cfg.fields {
            match word.kinds.get(id) {
                Some(k) if *k != fm.field.kind() => {
                    return Err(Error::MalformedWord(format!(
                        "field {id} declared {} but configured {}",
                        k.name(),
                        fm.field.kind().name()
                    )))
                }
                _ => {
                    word.kinds.insert(*id, fm.field.kind());
                }
            }
        }
        word.validate()?;
        let flat = word.flatten();
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for f in &flat {
            match (&f.symbol, f.symbol.algebra()) {
                (OperatorSymbol::Ladder { mode, .. }, Algebra::Field(id)) => {
                    if !cfg.field(id)?.contains(mode) {
                        return Err(Error::OutsideSpace(format!("mode ({mode}) of field {id}")));
                    }
                }
                (_, Algebra::Field(id)) => {
                    cfg.field(id)?;
                }
                (_, Algebra::Detector(id)) => {
                    cfg.gap(id)?;
                }
            }
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
        let pairings = enumerate_flat(&word, &flat);
        let mut values = HashMap::new();
        for p in &pairings {
            for &(i, j) in &p.pairs {
                if let std::collections::hash_map::Entry::Vacant(e) = values.entry((i, j)) {
                    e.insert(contraction_value(&word, &flat, i, j, cfg)?);
                }
            }
        }
        Ok(Self {
            word,
            flat,
            pairings,
            labels: counts.into_keys().collect(),
            values,
        })
    }

    fn index_of(&self, i: usize, assignment: usize) -> usize {
        match &self.flat[i].symbol {
            OperatorSymbol::Spinor { index, .. } => match index {
                SpinorIndex::Fixed(v) => *v as usize,
                SpinorIndex::Label(l) => {
                    let pos = self.labels.iter().position(|x| x == l).expect("label collected");
                    (assignment >> (2 * pos)) & 3
                }
            },
            _ => 0,
        }
    }

    pub fn value(&self, i: usize, j: usize) -> &ContractionValue {
        &self.values[&(i, j)]
    }

    /// `sign × Π values` summed over the labelled spinor indices.
    pub fn term(&self, pairing: &ContractionPairing) -> Complex64 {
        let mut acc = CNeumaier::new();
        for assignment in 0..(1usize << (2 * self.labels.len())) {
            let mut prod = Complex64::new(pairing.sign as f64, 0.0);
            for &(i, j) in &pairing.pairs {
                prod *= self.values[&(i, j)].at(self.index_of(i, assignment), self.index_of(j, assignment));
            }
            acc.add(prod);
        }
        acc.value()
    }

    pub fn total(&self) -> Complex64 {
        self.pairings.iter().map(|p| self.term(p)).collect::<CNeumaier>().value()
    }
}

/// `Σ_pairings sign × Π contraction values`; exactly zero without pairings.
pub fn evaluate_vev(word: &OperatorWord, cfg: &WickConfig) -> Result<Complex64> {
    Ok(Evaluation::new(word, cfg)?.total())
}
