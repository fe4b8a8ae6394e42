//! Operator symbols and words.

use crate::error::{Error, Result};
use crate::lattice::{CavityField, FieldKind, ModeIndex, Vec3};
use crate::spinor::{Charge, Spin};
use std::collections::BTreeMap;

/// A spacetime argument. `x` holds up to `n` coordinates; missing ones are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub label: Option<String>,
    pub t: f64,
    pub x: Vec<f64>,
}

impl Point {
    pub fn new(t: f64, x: &[f64]) -> Self {
        Self { label: None, t, x: x.to_vec() }
    }

    pub fn labeled(label: &str, t: f64, x: &[f64]) -> Self {
        Self {
            label: Some(label.to_string()),
            t,
            x: x.to_vec(),
        }
    }

    /// Label if present, otherwise the coordinates.
    pub fn name(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => {
                let xs: Vec<String> = self.x.iter().map(|v| v.to_string()).collect();
                if xs.is_empty() {
                    format!("{}", self.t)
                } else {
                    format!("{};{}", self.t, xs.join(","))
                }
            }
        }
    }

    pub fn event(&self, field: &CavityField) -> Result<Event> {
        if self.x.len() > field.n() {
            return Err(Error::MalformedWord(format!(
                "point `{}` has {} coordinates in a {}-dimensional cavity",
                self.name(),
                self.x.len(),
                field.n()
            )));
        }
        let mut c = [0.0; 3];
        c[..self.x.len()].copy_from_slice(&self.x);
        Ok(Event { t: self.t, x: field.embed(&c) })
    }
}

/// A resolved spacetime point in the storage layout of [`crate::lattice`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: Vec3,
}

impl Event {
    pub fn new(t: f64, x: Vec3) -> Self {
        Self { t, x }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinorIndex {
    Fixed(u8),
    Label(String),
}

impl std::fmt::Display for SpinorIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpinorIndex::Fixed(i) => write!(f, "{i}"),
            SpinorIndex::Label(s) => write!(f, "{s}"),
        }
    }
}

/// Independent operator algebras. Symbols of different algebras commute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algebra {
    Field(u32),
    Detector(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSymbol {
    /// `a` (particle) or `b` (antiparticle) ladder operator. `spin` only for spinor fields.
    Ladder {
        field: u32,
        charge: Charge,
        mode: ModeIndex,
        spin: Option<Spin>,
        dagger: bool,
        label: Option<String>,
    },
    /// `σ⁺` when `raising`, else `σ⁻`.
    Sigma { detector: u32, raising: bool },
    Scalar { field: u32, point: Point, dagger: bool },
    /// `Ψ^A` or, with `conj`, `Ψ̄_A`.
    Spinor {
        field: u32,
        point: Point,
        conj: bool,
        index: SpinorIndex,
    },
    Monopole { detector: u32, time: f64, label: Option<String> },
}

impl OperatorSymbol {
    pub fn ladder(field: u32, charge: Charge, mode: ModeIndex, dagger: bool) -> Self {
        OperatorSymbol::Ladder {
            field,
            charge,
            mode,
            spin: None,
            dagger,
            label: None,
        }
    }

    pub fn spinor_ladder(field: u32, charge: Charge, mode: ModeIndex, spin: Spin, dagger: bool) -> Self {
        OperatorSymbol::Ladder {
            field,
            charge,
            mode,
            spin: Some(spin),
            dagger,
            label: None,
        }
    }

    /// Attaches a display label to a ladder or monopole symbol.
    pub fn named(mut self, name: &str) -> Self {
        match &mut self {
            OperatorSymbol::Ladder { label, .. } | OperatorSymbol::Monopole { label, .. } => {
                *label = Some(name.to_string())
            }
            OperatorSymbol::Scalar { point, .. } | OperatorSymbol::Spinor { point, .. } => {
                point.label = Some(name.to_string())
            }
            OperatorSymbol::Sigma { .. } => {}
        }
        self
    }

    pub fn scalar(field: u32, point: Point, dagger: bool) -> Self {
        OperatorSymbol::Scalar { field, point, dagger }
    }

    pub fn psi(field: u32, point: Point, index: SpinorIndex) -> Self {
        OperatorSymbol::Spinor {
            field,
            point,
            conj: false,
            index,
        }
    }

    pub fn psibar(field: u32, point: Point, index: SpinorIndex) -> Self {
        OperatorSymbol::Spinor {
            field,
            point,
            conj: true,
            index,
        }
    }

    pub fn monopole(detector: u32, time: f64) -> Self {
        OperatorSymbol::Monopole { detector, time, label: None }
    }

    pub fn algebra(&self) -> Algebra {
        match self {
            OperatorSymbol::Ladder { field, .. }
            | OperatorSymbol::Scalar { field, .. }
            | OperatorSymbol::Spinor { field, .. } => Algebra::Field(*field),
            OperatorSymbol::Sigma { detector, .. } | OperatorSymbol::Monopole { detector, .. } => {
                Algebra::Detector(*detector)
            }
        }
    }

    pub fn is_fermionic(&self) -> bool {
        match self {
            OperatorSymbol::Ladder { spin, .. } => spin.is_some(),
            OperatorSymbol::Scalar { .. } => false,
            _ => true,
        }
    }

    pub fn time(&self) -> Option<f64> {
        match self {
            OperatorSymbol::Scalar { point, .. } | OperatorSymbol::Spinor { point, .. } => Some(point.t),
            OperatorSymbol::Monopole { time, .. } => Some(*time),
            _ => None,
        }
    }

    pub fn is_annihilator(&self) -> bool {
        matches!(
            self,
            OperatorSymbol::Ladder { dagger: false, .. } | OperatorSymbol::Sigma { raising: false, .. }
        )
    }

    pub fn is_creator(&self) -> bool {
        matches!(
            self,
            OperatorSymbol::Ladder { dagger: true, .. } | OperatorSymbol::Sigma { raising: true, .. }
        )
    }

    /// Species removed and species added by the symbol: `(annihilated, created)`.
    pub(crate) fn channels(&self, kind: Option<FieldKind>) -> (Option<Charge>, Option<Charge>) {
        use Charge::*;
        match self {
            OperatorSymbol::Ladder { charge, dagger, .. } => {
                if *dagger {
                    (None, Some(*charge))
                } else {
                    (Some(*charge), None)
                }
            }
            OperatorSymbol::Sigma { raising, .. } => {
                if *raising {
                    (None, Some(Particle))
                } else {
                    (Some(Particle), None)
                }
            }
            OperatorSymbol::Monopole { .. } => (Some(Particle), Some(Particle)),
            OperatorSymbol::Scalar { dagger, .. } => match (kind, dagger) {
                (Some(FieldKind::RealScalar), _) => (Some(Particle), Some(Particle)),
                (_, false) => (Some(Particle), Some(Antiparticle)),
                (_, true) => (Some(Antiparticle), Some(Particle)),
            },
            OperatorSymbol::Spinor { conj, .. } => {
                if *conj {
                    (Some(Antiparticle), Some(Particle))
                } else {
                    (Some(Particle), Some(Antiparticle))
                }
            }
        }
    }
}

/// One entry of a time slot: a bare symbol or a normal-ordered run.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupItem {
    Bare(OperatorSymbol),
    Normal(Vec<OperatorSymbol>),
}

/// Symbols sharing one time. The slot moves as a unit under time ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub items: Vec<GroupItem>,
}

impl Group {
    pub fn bare(symbol: OperatorSymbol) -> Self {
        Self {
            items: vec![GroupItem::Bare(symbol)],
        }
    }

    pub fn normal(symbols: Vec<OperatorSymbol>) -> Self {
        Self {
            items: vec![GroupItem::Normal(symbols)],
        }
    }

    /// `μ(t) :O(t):`, the interaction vertex of a quadratic model.
    pub fn vertex(monopole: OperatorSymbol, fields: Vec<OperatorSymbol>) -> Self {
        Self {
            items: vec![GroupItem::Bare(monopole), GroupItem::Normal(fields)],
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &OperatorSymbol> {
        self.items.iter().flat_map(|it| match it {
            GroupItem::Bare(s) => std::slice::from_ref(s).iter(),
            GroupItem::Normal(v) => v.iter(),
        })
    }

    pub fn time(&self) -> Option<f64> {
        self.symbols().find_map(|s| s.time())
    }
}

/// `⟨0| prefix · T[core] · suffix |0⟩`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorWord {
    pub prefix: Vec<OperatorSymbol>,
    pub core: Vec<Group>,
    pub suffix: Vec<OperatorSymbol>,
    /// Statistics and reality of every field id used in the word.
    pub kinds: BTreeMap<u32, FieldKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Prefix,
    Core { group: usize, run: Option<usize> },
    Suffix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatSymbol {
    pub symbol: OperatorSymbol,
    pub slot: Slot,
}

impl OperatorWord {
    pub fn new(prefix: Vec<OperatorSymbol>, core: Vec<Group>, suffix: Vec<OperatorSymbol>) -> Self {
        Self {
            prefix,
            core,
            suffix,
            kinds: BTreeMap::new(),
        }
    }

    pub fn with_kind(mut self, field: u32, kind: FieldKind) -> Self {
        self.kinds.insert(field, kind);
        self
    }

    pub fn with_kinds(mut self, kinds: &BTreeMap<u32, FieldKind>) -> Self {
        for (k, v) in kinds {
            self.kinds.insert(*k, *v);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.core.iter().map(|g| g.symbols().count()).sum::<usize>() + self.suffix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self) -> Vec<FlatSymbol> {
        let mut out = Vec::with_capacity(self.len());
        for s in &self.prefix {
            out.push(FlatSymbol {
                symbol: s.clone(),
                slot: Slot::Prefix,
            });
        }
        let mut run = 0;
        for (g, group) in self.core.iter().enumerate() {
            for item in &group.items {
                match item {
                    GroupItem::Bare(s) => out.push(FlatSymbol {
                        symbol: s.clone(),
                        slot: Slot::Core { group: g, run: None },
                    }),
                    GroupItem::Normal(v) => {
                        for s in v {
                            out.push(FlatSymbol {
                                symbol: s.clone(),
                                slot: Slot::Core { group: g, run: Some(run) },
                            });
                        }
                        run += 1;
                    }
                }
            }
        }
        for s in &self.suffix {
            out.push(FlatSymbol {
                symbol: s.clone(),
                slot: Slot::Suffix,
            });
        }
        out
    }

    pub fn kind_of(&self, sym: &OperatorSymbol) -> Option<FieldKind> {
        match sym.algebra() {
            Algebra::Field(id) => self.kinds.get(&id).copied(),
            Algebra::Detector(_) => None,
        }
    }

    /// Structural checks that need no numeric configuration.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedWord(m));
        for s in &self.prefix {
            if !s.is_annihilator() {
                return bad(format!("prefix holds a non-annihilator {s:?}"));
            }
        }
        for s in &self.suffix {
            if !s.is_creator() {
                return bad(format!("suffix holds a non-creator {s:?}"));
            }
        }
        for (g, group) in self.core.iter().enumerate() {
            if group.items.is_empty() {
                return bad(format!("time slot {g} is empty"));
            }
            let t = group.time();
            for item in &group.items {
                if let GroupItem::Normal(v) = item {
                    if v.is_empty() {
                        return bad(format!("empty normal-ordered run in slot {g}"));
                    }
                }
            }
            for s in group.symbols() {
                match s.time() {
                    None => return bad(format!("ladder or σ symbol inside the time-ordered block: {s:?}")),
                    Some(ts) if Some(ts) != t => {
                        return bad(format!("slot {g} mixes times {ts} and {}", t.unwrap_or(f64::NAN)))
                    }
                    _ => {}
                }
            }
        }
        for f in self.flatten() {
            let s = &f.symbol;
            if let Algebra::Field(id) = s.algebra() {
                let kind = self
                    .kinds
                    .get(&id)
                    .ok_or_else(|| Error::MalformedWord(format!("field {id} has no declared kind")))?;
                let ok = match s {
                    OperatorSymbol::Ladder { spin, charge, .. } => {
                        (spin.is_some() == kind.is_fermionic())
                            && !(*kind == FieldKind::RealScalar && *charge == Charge::Antiparticle)
                    }
                    OperatorSymbol::Scalar { .. } => !kind.is_fermionic(),
                    OperatorSymbol::Spinor { index, .. } => {
                        kind.is_fermionic() && !matches!(index, SpinorIndex::Fixed(i) if *i > 3)
                    }
                    _ => true,
                };
                if !ok {
                    return bad(format!("symbol {s:?} does not fit a {} field", kind.name()));
                }
            }
        }
        Ok(())
    }
}
