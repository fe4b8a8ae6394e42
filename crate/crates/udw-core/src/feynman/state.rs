//! External states, their legs and leg factors.

use crate::error::{Error, Result};
use crate::gamma::{GammaSet, Spinor4};
use crate::lattice::{CavityField, FieldKind, ModeIndex};
use crate::profile::Model;
use crate::spinor::{spinor_mode, Charge, Spin, SpinLabel};
use crate::wick::OperatorSymbol;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Field id used for the single field of a process.
pub const FIELD: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Ground,
    Excited,
}

/// One field quantum. `spin` is set exactly for spinor fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quantum {
    pub charge: Charge,
    pub mode: ModeIndex,
    pub spin: Option<Spin>,
}

impl Quantum {
    pub fn particle(mode: ModeIndex) -> Self {
        Self {
            charge: Charge::Particle,
            mode,
            spin: None,
        }
    }

    pub fn antiparticle(mode: ModeIndex) -> Self {
        Self {
            charge: Charge::Antiparticle,
            mode,
            spin: None,
        }
    }

    pub fn with_spin(self, spin: Spin) -> Self {
        Self { spin: Some(spin), ..self }
    }

    fn creator(&self) -> OperatorSymbol {
        match self.spin {
            Some(s) => OperatorSymbol::spinor_ladder(FIELD, self.charge, self.mode, s, true),
            None => OperatorSymbol::ladder(FIELD, self.charge, self.mode, true),
        }
    }
}

impl std::fmt::Display for Quantum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self.charge {
            Charge::Particle => 'a',
            Charge::Antiparticle => 'b',
        };
        match self.spin {
            Some(s) => write!(f, "{c}({}){}", self.mode, s.symbol()),
            None => write!(f, "{c}({})", self.mode),
        }
    }
}

/// Detector levels and field quanta of a free-theory Fock state. The ket is
/// `c†_1 ⋯ c†_n |0⟩ ⊗ Π σ⁺|g⟩` with the quanta in listed order, normalized
/// for repeated bosons.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExternalState {
    pub detectors: BTreeMap<u32, Level>,
    pub quanta: Vec<Quantum>,
}

impl ExternalState {
    /// Field vacuum with detectors `0..n` in the ground state.
    pub fn ground(n_detectors: u32) -> Self {
        Self {
            detectors: (0..n_detectors).map(|d| (d, Level::Ground)).collect(),
            quanta: Vec::new(),
        }
    }

    pub fn with_level(mut self, detector: u32, level: Level) -> Self {
        self.detectors.insert(detector, level);
        self
    }

    pub fn with_quantum(mut self, q: Quantum) -> Self {
        self.quanta.push(q);
        self
    }

    pub fn level(&self, detector: u32) -> Level {
        self.detectors.get(&detector).copied().unwrap_or(Level::Ground)
    }

    /// Checks quanta against the model's field and the Pauli principle.
    pub fn validate(&self, model: Model, n_detectors: u32) -> Result<()> {
        let bad = |m: String| Err(Error::IncompatibleState(m));
        if let Some(d) = self.detectors.keys().find(|d| **d >= n_detectors) {
            return bad(format!("detector {d} in a process with {n_detectors} detectors"));
        }
        let kind = model.field_kind();
        let mut seen = std::collections::BTreeSet::new();
        for q in &self.quanta {
            match kind {
                FieldKind::RealScalar if q.charge == Charge::Antiparticle => {
                    return bad(format!("antiparticle {q} of a real field"));
                }
                FieldKind::Spinor if q.spin.is_none() => return bad(format!("spinor quantum {q} without spin")),
                FieldKind::RealScalar | FieldKind::ComplexScalar if q.spin.is_some() => {
                    return bad(format!("scalar quantum {q} with spin"));
                }
                _ => {}
            }
            if kind.is_fermionic() && !seen.insert(*q) {
                return bad(format!("fermion {q} occupied twice"));
            }
        }
        Ok(())
    }

    /// Creation operators building the ket, in application order from the left.
    pub fn creators(&self) -> Vec<OperatorSymbol> {
        let mut out: Vec<OperatorSymbol> = self.quanta.iter().map(Quantum::creator).collect();
        for (d, l) in &self.detectors {
            if *l == Level::Excited {
                out.push(OperatorSymbol::Sigma { detector: *d, raising: true });
            }
        }
        out
    }

    /// `Π_q 1/√(n_q!)` over repeated bosonic quanta.
    pub fn normalization(&self, kind: FieldKind) -> f64 {
        if kind.is_fermionic() {
            return 1.0;
        }
        let mut counts: BTreeMap<Quantum, u32> = BTreeMap::new();
        for q in &self.quanta {
            *counts.entry(*q).or_default() += 1;
        }
        counts
            .values()
            .map(|&n| (1..=n).map(f64::from).product::<f64>())
            .product::<f64>()
            .sqrt()
            .recip()
    }

    /// Free energy `Σ ω + Σ Ω_excited`.
    pub fn energy(&self, field: &CavityField, gaps: &BTreeMap<u32, f64>) -> f64 {
        let fe: f64 = self.quanta.iter().map(|q| field.energy(&field.momentum(&q.mode))).sum();
        fe + self
            .detectors
            .iter()
            .filter(|(_, l)| **l == Level::Excited)
            .map(|(d, _)| gaps.get(d).copied().unwrap_or(0.0))
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LegKind {
    /// Excited detector entering or leaving.
    Detector(u32),
    Field(Quantum),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExternalLeg {
    pub outgoing: bool,
    pub kind: LegKind,
}

impl std::fmt::Display for ExternalLeg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dir = if self.outgoing { "out" } else { "in" };
        match self.kind {
            LegKind::Detector(d) => write!(f, "{dir} detector {d}"),
            LegKind::Field(q) => write!(f, "{dir} {q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LegFactor {
    Scalar(Complex64),
    /// Spinor components: `ū` or `v̄` for outgoing particles and incoming
    /// antiparticles (row), `v` or `u` otherwise (column).
    Spinor(Spinor4),
}

impl LegFactor {
    pub fn scalar(&self) -> Option<Complex64> {
        match self {
            LegFactor::Scalar(z) => Some(*z),
            LegFactor::Spinor(_) => None,
        }
    }
}

/// Energy carried by a leg.
pub fn leg_energy(leg: &ExternalLeg, field: &CavityField, gaps: &BTreeMap<u32, f64>) -> Result<f64> {
    match leg.kind {
        LegKind::Detector(d) => gaps
            .get(&d)
            .copied()
            .ok_or_else(|| Error::IncompatibleState(format!("detector {d} has no gap"))),
        LegKind::Field(q) => Ok(field.energy(&field.momentum(&q.mode))),
    }
}

/// Boundary phase of a leg: `e^{−iEt}` outgoing, `e^{iEt}` incoming.
pub fn leg_phase(leg: &ExternalLeg, energy: f64, t: f64) -> Complex64 {
    let s = if leg.outgoing { -1.0 } else { 1.0 };
    Complex64::from_polar(1.0, s * energy * t)
}

/// Normalization, polarization and boundary phase of an external leg at
/// boundary time `t`.
pub fn leg_factor(leg: &ExternalLeg, field: &CavityField, gaps: &BTreeMap<u32, f64>, t: f64) -> Result<LegFactor> {
    let e = leg_energy(leg, field, gaps)?;
    let phase = leg_phase(leg, e, t);
    let q = match leg.kind {
        LegKind::Detector(_) => return Ok(LegFactor::Scalar(phase)),
        LegKind::Field(q) => q,
    };
    if !field.kind().is_fermionic() {
        return Ok(LegFactor::Scalar(phase / (2.0 * e * field.volume()).sqrt()));
    }
    let spin = q
        .spin
        .ok_or_else(|| Error::IncompatibleState(format!("spinor leg {q} without spin")))?;
    let k = field.momentum(&q.mode);
    let psi = spinor_mode(0.0, &[0.0; 3], &k, SpinLabel { spin, charge: q.charge }, field);
    let row = leg.outgoing == (q.charge == Charge::Particle);
    let v = if row {
        GammaSet::dirac().bar(&psi).transpose()
    } else {
        psi
    };
    Ok(LegFactor::Spinor(v * phase))
}

/// Detector that stays excited from `t0` to `t` without interacting.
pub fn through_line_factor(gap: f64, t: f64, t0: f64) -> Complex64 {
    Complex64::from_polar(1.0, -gap * (t - t0))
}
