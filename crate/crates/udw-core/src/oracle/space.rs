//! Mode tables, occupation-number basis and dense ladder matrices.

use crate::error::{Error, Result};
use crate::lattice::{FieldKind, ModeIndex};
use crate::spinor::{Charge, Spin};
use crate::wick::{Algebra, FieldModes, WickConfig};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Largest dense dimension the oracle will build.
pub const DENSE_LIMIT: usize = 4096;

/// Default bosonic occupancy cap.
pub const DEFAULT_CAP: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeKey {
    Field {
        charge: Charge,
        mode: ModeIndex,
        spin: Option<Spin>,
    },
    Level,
}

/// One single-particle mode of the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMode {
    pub algebra: Algebra,
    pub key: ModeKey,
    pub fermionic: bool,
    /// Excitation energy of one quantum.
    pub energy: f64,
}

/// Ordered list of modes. Within each algebra the listed order is the
/// Jordan-Wigner order; detector levels come after all field modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeTable {
    pub modes: Vec<OracleMode>,
    index: BTreeMap<(Algebra, ModeKey), usize>,
}

impl ModeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, m: OracleMode) -> Result<usize> {
        let id = self.modes.len();
        if self.index.insert((m.algebra, m.key), id).is_some() {
            return Err(Error::OutsideSpace(format!("mode {:?} of {:?} listed twice", m.key, m.algebra)));
        }
        self.modes.push(m);
        Ok(id)
    }

    /// Adds the ladder modes of one field: particles, then antiparticles,
    /// each spin-up before spin-down for a given momentum.
    pub fn add_field(&mut self, id: u32, fm: &FieldModes) -> Result<()> {
        let kind = fm.field.kind();
        let charges: &[Charge] = match kind {
            FieldKind::RealScalar => &[Charge::Particle],
            _ => &[Charge::Particle, Charge::Antiparticle],
        };
        let spins: &[Option<Spin>] = if kind.is_fermionic() {
            &[Some(Spin::Up), Some(Spin::Down)]
        } else {
            &[None]
        };
        for &charge in charges {
            for mode in &fm.modes {
                let energy = fm.field.energy(&fm.field.momentum(mode));
                for &spin in spins {
                    self.push(OracleMode {
                        algebra: Algebra::Field(id),
                        key: ModeKey::Field { charge, mode: *mode, spin },
                        fermionic: kind.is_fermionic(),
                        energy,
                    })?;
                }
            }
        }
        Ok(())
    }

    pub fn add_detector(&mut self, id: u32, gap: f64) -> Result<()> {
        self.push(OracleMode {
            algebra: Algebra::Detector(id),
            key: ModeKey::Level,
            fermionic: true,
            energy: gap,
        })
        .map(|_| ())
    }

    /// Fields in id order, then detectors in id order.
    pub fn from_config(cfg: &WickConfig) -> Result<Self> {
        let mut t = Self::new();
        for (id, fm) in &cfg.fields {
            t.add_field(*id, fm)?;
        }
        for (id, gap) in &cfg.detectors {
            t.add_detector(*id, *gap)?;
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn find(&self, algebra: Algebra, key: ModeKey) -> Result<usize> {
        self.index
            .get(&(algebra, key))
            .copied()
            .ok_or_else(|| Error::OutsideSpace(format!("mode {key:?} of {algebra:?}")))
    }

    pub fn field_mode(&self, field: u32, charge: Charge, mode: ModeIndex, spin: Option<Spin>) -> Result<usize> {
        self.find(Algebra::Field(field), ModeKey::Field { charge, mode, spin })
    }

    pub fn detector(&self, id: u32) -> Result<usize> {
        self.find(Algebra::Detector(id), ModeKey::Level)
    }

    /// Free energy of an occupation vector.
    pub fn energy(&self, occ: &[u8]) -> f64 {
        occ.iter().zip(&self.modes).map(|(n, m)| *n as f64 * m.energy).sum()
    }
}

/// A single ladder operator on the mode with the given table index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn new(mode: usize, dagger: bool) -> Self {
        Self { mode, dagger }
    }
}

/// Applies one ladder operator to a basis state in place and returns the
/// matrix element, or `None` when the result vanishes. `cap` bounds bosonic
/// occupations; fermionic signs count occupied modes of the same algebra
/// that precede the target.
pub fn apply_ladder(table: &ModeTable, occ: &mut [u8], op: Ladder, cap: Option<u8>) -> Option<f64> {
    let m = &table.modes[op.mode];
    let n = occ[op.mode];
    if m.fermionic {
        if (op.dagger && n == 1) || (!op.dagger && n == 0) {
            return None;
        }
        let parity: u32 = table.modes[..op.mode]
            .iter()
            .zip(occ.iter())
            .filter(|(mm, _)| mm.fermionic && mm.algebra == m.algebra)
            .map(|(_, &o)| o as u32)
            .sum();
        occ[op.mode] = if op.dagger { 1 } else { 0 };
        Some(if parity % 2 == 0 { 1.0 } else { -1.0 })
    } else if op.dagger {
        if cap.is_some_and(|c| n >= c) {
            return None;
        }
        occ[op.mode] = n + 1;
        Some(((n + 1) as f64).sqrt())
    } else {
        if n == 0 {
            return None;
        }
        occ[op.mode] = n - 1;
        Some((n as f64).sqrt())
    }
}

/// A finite linear combination of ladder products. Each product acts
/// right-to-left, as written.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorSum {
    pub terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl OperatorSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(op: Ladder) -> Self {
        Self {
            terms: vec![(Complex64::new(1.0, 0.0), vec![op])],
        }
    }

    pub fn push(&mut self, c: Complex64, ops: Vec<Ladder>) {
        self.terms.push((c, ops));
    }

    /// `self · other`
    pub fn times(&self, other: &OperatorSum) -> OperatorSum {
        let mut out = OperatorSum::new();
        for (c1, o1) in &self.terms {
            for (c2, o2) in &other.terms {
                let mut ops = o1.clone();
                ops.extend_from_slice(o2);
                out.push(c1 * c2, ops);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Dense occupation-number space with a bosonic cap.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSpace {
    pub table: ModeTable,
    pub cap: u8,
    dims: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl TruncatedSpace {
    pub fn new(table: ModeTable, cap: u8) -> Result<Self> {
        if cap == 0 {
            return Err(crate::error::invalid("cap", "bosonic occupancy cap must be at least 1"));
        }
        let dims: Vec<usize> = table
            .modes
            .iter()
            .map(|m| if m.fermionic { 2 } else { cap as usize + 1 })
            .collect();
        let mut dim = 1usize;
        let mut strides = Vec::with_capacity(dims.len());
        for d in &dims {
            strides.push(dim);
            dim = dim
                .checked_mul(*d)
                .filter(|v| *v <= DENSE_LIMIT)
                .ok_or_else(|| Error::OutsideSpace(format!("dense dimension exceeds {DENSE_LIMIT}")))?;
        }
        Ok(Self {
            table,
            cap,
            dims,
            strides,
            dim,
        })
    }

    pub fn from_config(cfg: &WickConfig, cap: u8) -> Result<Self> {
        Self::new(ModeTable::from_config(cfg)?, cap)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn occupations(&self, index: usize) -> Vec<u8> {
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| ((index / s) % d) as u8)
            .collect()
    }

    pub fn index(&self, occ: &[u8]) -> usize {
        occ.iter().zip(&self.strides).map(|(n, s)| *n as usize * s).sum()
    }

    /// Diagonal of the free Hamiltonian.
    pub fn free_energies(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.table.energy(&self.occupations(i))).collect()
    }

    /// Matrix of a sum of ladder products, built column by column.
    pub fn operator_matrix(&self, op: &OperatorSum) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            let start = self.occupations(col);
            'term: for (c, ops) in &op.terms {
                let mut occ = start.clone();
                let mut amp = *c;
                for l in ops.iter().rev() {
                    match apply_ladder(&self.table, &mut occ, *l, Some(self.cap)) {
                        Some(f) => amp *= f,
                        None => continue 'term,
                    }
                }
                m[(self.index(&occ), col)] += amp;
            }
        }
        m
    }
}

/// Dense matrix of `a` or `a†` on the given mode.
pub fn ladder_matrix(space: &TruncatedSpace, mode: usize, dagger: bool) -> Result<DMatrix<Complex64>> {
    if mode >= space.table.len() {
        return Err(Error::OutsideSpace(format!("mode index {mode} in a table of {}", space.table.len())));
    }
    Ok(space.operator_matrix(&OperatorSum::single(Ladder::new(mode, dagger))))
}
