//! Momentum lattice, dispersion and scalar mode functions of the periodic cavity
//! `[-L/2, L/2]^n`.
//!
//! Vectors are stored as `[f64; 3]`. One spatial dimension lives in the third
//! component so that `k·γ = ωγ⁰ − kγ³`; two dimensions use the first two.

use crate::error::{invalid, Error, Result};
use crate::numeric::CNeumaier;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    RealScalar,
    ComplexScalar,
    Spinor,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::RealScalar => "real scalar",
            FieldKind::ComplexScalar => "complex scalar",
            FieldKind::Spinor => "spinor",
        }
    }

    pub fn is_fermionic(self) -> bool {
        matches!(self, FieldKind::Spinor)
    }
}

/// A free field confined to the periodic cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityField {
    n: usize,
    length: f64,
    mass: f64,
    kind: FieldKind,
}

impl CavityField {
    /// Scalars accept `n ∈ {1, 2, 3}`, spinors `n ∈ {1, 3}`.
    pub fn new(n: usize, length: f64, mass: f64, kind: FieldKind) -> Result<Self> {
        let dims_ok = match kind {
            FieldKind::Spinor => n == 1 || n == 3,
            _ => (1..=3).contains(&n),
        };
        if !dims_ok {
            return Err(invalid("n", format!("{n} is not a valid dimension for a {} field", kind.name())));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("L", format!("cavity length must be positive, got {length}")));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(invalid("m", format!("mass must be non-negative, got {mass}")));
        }
        Ok(Self { n, length, mass, kind })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Massless branch is selected by an exact comparison.
    pub fn is_massless(&self) -> bool {
        self.mass == 0.0
    }

    /// `L^n`
    pub fn volume(&self) -> f64 {
        self.length.powi(self.n as i32)
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::new(self.n, self.length, mass, self.kind)
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.n, length, self.mass, self.kind)
    }

    pub fn momentum(&self, l: &ModeIndex) -> Vec3 {
        momentum_of(l, self.length)
    }

    pub fn energy(&self, k: &Vec3) -> f64 {
        dispersion(k, self.mass)
    }

    /// Places the first `n` coordinates in the storage layout described above.
    pub fn embed(&self, comps: &[f64]) -> Vec3 {
        embed(self.n, comps)
    }
}

pub fn embed(n: usize, comps: &[f64]) -> Vec3 {
    match n {
        1 => [0.0, 0.0, comps[0]],
        2 => [comps[0], comps[1], 0.0],
        _ => [comps[0], comps[1], comps[2]],
    }
}

/// Integer lattice label `l ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    l: [i64; 3],
    n: u8,
}

impl ModeIndex {
    /// Builds a label from its `n` integer components; the zero vector is rejected.
    pub fn new(comps: &[i64]) -> Result<Self> {
        let n = comps.len();
        if !(1..=3).contains(&n) {
            return Err(invalid("l", format!("mode label must have 1 to 3 components, got {n}")));
        }
        if comps.iter().all(|&c| c == 0) {
            return Err(Error::ZeroMode);
        }
        let l = match n {
            1 => [0, 0, comps[0]],
            2 => [comps[0], comps[1], 0],
            _ => [comps[0], comps[1], comps[2]],
        };
        Ok(Self { l, n: n as u8 })
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// The components as given at construction.
    pub fn comps(&self) -> Vec<i64> {
        match self.n {
            1 => vec![self.l[2]],
            2 => vec![self.l[0], self.l[1]],
            _ => self.l.to_vec(),
        }
    }

    pub fn sup_norm(&self) -> i64 {
        self.l.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn negated(&self) -> Self {
        Self {
            l: [-self.l[0], -self.l[1], -self.l[2]],
            n: self.n,
        }
    }

    pub(crate) fn raw(&self) -> [i64; 3] {
        self.l
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = self.comps();
        let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All labels with `1 ≤ |l|_∞ ≤ cutoff`, in lexicographic order.
pub fn sup_ball(n: usize, cutoff: i64) -> Vec<ModeIndex> {
    let mut out = Vec::new();
    let r = -cutoff..=cutoff;
    match n {
        1 => {
            for a in r {
                if a != 0 {
                    out.push(ModeIndex::new(&[a]).unwrap());
                }
            }
        }
        2 => {
            for a in r.clone() {
                for b in r.clone() {
                    if a != 0 || b != 0 {
                        out.push(ModeIndex::new(&[a, b]).unwrap());
                    }
                }
            }
        }
        _ => {
            for a in r.clone() {
                for b in r.clone() {
                    for c in r.clone() {
                        if a != 0 || b != 0 || c != 0 {
                            out.push(ModeIndex::new(&[a, b, c]).unwrap());
                        }
                    }
                }
            }
        }
    }
    out
}

/// `k = 2π l / L`.
pub fn momentum_of(l: &ModeIndex, length: f64) -> Vec3 {
    let s = 2.0 * PI / length;
    let r = l.raw();
    [s * r[0] as f64, s * r[1] as f64, s * r[2] as f64]
}

/// `ω = sqrt(|k|² + m²)`.
pub fn dispersion(k: &Vec3, mass: f64) -> f64 {
    (dot(k, k) + mass * mass).sqrt()
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// `φ_k(x) = L^{-n/2} e^{ik·x}`.
pub fn scalar_mode_spatial(x: &Vec3, k: &Vec3, field: &CavityField) -> Complex64 {
    let amp = field.volume().sqrt().recip();
    Complex64::from_polar(amp, dot(k, x))
}

/// `φ̃_k(t,x) = e^{-i(ωt - k·x)} / sqrt(2ωL^n)`.
pub fn scalar_mode_full(t: f64, x: &Vec3, k: &Vec3, field: &CavityField) -> Complex64 {
    let w = field.energy(k);
    let amp = (2.0 * w * field.volume()).sqrt().recip();
    Complex64::from_polar(amp, dot(k, x) - w * t)
}

/// A scalar mode `scale · φ̃_k`, used as an argument of [`kg_inner`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMode {
    pub l: ModeIndex,
    pub scale: Complex64,
}

impl ScaledMode {
    pub fn unit(l: ModeIndex) -> Self {
        Self {
            l,
            scale: Complex64::new(1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgInner {
    pub value: Complex64,
    /// Set when the grid has fewer than `4·l_max + 4` points per axis.
    pub coarse_grid: bool,
}

/// Klein-Gordon product `-i ∫ (f ∂₀g* − (∂₀f) g*)` over the cavity at time `t`,
/// evaluated with an `points`-per-axis periodic trapezoid grid.
pub fn kg_inner(field: &CavityField, a: &ScaledMode, b: &ScaledMode, points: usize, t: f64) -> KgInner {
    let n = field.n();
    let len = field.length();
    let ka = field.momentum(&a.l);
    let kb = field.momentum(&b.l);
    let wa = field.energy(&ka);
    let wb = field.energy(&kb);
    let i = Complex64::i();
    let h = len / points as f64;
    let cell = h.powi(n as i32);
    let mut acc = CNeumaier::new();
    let coord = |j: usize| -0.5 * len + h * j as f64;
    let mut visit = |x: Vec3| {
        let f = a.scale * scalar_mode_full(t, &x, &ka, field);
        let g = b.scale * scalar_mode_full(t, &x, &kb, field);
        let df = -i * wa * f;
        let dg_conj = (-i * wb * g).conj();
        acc.add(f * dg_conj - df * g.conj());
    };
    match n {
        1 => (0..points).for_each(|j| visit(embed(1, &[coord(j)]))),
        2 => {
            for j0 in 0..points {
                for j1 in 0..points {
                    visit(embed(2, &[coord(j0), coord(j1)]));
                }
            }
        }
        _ => {
            for j0 in 0..points {
                for j1 in 0..points {
                    for j2 in 0..points {
                        visit([coord(j0), coord(j1), coord(j2)]);
                    }
                }
            }
        }
    }
    let l_max = a.l.sup_norm().max(b.l.sup_norm()) as usize;
    KgInner {
        value: -i * acc.value() * cell,
        coarse_grid: points < 4 * l_max + 4,
    }
}
