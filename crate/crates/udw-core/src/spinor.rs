//! Spinor solutions `u`, `v` of the free Dirac equation, their mode functions,
//! bilinear products and spin sums.

use crate::error::{Error, Result};
use crate::gamma::{bar_product, max_abs, outer_bar, GammaSet, Mat4, Spinor4};
use crate::lattice::{dot, norm, CavityField, FieldKind, Vec3};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    /// `s ∈ {+1/2, −1/2}`
    pub fn value(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Up => 'u',
            Spin::Down => 'd',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Charge {
    Particle,
    Antiparticle,
}

impl Charge {
    pub const ALL: [Charge; 2] = [Charge::Particle, Charge::Antiparticle];

    /// `ε = ±1`
    pub fn sign(self) -> f64 {
        match self {
            Charge::Particle => 1.0,
            Charge::Antiparticle => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinLabel {
    pub spin: Spin,
    pub charge: Charge,
}

impl SpinLabel {
    pub fn all() -> [SpinLabel; 4] {
        [
            SpinLabel { spin: Spin::Up, charge: Charge::Particle },
            SpinLabel { spin: Spin::Down, charge: Charge::Particle },
            SpinLabel { spin: Spin::Up, charge: Charge::Antiparticle },
            SpinLabel { spin: Spin::Down, charge: Charge::Antiparticle },
        ]
    }
}

fn xi(s: Spin) -> [Complex64; 2] {
    match s {
        Spin::Up => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        Spin::Down => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    }
}

/// `(σ·k) ξ`
fn sigma_dot(k: &Vec3, x: [Complex64; 2]) -> [Complex64; 2] {
    let i = Complex64::i();
    let kx = Complex64::from(k[0]);
    let ky = Complex64::from(k[1]);
    let kz = Complex64::from(k[2]);
    [kz * x[0] + (kx - i * ky) * x[1], (kx + i * ky) * x[0] - kz * x[1]]
}

fn check_spinor(field: &CavityField) {
    debug_assert_eq!(field.kind(), FieldKind::Spinor, "spinor routine called with a {} field", field.kind().name());
}

/// Returns `(upper scale, lower denominator)`: the spinor is
/// `scale·[ξ; σ·k ξ / den]` or its swapped counterpart.
fn branch(k: &Vec3, field: &CavityField) -> (f64, f64) {
    if field.is_massless() {
        (std::f64::consts::FRAC_1_SQRT_2, norm(k))
    } else {
        let m = field.mass();
        let a = field.energy(k) + m;
        ((a / (2.0 * m)).sqrt(), a)
    }
}

pub fn spinor_u(k: &Vec3, s: Spin, field: &CavityField) -> Spinor4 {
    check_spinor(field);
    let (c, den) = branch(k, field);
    let x = xi(s);
    let l = sigma_dot(k, x);
    let c = Complex64::from(c);
    Spinor4::new(c * x[0], c * x[1], c * l[0] / den, c * l[1] / den)
}

pub fn spinor_v(k: &Vec3, s: Spin, field: &CavityField) -> Spinor4 {
    check_spinor(field);
    let (c, den) = branch(k, field);
    let x = xi(s);
    let l = sigma_dot(k, x);
    let c = Complex64::from(c);
    Spinor4::new(c * l[0] / den, c * l[1] / den, c * x[0], c * x[1])
}

/// `u_{k,s,ε}`: `u` for particles, `v` for antiparticles.
pub fn spinor(k: &Vec3, label: SpinLabel, field: &CavityField) -> Spinor4 {
    match label.charge {
        Charge::Particle => spinor_u(k, label.spin, field),
        Charge::Antiparticle => spinor_v(k, label.spin, field),
    }
}

/// Mode normalization: `sqrt(m/(ωLⁿ))` when massive, `L^{-n/2}` when massless.
pub fn mode_prefactor(k: &Vec3, field: &CavityField) -> f64 {
    if field.is_massless() {
        field.volume().sqrt().recip()
    } else {
        (field.mass() / (field.energy(k) * field.volume())).sqrt()
    }
}

/// `ψ_{k,s,ε}(t,x) = N u_{k,s,ε} e^{ε i(k·x − ωt)}`.
pub fn spinor_mode(t: f64, x: &Vec3, k: &Vec3, label: SpinLabel, field: &CavityField) -> Spinor4 {
    let w = field.energy(k);
    let phase = Complex64::from_polar(mode_prefactor(k, field), label.charge.sign() * (dot(k, x) - w * t));
    spinor(k, label, field) * phase
}

/// `Σ_s u_{k,s,ε} ū_{k,s,ε}` from explicit outer products.
pub fn completeness_sum(k: &Vec3, charge: Charge, field: &CavityField) -> Mat4 {
    let g = GammaSet::dirac();
    Spin::ALL
        .iter()
        .map(|&spin| outer_bar(&g, &spinor(k, SpinLabel { spin, charge }, field)))
        .fold(Mat4::zeros(), |a, b| a + b)
}

/// Closed form of the spin sum: `(k̸ ± m)/2m` when massive, `k̸/2|k|` when massless.
pub fn completeness_closed_form(k: &Vec3, charge: Charge, field: &CavityField) -> Mat4 {
    let g = GammaSet::dirac();
    let w = field.energy(k);
    let ks = g.slash(w, k);
    if field.is_massless() {
        ks / Complex64::from(2.0 * norm(k))
    } else {
        let m = field.mass();
        let shifted = ks + Mat4::identity() * Complex64::from(charge.sign() * m);
        shifted / Complex64::from(2.0 * m)
    }
}

/// Max-norm of `(k̸ − m)u` for particles, `(k̸ + m)v` for antiparticles.
pub fn dirac_residual(k: &Vec3, label: SpinLabel, field: &CavityField) -> f64 {
    let g = GammaSet::dirac();
    let op = g.slash(field.energy(k), k) - Mat4::identity() * Complex64::from(label.charge.sign() * field.mass());
    let r = op * spinor(k, label, field);
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `ū_{k,a} u_{p,b}` evaluated from the explicit spinors.
pub fn bar_product_explicit(k: &Vec3, a: SpinLabel, p: &Vec3, b: SpinLabel, field: &CavityField) -> Complex64 {
    let g = GammaSet::dirac();
    bar_product(&g, &spinor(k, a, field), &spinor(p, b, field))
}

/// Closed forms of `ū_{k,s,ε} u_{p,r,δ}` for all four charge combinations.
///
/// Both dimensions share one expression since the one-dimensional momentum sits in
/// the third component. The massless (1,1) tables are provided separately by
/// [`bar_product_closed_1d_massless`].
pub fn bar_product_closed(k: &Vec3, a: SpinLabel, p: &Vec3, b: SpinLabel, field: &CavityField) -> Complex64 {
    use Charge::*;
    match (a.charge, b.charge) {
        (Particle, Particle) => ubar_u(k, a.spin, p, b.spin, field),
        (Particle, Antiparticle) => ubar_v(k, a.spin, p, b.spin, field),
        (Antiparticle, Antiparticle) => -ubar_u(k, a.spin, p, b.spin, field),
        (Antiparticle, Particle) => -ubar_v(k, a.spin, p, b.spin, field),
    }
}

/// Normalization and denominators `(N, A, B)` of the product closed forms.
fn product_scales(k: &Vec3, p: &Vec3, field: &CavityField) -> (f64, f64, f64) {
    if field.is_massless() {
        (0.5, norm(k), norm(p))
    } else {
        let m = field.mass();
        let a = field.energy(k) + m;
        let b = field.energy(p) + m;
        ((a * b).sqrt() / (2.0 * m), a, b)
    }
}

fn ubar_u(k: &Vec3, s: Spin, p: &Vec3, r: Spin, field: &CavityField) -> Complex64 {
    let (c, a, b) = product_scales(k, p, field);
    let ab = a * b;
    let ss = s.value();
    if s == r {
        let cross = k[0] * p[1] - k[1] * p[0];
        c * (Complex64::from(1.0) - Complex64::new(dot(k, p), 2.0 * ss * cross) / ab)
    } else {
        let re = 2.0 * ss * (k[0] * p[2] - k[2] * p[0]);
        let im = -(k[1] * p[2] - k[2] * p[1]);
        c * Complex64::new(re, im) / ab
    }
}

fn ubar_v(k: &Vec3, s: Spin, p: &Vec3, r: Spin, field: &CavityField) -> Complex64 {
    let (c, a, b) = product_scales(k, p, field);
    let ss = s.value();
    if s == r {
        Complex64::from(c * 2.0 * ss * (p[2] / b - k[2] / a))
    } else {
        let pv = Complex64::new(p[0], -2.0 * ss * p[1]) / b;
        let kv = Complex64::new(k[0], -2.0 * ss * k[1]) / a;
        (pv - kv) * c
    }
}

/// Massless (1,1) tables: `ūu = ½(1 − sgn k sgn p)δ_{sr}`, `ūv = s(sgn p − sgn k)δ_{sr}`.
pub fn bar_product_closed_1d_massless(k: f64, a: SpinLabel, p: f64, b: SpinLabel) -> Complex64 {
    if a.spin != b.spin {
        return Complex64::from(0.0);
    }
    let (sk, sp) = (k.signum(), p.signum());
    let uu = 0.5 * (1.0 - sk * sp);
    let s = a.spin.value();
    use Charge::*;
    Complex64::from(match (a.charge, b.charge) {
        (Particle, Particle) => uu,
        (Antiparticle, Antiparticle) => -uu,
        (Particle, Antiparticle) => s * (sp - sk),
        (Antiparticle, Particle) => -s * (sp - sk),
    })
}

/// Largest elementwise gap between the explicit spin sum and its closed form.
pub fn completeness_defect(k: &Vec3, charge: Charge, field: &CavityField) -> f64 {
    max_abs(&(completeness_sum(k, charge, field) - completeness_closed_form(k, charge, field)))
}

/// Rejects non-spinor fields for the public spinor helpers that validate input.
pub fn require_spinor(field: &CavityField) -> Result<()> {
    if field.kind() != FieldKind::Spinor {
        return Err(Error::NotApplicable(format!("spinor quantity requested for a {} field", field.kind().name())));
    }
    Ok(())
}
