//! Interaction operators of the four models in mode space, and the exact
//! second-order Dyson terms on a truncated space.

use super::space::{Ladder, ModeTable, OperatorSum};
use super::sparse::FockVector;
use crate::error::{Error, Result};
use crate::lattice::{scalar_mode_full, FieldKind, Vec3};
use crate::numeric::{simplex_rule, CNeumaier};
use crate::profile::{chi, profile_fourier, time_fourier, DetectorSpec, Model, SpatialProfile};
use crate::spinor::{spinor_mode, Charge, Spin, SpinLabel};
use crate::wick::FieldModes;
use num_complex::Complex64;

/// `amp · e^{iq·y}` times a ladder operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerm {
    pub amp: Complex64,
    pub q: Vec3,
    pub op: Ladder,
}

/// Which field operator to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFactor {
    Phi,
    PhiDagger,
    Psi(usize),
    PsiBar(usize),
}

fn neg(v: &Vec3) -> Vec3 {
    [-v[0], -v[1], -v[2]]
}

/// Mode expansion of a field operator at time `t`, in plane waves of `y`.
pub fn field_expansion(table: &ModeTable, id: u32, fm: &FieldModes, factor: FieldFactor, t: f64) -> Result<Vec<ExpansionTerm>> {
    let f = &fm.field;
    let origin = [0.0; 3];
    let mut out = Vec::new();
    for l in &fm.modes {
        let k = f.momentum(l);
        match factor {
            FieldFactor::Phi | FieldFactor::PhiDagger => {
                if f.kind().is_fermionic() {
                    return Err(Error::MalformedWord("scalar factor on a spinor field".into()));
                }
                let phi = scalar_mode_full(t, &origin, &k, f);
                let a = table.field_mode(id, Charge::Particle, *l, None)?;
                let b = if f.kind() == FieldKind::RealScalar {
                    a
                } else {
                    table.field_mode(id, Charge::Antiparticle, *l, None)?
                };
                let (first, second) = if factor == FieldFactor::PhiDagger && f.kind() != FieldKind::RealScalar {
                    ((phi.conj(), neg(&k), Ladder::new(a, true)), (phi, k, Ladder::new(b, false)))
                } else {
                    ((phi, k, Ladder::new(a, false)), (phi.conj(), neg(&k), Ladder::new(b, true)))
                };
                for (amp, q, op) in [first, second] {
                    out.push(ExpansionTerm { amp, q, op });
                }
            }
            FieldFactor::Psi(c) | FieldFactor::PsiBar(c) => {
                if !f.kind().is_fermionic() {
                    return Err(Error::MalformedWord("spinor factor on a scalar field".into()));
                }
                let conj = matches!(factor, FieldFactor::PsiBar(_));
                for spin in Spin::ALL {
                    for charge in [Charge::Particle, Charge::Antiparticle] {
                        let psi = spinor_mode(t, &origin, &k, SpinLabel { spin, charge }, f);
                        let amp = if conj {
                            crate::gamma::GammaSet::dirac().bar(&psi)[c]
                        } else {
                            psi[c]
                        };
                        // ψ_{±} ∝ e^{±ik·y}; the bar conjugates the phase.
                        let sgn = charge.sign() * if conj { -1.0 } else { 1.0 };
                        let q = [sgn * k[0], sgn * k[1], sgn * k[2]];
                        let mode = table.field_mode(id, charge, *l, Some(spin))?;
                        let dagger = (charge == Charge::Particle) == conj;
                        out.push(ExpansionTerm {
                            amp,
                            q,
                            op: Ladder::new(mode, dagger),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `∫ p(y) e^{iq·y} dⁿy`
fn smeared(profile: &SpatialProfile, q: &Vec3) -> Complex64 {
    profile_fourier(profile, &neg(q))
}

/// `∫ p(y) O(t, y) dⁿy` for the model's field operator `O`, optionally
/// normal ordered.
pub fn smeared_field_operator(
    table: &ModeTable,
    id: u32,
    fm: &FieldModes,
    model: Model,
    profile: &SpatialProfile,
    t: f64,
    normal_ordered: bool,
) -> Result<OperatorSum> {
    model.check_field(&fm.field)?;
    let mut out = OperatorSum::new();
    let pairs: Vec<(FieldFactor, FieldFactor)> = match model {
        Model::Linear => {
            for e in field_expansion(table, id, fm, FieldFactor::Phi, t)? {
                out.push(e.amp * smeared(profile, &e.q), vec![e.op]);
            }
            return Ok(out);
        }
        Model::RealQuadratic => vec![(FieldFactor::Phi, FieldFactor::Phi)],
        Model::ComplexQuadratic => vec![(FieldFactor::PhiDagger, FieldFactor::Phi)],
        Model::Spinor => (0..4).map(|c| (FieldFactor::PsiBar(c), FieldFactor::Psi(c))).collect(),
    };
    let fermionic = fm.field.kind().is_fermionic();
    for (left, right) in pairs {
        let l = field_expansion(table, id, fm, left, t)?;
        let r = field_expansion(table, id, fm, right, t)?;
        for e1 in &l {
            for e2 in &r {
                let q = [e1.q[0] + e2.q[0], e1.q[1] + e2.q[1], e1.q[2] + e2.q[2]];
                let c = e1.amp * e2.amp * smeared(profile, &q);
                if normal_ordered && !e1.op.dagger && e2.op.dagger {
                    out.push(if fermionic { -c } else { c }, vec![e2.op, e1.op]);
                } else {
                    out.push(c, vec![e1.op, e2.op]);
                }
            }
        }
    }
    Ok(out)
}

/// Monopole `μ(t) = e^{−iΩt} σ⁻ + e^{iΩt} σ⁺` on the detector level `det`.
pub fn monopole_operator(det: usize, gap: f64, t: f64) -> OperatorSum {
    let mut m = OperatorSum::new();
    m.push(Complex64::from_polar(1.0, -gap * t), vec![Ladder::new(det, false)]);
    m.push(Complex64::from_polar(1.0, gap * t), vec![Ladder::new(det, true)]);
    m
}

/// Mode table of one field (id 0) followed by one detector (id 0).
pub fn model_table(fm: &FieldModes, gap: f64) -> Result<ModeTable> {
    let mut t = ModeTable::new();
    t.add_field(0, fm)?;
    t.add_detector(0, gap)?;
    Ok(t)
}

/// `μ(t) ⊗ ∫p O(t)`, without the coupling and the switching function.
/// At `t = 0` this is the Schrödinger-picture interaction.
pub fn interaction_operator(table: &ModeTable, fm: &FieldModes, det: &DetectorSpec, t: f64, normal_ordered: bool) -> Result<OperatorSum> {
    let o = smeared_field_operator(table, 0, fm, det.model, &det.profile, t, normal_ordered)?;
    Ok(monopole_operator(table.detector(0)?, det.gap, t).times(&o))
}

/// Truncated tadpole `⟨0|∫p O|0⟩` of the un-normal-ordered operator, by direct
/// mode sums: `Σ_k |p̃(0)| / (2ω_k Lⁿ)` for scalars and `Σ_{k,s} ψ̄₋ψ₋` for spinors.
pub fn tadpole_mode_sum(fm: &FieldModes, profile: &SpatialProfile) -> Complex64 {
    let f = &fm.field;
    let p0 = smeared(profile, &[0.0; 3]);
    let origin = [0.0; 3];
    let s: CNeumaier = fm
        .modes
        .iter()
        .map(|l| {
            let k = f.momentum(l);
            if f.kind().is_fermionic() {
                Spin::ALL
                    .iter()
                    .map(|&spin| {
                        let v = spinor_mode(0.0, &origin, &k, SpinLabel { spin, charge: Charge::Antiparticle }, f);
                        crate::gamma::bar_product(&crate::gamma::GammaSet::dirac(), &v, &v)
                    })
                    .sum::<Complex64>()
            } else {
                Complex64::from(1.0 / (2.0 * f.energy(&k) * f.volume()))
            }
        })
        .collect();
    s.value() * p0
}

/// First- and second-order Dyson terms from the ground state `|0, g⟩`,
/// summed exactly over the free-energy eigenbasis of the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrder {
    /// `A⁽¹⁾_n = −iλ χ̃(E_n) ⟨n|V|0,g⟩` per final basis state.
    pub first_order: Vec<(Vec<u8>, Complex64)>,
    /// `Σ_n |A⁽¹⁾_n|²`
    pub first_order_prob: f64,
    /// `A⁽²⁾_{0,g} = (−iλ)² Σ_n |V_{n0}|² ∫_{t₁>t₂} χ(t₁)χ(t₂) e^{−iE_n(t₁−t₂)}`
    pub vacuum_second_order: Complex64,
    pub table: ModeTable,
}

impl SecondOrder {
    /// `Σ|A⁽¹⁾|² + 2 Re A⁽²⁾_{0,g}`
    pub fn unitarity_residual(&self) -> f64 {
        self.first_order_prob + 2.0 * self.vacuum_second_order.re
    }
}

/// Simplex integral `∫_{t₁>t₂} χ(t₁)χ(t₂) e^{−iE(t₁−t₂)}` over the switching support.
pub fn ordered_pair_integral(det: &DetectorSpec, energy: f64, panels: usize, order: usize) -> Complex64 {
    let (a, b) = det.switching.support();
    simplex_rule(a, b, panels, order)
        .into_iter()
        .map(|(t1, t2, w)| Complex64::from_polar(w * chi(&det.switching, t1) * chi(&det.switching, t2), -energy * (t1 - t2)))
        .collect::<CNeumaier>()
        .value()
}

pub fn dyson_second_order(fm: &FieldModes, det: &DetectorSpec, normal_ordered: bool, panels: usize, order: usize) -> Result<SecondOrder> {
    let table = model_table(fm, det.gap)?;
    let v = interaction_operator(&table, fm, det, 0.0, normal_ordered)?;
    let out = FockVector::vacuum(table.len()).apply(&table, &v, usize::MAX);
    let lam = det.coupling;
    let mi = Complex64::new(0.0, -lam);
    let mut first = Vec::new();
    let mut prob = crate::numeric::Neumaier::new();
    let mut second = CNeumaier::new();
    let mut cache: Vec<(f64, Complex64)> = Vec::new();
    for (occ, amp) in &out.amps {
        if amp.norm() == 0.0 {
            continue;
        }
        let e = table.energy(occ);
        let a1 = mi * time_fourier(&det.switching, e) * amp;
        prob.add(a1.norm_sqr());
        first.push((occ.clone(), a1));
        let i = match cache.iter().find(|(ce, _)| *ce == e) {
            Some((_, v)) => *v,
            None => {
                let v = ordered_pair_integral(det, e, panels, order);
                cache.push((e, v));
                v
            }
        };
        second.add(mi * mi * amp.norm_sqr() * i);
    }
    Ok(SecondOrder {
        first_order: first,
        first_order_prob: prob.value(),
        vacuum_second_order: second.value(),
        table,
    })
}

/// Schrödinger-picture coupling `μ_d ⊗ ∫p O` of detector `id` to field 0.
pub fn detector_coupling(table: &ModeTable, fm: &FieldModes, id: u32, det: &DetectorSpec, normal_ordered: bool) -> Result<OperatorSum> {
    let o = smeared_field_operator(table, 0, fm, det.model, &det.profile, 0.0, normal_ordered)?;
    Ok(monopole_operator(table.detector(id)?, det.gap, 0.0).times(&o))
}

fn pair_integral(d1: &DetectorSpec, d2: &DetectorSpec, nu1: f64, nu2: f64, window: (f64, f64), panels: usize, order: usize) -> Complex64 {
    simplex_rule(window.0, window.1, panels, order)
        .into_iter()
        .map(|(t1, t2, w)| Complex64::from_polar(w * chi(&d1.switching, t1) * chi(&d2.switching, t2), nu1 * t1 + nu2 * t2))
        .collect::<CNeumaier>()
        .value()
}

/// Orders 0, 1 and 2 of `⟨final| U(t_f, t₀) |initial⟩` in the Schrödinger
/// picture, `[t₀, t_f] = window`, for `H = H₀ + Σ_j λ_j χ_j(t) V_j`. Sums run
/// over exact intermediate basis states.
pub fn transition_amplitudes(
    table: &ModeTable,
    couplings: &[(OperatorSum, DetectorSpec)],
    initial: &FockVector,
    target: &FockVector,
    window: (f64, f64),
    panels: usize,
    order: usize,
) -> [Complex64; 3] {
    let (t0, tf) = window;
    let ext = |n: &[u8], m: &[u8]| {
        Complex64::from_polar(1.0, -table.energy(n) * tf) * Complex64::from_polar(1.0, table.energy(m) * t0)
    };
    let mut a = [CNeumaier::new(), CNeumaier::new(), CNeumaier::new()];
    let mut cache: std::collections::HashMap<(usize, usize, i64, i64), Complex64> = std::collections::HashMap::new();
    for (m, im) in &initial.amps {
        let fm = target.amplitude(m);
        if fm != Complex64::new(0.0, 0.0) {
            a[0].add(fm.conj() * im * ext(m, m));
        }
        let em = table.energy(m);
        let start = FockVector::basis(m.clone());
        for (j2, (v2, d2)) in couplings.iter().enumerate() {
            let l2 = Complex64::new(0.0, -d2.coupling);
            let w = start.apply(table, v2, usize::MAX);
            for (p, wp) in &w.amps {
                let ep = table.energy(p);
                let fp = target.amplitude(p);
                if fp != Complex64::new(0.0, 0.0) {
                    a[1].add(fp.conj() * im * l2 * wp * time_fourier(&d2.switching, ep - em) * ext(p, m));
                }
                let mid = FockVector::basis(p.clone());
                for (j1, (v1, d1)) in couplings.iter().enumerate() {
                    let l1 = Complex64::new(0.0, -d1.coupling);
                    let x = mid.apply(table, v1, usize::MAX);
                    for (n, xn) in &x.amps {
                        let f = target.amplitude(n);
                        if f == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let en = table.energy(n);
                        let key = (j1, j2, ((en - ep) * 1e12).round() as i64, ((ep - em) * 1e12).round() as i64);
                        let i = *cache
                            .entry(key)
                            .or_insert_with(|| pair_integral(d1, d2, en - ep, ep - em, window, panels, order));
                        a[2].add(f.conj() * im * l1 * l2 * xn * wp * i * ext(n, m));
                    }
                }
            }
        }
    }
    [a[0].value(), a[1].value(), a[2].value()]
}
