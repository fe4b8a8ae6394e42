//! Time-domain evaluation of diagrams through second order.

use super::diagram::{enumerate_diagrams, Diagram, Endpoint};
use super::state::{leg_energy, leg_phase, ExternalState, Level, Quantum, FIELD};
use super::time::{common_window, ordered_integral, single_integral, QuadOptions};
use crate::error::{Error, Result};
use crate::lattice::{sup_ball, CavityField, Vec3};
use crate::numeric::{CNeumaier, Neumaier};
use crate::profile::{profile_fourier, DetectorSpec, Model};
use crate::spinor::{Charge, Spin};
use crate::wick::{ContractionValue, FieldModes, OperatorSymbol, Point, WickConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// An amplitude with its outer-shell contribution and quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Amplitude {
    pub value: Complex64,
    /// Magnitude of the part coming from loop modes on the outermost shell.
    pub tail: f64,
    /// Change of the value under doubling of the time nodes.
    pub quad_error: f64,
}

impl std::ops::Add for Amplitude {
    type Output = Amplitude;
    fn add(self, o: Amplitude) -> Amplitude {
        Amplitude {
            value: self.value + o.value,
            tail: self.tail + o.tail,
            quad_error: self.quad_error + o.quad_error,
        }
    }
}

fn sum_amplitudes(parts: Vec<Amplitude>) -> Amplitude {
    let mut v = CNeumaier::new();
    let mut tail = Neumaier::new();
    let mut err = Neumaier::new();
    for p in parts {
        v.add(p.value);
        tail.add(p.tail);
        err.add(p.quad_error);
    }
    Amplitude {
        value: v.value(),
        tail: tail.value(),
        quad_error: err.value(),
    }
}

/// One mode choice of a contracted pair: its value at the origin and the
/// frequency and momentum it feeds into each vertex.
struct LineTerm {
    coef: ContractionValue,
    nu: Vec<(usize, f64)>,
    q: Vec<(usize, Vec3)>,
    outer: bool,
}

fn at_origin(sym: &OperatorSymbol) -> OperatorSymbol {
    let mut s = sym.clone();
    match &mut s {
        OperatorSymbol::Scalar { point, .. } | OperatorSymbol::Spinor { point, .. } => *point = Point::new(0.0, &[]),
        OperatorSymbol::Monopole { time, .. } => *time = 0.0,
        _ => {}
    }
    s
}

fn neg(v: &Vec3) -> Vec3 {
    [-v[0], -v[1], -v[2]]
}

struct Accumulator {
    /// Quantized vertex frequencies → (frequencies, coefficient, outer-shell coefficient).
    keys: BTreeMap<Vec<i64>, (Vec<f64>, CNeumaier, CNeumaier)>,
}

fn check_setup(diagram: &Diagram, field: &CavityField, dets: &[DetectorSpec]) -> Result<()> {
    diagram.model.check_field(field)?;
    for v in &diagram.vertices {
        let d = dets
            .get(v.detector as usize)
            .ok_or_else(|| Error::IncompatibleState(format!("vertex on detector {} of {}", v.detector, dets.len())))?;
        if d.model != diagram.model {
            return Err(Error::IncompatibleState(format!(
                "detector {} couples via model {}, diagram is model {}",
                v.detector,
                d.model.id(),
                diagram.model.id()
            )));
        }
    }
    for leg in &diagram.legs {
        if let super::state::LegKind::Field(q) = leg.kind {
            if q.mode.dim() != field.n() {
                return Err(Error::IncompatibleState(format!("leg {leg} in a {}-dimensional cavity", field.n())));
            }
        }
    }
    Ok(())
}

/// `sign · S · Π(−iλ) · ∫_{t₁>⋯>t_k} Πχ · Π f̃ ⋯` for one diagram, with loop
/// modes `|l|_∞ ≤ cutoff` and detectors indexed by id.
pub fn amplitude(diagram: &Diagram, field: &CavityField, dets: &[DetectorSpec], cutoff: i64, quad: &QuadOptions) -> Result<Amplitude> {
    if diagram.order > 2 {
        return Err(Error::NotImplemented(format!("amplitudes of order {} (enumeration is available)", diagram.order)));
    }
    check_setup(diagram, field, dets)?;
    let gaps: BTreeMap<u32, f64> = dets.iter().enumerate().map(|(d, s)| (d as u32, s.gap)).collect();
    let mut cfg = WickConfig::new().with_field(FIELD, FieldModes::new(field.clone(), Vec::new())?);
    for (d, g) in &gaps {
        cfg = cfg.with_detector(*d, *g);
    }
    let word = &diagram.word;
    let flat = word.flatten();
    let ends = &diagram.ends;
    let loop_modes = sup_ball(field.n(), cutoff);

    let mut lines: Vec<Vec<LineTerm>> = Vec::new();
    for &(i, j) in &diagram.pairing.pairs {
        let (a, b) = (at_origin(&flat[i].symbol), at_origin(&flat[j].symbol));
        let leg_data = |l: usize| -> Result<(f64, Option<Vec3>)> {
            let leg = &diagram.legs[l];
            let e = leg_energy(leg, field, &gaps)?;
            let k = match leg.kind {
                super::state::LegKind::Field(q) => Some(field.momentum(&q.mode)),
                super::state::LegKind::Detector(_) => None,
            };
            Ok((e, k))
        };
        let terms = match (ends[i], ends[j]) {
            (Endpoint::Leg(_), Endpoint::Leg(_)) => vec![LineTerm {
                coef: crate::wick::values::written_value(&a, &b, word, &cfg)?,
                nu: vec![],
                q: vec![],
                outer: false,
            }],
            (Endpoint::Leg(l), Endpoint::Vertex(v)) | (Endpoint::Vertex(v), Endpoint::Leg(l)) => {
                let outgoing = matches!(ends[i], Endpoint::Leg(_));
                let (e, k) = leg_data(l)?;
                let s = if outgoing { 1.0 } else { -1.0 };
                vec![LineTerm {
                    coef: crate::wick::values::written_value(&a, &b, word, &cfg)?,
                    nu: vec![(v, s * e)],
                    q: k.map(|k| vec![(v, if outgoing { neg(&k) } else { k })]).unwrap_or_default(),
                    outer: false,
                }]
            }
            (Endpoint::Vertex(v), Endpoint::Vertex(w)) => {
                debug_assert!(v < w, "pairs run from the later vertex to the earlier one");
                if let OperatorSymbol::Monopole { detector, .. } = a {
                    let g = gaps[&detector];
                    vec![LineTerm {
                        coef: crate::wick::values::written_value(&a, &b, word, &cfg)?,
                        nu: vec![(v, -g), (w, g)],
                        q: vec![],
                        outer: false,
                    }]
                } else {
                    let mut out = Vec::with_capacity(loop_modes.len());
                    for l in &loop_modes {
                        let one = WickConfig::new().with_field(FIELD, FieldModes::new(field.clone(), vec![*l])?);
                        let k = field.momentum(l);
                        let om = field.energy(&k);
                        out.push(LineTerm {
                            coef: crate::wick::values::written_value(&a, &b, word, &one)?,
                            nu: vec![(v, -om), (w, om)],
                            q: vec![(v, k), (w, neg(&k))],
                            outer: l.sup_norm() == cutoff,
                        });
                    }
                    out
                }
            }
        };
        lines.push(terms);
    }

    // Spinor index of each flattened symbol: the vertex it sits on.
    let spinor_vertex: Vec<Option<usize>> = flat
        .iter()
        .zip(ends)
        .map(|(f, e)| match (&f.symbol, e) {
            (OperatorSymbol::Spinor { .. }, Endpoint::Vertex(v)) => Some(*v),
            _ => None,
        })
        .collect();
    let n_assign = if diagram.model == Model::Spinor { 1usize << (2 * diagram.order) } else { 1 };
    let profiles: Vec<_> = diagram.vertices.iter().map(|v| dets[v.detector as usize].profile).collect();

    let mut acc = Accumulator { keys: BTreeMap::new() };
    let mut choice = vec![0usize; lines.len()];
    loop {
        let mut nu = vec![0.0; diagram.order];
        let mut q = vec![[0.0; 3]; diagram.order];
        let mut outer = false;
        for (line, &c) in lines.iter().zip(&choice) {
            let t = &line[c];
            for &(v, x) in &t.nu {
                nu[v] += x;
            }
            for (v, k) in &t.q {
                for d in 0..3 {
                    q[*v][d] += k[d];
                }
            }
            outer |= t.outer;
        }
        let mut coef = CNeumaier::new();
        for assign in 0..n_assign {
            let idx = |i: usize| spinor_vertex[i].map_or(0, |v| (assign >> (2 * v)) & 3);
            let mut prod = Complex64::new(1.0, 0.0);
            for ((pi, pj), (line, &c)) in diagram.pairing.pairs.iter().zip(lines.iter().zip(&choice)) {
                prod *= line[c].coef.at(idx(*pi), idx(*pj));
            }
            coef.add(prod);
        }
        let mut c = coef.value();
        for (p, qv) in profiles.iter().zip(&q) {
            c *= profile_fourier(p, &neg(qv));
        }
        let key: Vec<i64> = nu.iter().map(|x| (x * 1e9).round() as i64).collect();
        let slot = acc
            .keys
            .entry(key)
            .or_insert_with(|| (nu.clone(), CNeumaier::new(), CNeumaier::new()));
        slot.1.add(c);
        if outer {
            slot.2.add(c);
        }
        // Next mode tuple.
        let mut p = 0;
        while p < lines.len() {
            choice[p] += 1;
            if choice[p] < lines[p].len() {
                break;
            }
            choice[p] = 0;
            p += 1;
        }
        if p == lines.len() {
            break;
        }
    }

    let switchings: Vec<_> = dets.iter().map(|d| d.switching).collect();
    let window = common_window(&switchings);
    let sw = |v: usize| &dets[diagram.vertices[v].detector as usize].switching;
    let fine = quad.doubled();
    let mut value = CNeumaier::new();
    let mut tail = CNeumaier::new();
    let mut err = CNeumaier::new();
    for (nu, c, ct) in acc.keys.values() {
        let (coarse_i, fine_i) = match diagram.order {
            0 => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            1 => {
                let i = single_integral(sw(0), nu[0]);
                (i, i)
            }
            _ => (
                ordered_integral(sw(0), sw(1), nu[0], nu[1], window, quad),
                ordered_integral(sw(0), sw(1), nu[0], nu[1], window, &fine),
            ),
        };
        value.add(c.value() * fine_i);
        tail.add(ct.value() * fine_i);
        err.add(c.value() * (fine_i - coarse_i));
    }

    let mut pref = Complex64::new(diagram.sign as f64 * diagram.symmetry_factor as f64 * diagram.normalization, 0.0);
    for v in &diagram.vertices {
        pref *= Complex64::new(0.0, -dets[v.detector as usize].coupling);
    }
    for leg in &diagram.legs {
        let e = leg_energy(leg, field, &gaps)?;
        pref *= leg_phase(leg, e, if leg.outgoing { window.1 } else { window.0 });
    }
    Ok(Amplitude {
        value: pref * value.value(),
        tail: (pref * tail.value()).norm(),
        quad_error: (pref * err.value()).norm(),
    })
}

/// Sum over all diagrams of a process.
#[allow(clippy::too_many_arguments)]
pub fn process_amplitude(
    model: Model,
    order: usize,
    in_state: &ExternalState,
    out_state: &ExternalState,
    field: &CavityField,
    dets: &[DetectorSpec],
    cutoff: i64,
    quad: &QuadOptions,
) -> Result<Amplitude> {
    let diagrams = enumerate_diagrams(model, order, in_state, out_state, dets.len() as u32)?;
    let parts = diagrams
        .par_iter()
        .map(|d| amplitude(d, field, dets, cutoff, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_amplitudes(parts))
}

/// Second-order no-response probability `1 + 2 Re A⁽²⁾_{0,g}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vnrp {
    pub probability: f64,
    pub second_order: Amplitude,
}

pub fn vnrp_second_order(field: &CavityField, det: &DetectorSpec, cutoff: i64, quad: &QuadOptions) -> Result<Vnrp> {
    let g = ExternalState::ground(1);
    let a2 = process_amplitude(det.model, 2, &g, &g, field, std::slice::from_ref(det), cutoff, quad)?;
    Ok(Vnrp {
        probability: 1.0 + 2.0 * a2.value.re,
        second_order: a2,
    })
}

/// Field contents reachable from the vacuum by one vertex, with modes in the
/// cutoff ball; each Fock state appears once.
pub fn first_order_final_states(model: Model, n: usize, cutoff: i64) -> Vec<Vec<Quantum>> {
    let ball = sup_ball(n, cutoff);
    let mut out = Vec::new();
    match model {
        Model::Linear => {
            for l in &ball {
                out.push(vec![Quantum::particle(*l)]);
            }
        }
        Model::RealQuadratic => {
            for (i, a) in ball.iter().enumerate() {
                for b in &ball[i..] {
                    out.push(vec![Quantum::particle(*a), Quantum::particle(*b)]);
                }
            }
        }
        Model::ComplexQuadratic => {
            for a in &ball {
                for b in &ball {
                    out.push(vec![Quantum::particle(*a), Quantum::antiparticle(*b)]);
                }
            }
        }
        Model::Spinor => {
            for a in &ball {
                for s in Spin::ALL {
                    for b in &ball {
                        for r in Spin::ALL {
                            out.push(vec![Quantum::particle(*a).with_spin(s), Quantum::antiparticle(*b).with_spin(r)]);
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCheck {
    /// `Σ_a |A⁽¹⁾_{a,e}|²` over final states with modes `|l|_∞ ≤ cutoff_first`.
    pub first_order_prob: f64,
    /// `A⁽²⁾_{0,g}` with loop modes `|l|_∞ ≤ cutoff_second`.
    pub second_order: Amplitude,
    /// `|Σ_a |A⁽¹⁾_{a,e}|² + 2 Re A⁽²⁾_{0,g}|`
    pub residual: f64,
}

pub fn unitarity_check(field: &CavityField, det: &DetectorSpec, cutoff_first: i64, cutoff_second: i64, quad: &QuadOptions) -> Result<UnitarityCheck> {
    det.model.check_field(field)?;
    let dets = std::slice::from_ref(det);
    let g = ExternalState::ground(1);
    let probs = first_order_final_states(det.model, field.n(), cutoff_first)
        .into_par_iter()
        .map(|quanta| {
            let out = ExternalState {
                detectors: [(0, Level::Excited)].into_iter().collect(),
                quanta,
            };
            process_amplitude(det.model, 1, &g, &out, field, dets, cutoff_first, quad).map(|a| a.value.norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;
    let p1: Neumaier = probs.into_iter().collect();
    let a2 = process_amplitude(det.model, 2, &g, &g, field, dets, cutoff_second, quad)?;
    Ok(UnitarityCheck {
        first_order_prob: p1.value(),
        second_order: a2,
        residual: (p1.value() + 2.0 * a2.value.re).abs(),
    })
}

/// Detector `a` (id 0) starts excited and detector `b` (id 1) in the ground
/// state; the amplitude to end with `b` excited, `a` in the ground state and
/// the pair `{particle, antiparticle}` in the field, both time orderings included.
pub fn two_detector_swap(field: &CavityField, det_a: &DetectorSpec, det_b: &DetectorSpec, particle: Quantum, antiparticle: Quantum, cutoff: i64, quad: &QuadOptions) -> Result<Amplitude> {
    let model = det_a.model;
    if det_b.model != model || !matches!(model, Model::ComplexQuadratic | Model::Spinor) {
        return Err(Error::NotApplicable("the swap process needs two detectors of model 3 or 4".into()));
    }
    if particle.charge != Charge::Particle || antiparticle.charge != Charge::Antiparticle {
        return Err(Error::IncompatibleState("expected one particle and one antiparticle".into()));
    }
    let in_state = ExternalState::ground(2).with_level(0, Level::Excited);
    let out_state = ExternalState::ground(2)
        .with_level(1, Level::Excited)
        .with_quantum(particle)
        .with_quantum(antiparticle);
    process_amplitude(model, 2, &in_state, &out_state, field, &[*det_a, *det_b], cutoff, quad)
}
