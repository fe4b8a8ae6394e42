use super::*;
use crate::lattice::{CavityField, ModeIndex};
use crate::numeric::{composite_gauss_legendre, CNeumaier};
use crate::oracle::{detector_coupling, transition_amplitudes, FockVector, Ladder, ModeTable, OperatorSum};
use crate::profile::{chi, profile_fourier, DetectorSpec, Model, SpatialProfile, Switching};
use crate::response::{vep_model1_gaussian_switch, SumOptions};
use crate::spinor::Spin;
use crate::wick::{render_terms, FieldModes};
use crate::Complex64;

fn l(i: i64) -> ModeIndex {
    ModeIndex::new(&[i]).unwrap()
}

fn field_for(model: Model, length: f64) -> CavityField {
    let mass = if model == Model::Spinor { 0.7 } else { 0.5 };
    CavityField::new(1, length, mass, model.field_kind()).unwrap()
}

fn det_for(model: Model, x0: f64) -> DetectorSpec {
    DetectorSpec::new(model, 1.0, 0.1, Switching::gaussian(0.5).unwrap(), SpatialProfile::gaussian([0.0, 0.0, x0], 0.3).unwrap()).unwrap()
}

fn g() -> ExternalState {
    ExternalState::ground(1)
}

fn e() -> ExternalState {
    ExternalState::ground(1).with_level(0, Level::Excited)
}

fn a(i: i64) -> Quantum {
    Quantum::particle(l(i))
}

fn b(i: i64) -> Quantum {
    Quantum::antiparticle(l(i))
}

// ---- enumeration ----

#[test]
fn model1_vacuum_loop_is_one_diagram() {
    let d = enumerate_diagrams(Model::Linear, 2, &g(), &g(), 1).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].symmetry_factor, 1);
    assert!(d[0].structure_violations().is_empty());
}

#[test]
fn model2_four_quanta_out() {
    let out = g().with_quantum(a(1)).with_quantum(a(2)).with_quantum(a(-1)).with_quantum(a(-2));
    let d = enumerate_diagrams(Model::RealQuadratic, 2, &g(), &out, 1).unwrap();
    assert_eq!(d.len(), 6);
    assert!(d.iter().all(|x| x.symmetry_factor == 4));
    assert_eq!(d.iter().map(|x| x.symmetry_factor).sum::<usize>(), 24);
    assert_eq!(contraction_count(Model::RealQuadratic, 2, &g(), &out, 1).unwrap(), 24);
    for x in &d {
        assert!(x.structure_violations().is_empty(), "{:?}", x.structure_violations());
    }
}

#[test]
fn model3_two_pairs_out() {
    let out = g().with_quantum(a(1)).with_quantum(a(2)).with_quantum(b(1)).with_quantum(b(2));
    let d = enumerate_diagrams(Model::ComplexQuadratic, 2, &g(), &out, 1).unwrap();
    assert_eq!(d.len(), 4);
    assert!(d.iter().all(|x| x.symmetry_factor == 1 && x.structure_violations().is_empty()));
}

#[test]
fn model4_pair_out() {
    let out = g().with_quantum(a(1).with_spin(Spin::Up)).with_quantum(b(2).with_spin(Spin::Down));
    let d = enumerate_diagrams(Model::Spinor, 2, &g(), &out, 1).unwrap();
    assert_eq!(d.len(), 2);
    assert!(d.iter().all(|x| x.structure_violations().is_empty()));
    // Charge flows through: every spinor line is directed.
    assert!(d.iter().all(|x| x.edges.iter().all(|e| e.kind != LineKind::Spinor || e.directed)));
}

fn bijection_suite() -> Vec<(Model, usize, ExternalState, ExternalState, u32)> {
    let sp = |q: Quantum, s| q.with_spin(s);
    vec![
        (Model::Linear, 1, g(), e().with_quantum(a(1)), 1),
        (Model::Linear, 2, g(), g().with_quantum(a(1)).with_quantum(a(1)), 1),
        (Model::Linear, 2, e(), e(), 1),
        (Model::Linear, 2, ExternalState::ground(2).with_level(0, Level::Excited), ExternalState::ground(2).with_level(1, Level::Excited), 2),
        (Model::RealQuadratic, 1, g(), e().with_quantum(a(1)).with_quantum(a(2)), 1),
        (Model::RealQuadratic, 2, g().with_quantum(a(1)), g().with_quantum(a(2)), 1),
        (Model::RealQuadratic, 2, g(), g(), 1),
        (Model::ComplexQuadratic, 2, g().with_quantum(a(1)), g().with_quantum(a(1)), 1),
        (Model::ComplexQuadratic, 2, g(), g().with_quantum(a(1)).with_quantum(b(1)), 1),
        (Model::Spinor, 2, g(), g(), 1),
        (Model::Spinor, 2, g().with_quantum(sp(a(1), Spin::Up)), g().with_quantum(sp(a(1), Spin::Up)), 1),
        (Model::Spinor, 1, g(), e().with_quantum(sp(a(1), Spin::Up)).with_quantum(sp(b(2), Spin::Down)), 1),
    ]
}

#[test]
fn symmetry_factors_add_up_to_contraction_count() {
    for (model, order, i, o, n) in bijection_suite() {
        let d = enumerate_diagrams(model, order, &i, &o, n).unwrap();
        let total: usize = d.iter().map(|x| x.symmetry_factor).sum();
        assert_eq!(total, contraction_count(model, order, &i, &o, n).unwrap(), "{model:?} order {order}");
        for x in &d {
            assert!(x.structure_violations().is_empty(), "{model:?}: {:?}", x.structure_violations());
        }
    }
}

#[test]
fn odd_orders_alone_flip_the_detector() {
    for model in Model::ALL {
        let quanta: Vec<Quantum> = match model {
            Model::Linear => vec![a(1)],
            Model::RealQuadratic => vec![a(1), a(2)],
            Model::ComplexQuadratic => vec![a(1), b(2)],
            Model::Spinor => vec![a(1).with_spin(Spin::Up), b(2).with_spin(Spin::Up)],
        };
        let mut out = g();
        out.quanta = quanta;
        assert!(enumerate_diagrams(model, 1, &g(), &out, 1).unwrap().is_empty(), "{model:?}");
        assert!(enumerate_diagrams(model, 2, &g(), &e(), 1).unwrap().is_empty(), "{model:?}");
        assert!(enumerate_diagrams(model, 1, &g(), &g(), 1).unwrap().is_empty(), "{model:?}");
    }
}

#[test]
fn external_state_checks() {
    let bad = g().with_quantum(a(1).with_spin(Spin::Up)).with_quantum(a(1).with_spin(Spin::Up));
    assert!(matches!(enumerate_diagrams(Model::Spinor, 1, &g(), &bad, 1), Err(crate::Error::IncompatibleState(_))));
    assert!(enumerate_diagrams(Model::Linear, 1, &g(), &e().with_quantum(b(1)), 1).is_err());
    assert!(enumerate_diagrams(Model::Linear, 1, &g(), &e().with_quantum(a(1).with_spin(Spin::Up)), 1).is_err());
    assert!(enumerate_diagrams(Model::Spinor, 1, &g(), &e().with_quantum(a(1)), 1).is_err());
    assert!(enumerate_diagrams(Model::Linear, 1, &g(), &ExternalState::ground(2), 1).is_err());
    // Repeated bosons are allowed.
    assert!(enumerate_diagrams(Model::RealQuadratic, 1, &g(), &e().with_quantum(a(1)).with_quantum(a(1)), 1).is_ok());
}

#[test]
fn adjacency_text_of_the_vacuum_loop() {
    let d = enumerate_diagrams(Model::Linear, 2, &g(), &g(), 1).unwrap();
    let want = "diagram model=1 order=2 symmetry=1 sign=+1\n\
                vertex v1 detector=0\n\
                vertex v2 detector=0\n\
                edge detector0 v1 -- v2\n\
                edge scalar v1 -- v2\n\
                end\n";
    assert_eq!(adjacency_listing(&d), want);
    let out = g().with_quantum(a(1).with_spin(Spin::Up)).with_quantum(b(2).with_spin(Spin::Down));
    let d = enumerate_diagrams(Model::Spinor, 2, &g(), &out, 1).unwrap();
    let text = d[0].to_adjacency();
    assert!(text.contains("vertex v1 detector=0 index=A1"), "{text}");
    assert!(text.contains("leg L1 out b(2)↓") || text.contains("leg L1 out b(2)"), "{text}");
    assert!(text.contains("edge spinor"), "{text}");
}

#[test]
fn spinor_vacuum_loop_renders_with_minus_sign() {
    let (word, _, _) = process_word(Model::Spinor, &[0, 0], &g(), &g());
    let terms = render_terms(&word).unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0].sign, -1, "{:?}", terms[0]);
}

// ---- leg factors ----

#[test]
fn leg_factor_examples() {
    let f = field_for(Model::Linear, 3.0);
    let gaps = [(0u32, 1.3)].into_iter().collect();
    let leg = ExternalLeg {
        outgoing: true,
        kind: LegKind::Field(a(2)),
    };
    let w = f.energy(&f.momentum(&l(2)));
    let got = leg_factor(&leg, &f, &gaps, 0.7).unwrap().scalar().unwrap();
    let want = Complex64::from_polar((2.0 * w * 3.0_f64).sqrt().recip(), -w * 0.7);
    assert!((got - want).norm() < 1e-15);
    // Excited detector leaving at t and entering at t0.
    let out = leg_factor(&ExternalLeg { outgoing: true, kind: LegKind::Detector(0) }, &f, &gaps, 2.0).unwrap();
    let inn = leg_factor(&ExternalLeg { outgoing: false, kind: LegKind::Detector(0) }, &f, &gaps, -0.5).unwrap();
    let through = out.scalar().unwrap() * inn.scalar().unwrap();
    assert!((through - through_line_factor(1.3, 2.0, -0.5)).norm() < 1e-15);
    // Massless spinor legs carry L^{−n/2}.
    let fs = CavityField::new(1, 4.0, 0.0, crate::FieldKind::Spinor).unwrap();
    let leg = ExternalLeg {
        outgoing: false,
        kind: LegKind::Field(a(1).with_spin(Spin::Up)),
    };
    match leg_factor(&leg, &fs, &gaps, 0.0).unwrap() {
        LegFactor::Spinor(u) => {
            let want = crate::spinor::spinor_u(&fs.momentum(&l(1)), Spin::Up, &fs) * Complex64::from(0.5);
            assert!((u - want).norm() < 1e-15);
        }
        _ => panic!("spinor leg"),
    }
}

// ---- amplitudes against the Fock oracle ----

fn oracle_table(fm: &FieldModes, dets: &[DetectorSpec]) -> ModeTable {
    let mut t = ModeTable::new();
    t.add_field(0, fm).unwrap();
    for (i, d) in dets.iter().enumerate() {
        t.add_detector(i as u32, d.gap).unwrap();
    }
    t
}

fn fock_state(table: &ModeTable, s: &ExternalState, kind: crate::FieldKind) -> FockVector {
    let mut v = FockVector::vacuum(table.len());
    for sym in s.creators().iter().rev() {
        let mode = match sym {
            crate::wick::OperatorSymbol::Ladder { charge, mode, spin, .. } => table.field_mode(0, *charge, *mode, *spin).unwrap(),
            crate::wick::OperatorSymbol::Sigma { detector, .. } => table.detector(*detector).unwrap(),
            _ => unreachable!(),
        };
        v = v.apply(table, &OperatorSum::single(Ladder::new(mode, true)), usize::MAX);
    }
    let n = s.normalization(kind);
    for z in v.amps.values_mut() {
        *z *= n;
    }
    v
}

fn oracle_amplitude(model: Model, order: usize, i: &ExternalState, o: &ExternalState, field: &CavityField, dets: &[DetectorSpec], cutoff: i64) -> Complex64 {
    let fm = FieldModes::ball(field.clone(), cutoff);
    let table = oracle_table(&fm, dets);
    let couplings: Vec<(OperatorSum, DetectorSpec)> = dets
        .iter()
        .enumerate()
        .map(|(id, d)| (detector_coupling(&table, &fm, id as u32, d, true).unwrap(), *d))
        .collect();
    let kind = model.field_kind();
    let window = common_window(dets.iter().map(|d| &d.switching));
    transition_amplitudes(&table, &couplings, &fock_state(&table, i, kind), &fock_state(&table, o, kind), window, 16, 16)[order]
}

fn assert_matches_oracle(model: Model, order: usize, i: &ExternalState, o: &ExternalState, dets: &[DetectorSpec]) {
    let field = field_for(model, 6.0);
    let cutoff = 2;
    let got = process_amplitude(model, order, i, o, &field, dets, cutoff, &QuadOptions::default()).unwrap();
    let want = oracle_amplitude(model, order, i, o, &field, dets, cutoff);
    let scale = want.norm().max(1e-14);
    assert!(want.norm() > 1e-9, "{model:?} order {order}: oracle amplitude vanishes ({want})");
    assert!(
        (got.value - want).norm() < 1e-9 * scale,
        "{model:?} order {order} {i:?} -> {o:?}: {} vs {want} (quad error {:e})",
        got.value,
        got.quad_error
    );
}

#[test]
fn scalar_amplitudes_match_oracle() {
    let d = [det_for(Model::Linear, 0.4)];
    assert_matches_oracle(Model::Linear, 1, &g(), &e().with_quantum(a(1)), &d);
    assert_matches_oracle(Model::Linear, 2, &g(), &g().with_quantum(a(1)).with_quantum(a(-2)), &d);
    assert_matches_oracle(Model::Linear, 2, &g(), &g().with_quantum(a(2)).with_quantum(a(2)), &d);
    assert_matches_oracle(Model::Linear, 2, &g(), &g(), &d);
    assert_matches_oracle(Model::Linear, 2, &e(), &e(), &d);
    assert_matches_oracle(Model::Linear, 2, &g().with_quantum(a(1)), &g().with_quantum(a(-1)), &d);
}

#[test]
fn quadratic_amplitudes_match_oracle() {
    let d2 = [det_for(Model::RealQuadratic, 0.4)];
    assert_matches_oracle(Model::RealQuadratic, 1, &g(), &e().with_quantum(a(1)).with_quantum(a(1)), &d2);
    assert_matches_oracle(Model::RealQuadratic, 1, &g(), &e().with_quantum(a(1)).with_quantum(a(-2)), &d2);
    assert_matches_oracle(Model::RealQuadratic, 2, &g(), &g().with_quantum(a(1)).with_quantum(a(-1)), &d2);
    assert_matches_oracle(Model::RealQuadratic, 2, &g(), &g(), &d2);
    let d3 = [det_for(Model::ComplexQuadratic, 0.4)];
    assert_matches_oracle(Model::ComplexQuadratic, 1, &g(), &e().with_quantum(a(1)).with_quantum(b(2)), &d3);
    assert_matches_oracle(Model::ComplexQuadratic, 2, &g(), &g().with_quantum(a(1)).with_quantum(b(-1)), &d3);
    assert_matches_oracle(Model::ComplexQuadratic, 2, &g(), &g(), &d3);
    assert_matches_oracle(Model::ComplexQuadratic, 2, &g().with_quantum(b(1)), &g().with_quantum(b(2)), &d3);
}

#[test]
fn spinor_amplitudes_match_oracle() {
    let d = [det_for(Model::Spinor, 0.4)];
    let up = |q: Quantum| q.with_spin(Spin::Up);
    let dn = |q: Quantum| q.with_spin(Spin::Down);
    assert_matches_oracle(Model::Spinor, 1, &g(), &e().with_quantum(dn(a(1))).with_quantum(dn(b(2))), &d);
    assert_matches_oracle(Model::Spinor, 1, &g(), &e().with_quantum(up(b(2))).with_quantum(up(a(1))), &d);
    assert_matches_oracle(Model::Spinor, 2, &g(), &g().with_quantum(up(a(1))).with_quantum(up(b(-1))), &d);
    assert_matches_oracle(Model::Spinor, 2, &g(), &g(), &d);
    assert_matches_oracle(Model::Spinor, 2, &g().with_quantum(up(a(1))), &g().with_quantum(up(a(2))), &d);
    assert_matches_oracle(Model::Spinor, 2, &g().with_quantum(dn(a(1))), &g().with_quantum(dn(a(-1))), &d);
    assert_matches_oracle(Model::Spinor, 2, &g().with_quantum(up(b(1))), &g().with_quantum(up(b(1))), &d);
}

#[test]
fn two_detector_swap_matches_oracle() {
    for model in [Model::ComplexQuadratic, Model::Spinor] {
        let field = field_for(model, 6.0);
        let da = det_for(model, 0.4);
        let db = DetectorSpec::new(model, 0.7, 0.2, Switching::gaussian(0.6).unwrap(), SpatialProfile::gaussian([0.0, 0.0, -0.5], 0.25).unwrap()).unwrap();
        let (p, ap) = if model == Model::Spinor { (a(1).with_spin(Spin::Down), b(-2).with_spin(Spin::Down)) } else { (a(1), b(-2)) };
        let got = two_detector_swap(&field, &da, &db, p, ap, 2, &QuadOptions::default()).unwrap();
        let i = ExternalState::ground(2).with_level(0, Level::Excited);
        let o = ExternalState::ground(2).with_level(1, Level::Excited).with_quantum(p).with_quantum(ap);
        let want = oracle_amplitude(model, 2, &i, &o, &field, &[da, db], 2);
        assert!(want.norm() > 1e-9);
        assert!((got.value - want).norm() < 1e-9 * want.norm(), "{model:?}: {} vs {want}", got.value);
        // No coupling on B, no swap.
        let off = two_detector_swap(&field, &da, &db.with_coupling(0.0), p, ap, 2, &QuadOptions::default()).unwrap();
        assert_eq!(off.value, Complex64::new(0.0, 0.0));
    }
}

#[test]
fn coincident_detectors_swap_symmetrically() {
    let model = Model::ComplexQuadratic;
    let field = field_for(model, 6.0);
    let d = det_for(model, 0.2);
    let q = QuadOptions::default();
    let ab = two_detector_swap(&field, &d, &d, a(1), b(2), 2, &q).unwrap().value;
    let i = ExternalState::ground(2).with_level(0, Level::Excited);
    let o = ExternalState::ground(2).with_level(1, Level::Excited).with_quantum(a(1)).with_quantum(b(2));
    let want = oracle_amplitude(model, 2, &i, &o, &field, &[d, d], 2);
    assert!((ab - want).norm() < 1e-9 * want.norm());
    // With both detectors identical the process equals its mirror image.
    let i2 = ExternalState::ground(2).with_level(1, Level::Excited);
    let o2 = ExternalState::ground(2).with_level(0, Level::Excited).with_quantum(a(1)).with_quantum(b(2));
    let ba = process_amplitude(model, 2, &i2, &o2, &field, &[d, d], 2, &q).unwrap().value;
    assert!((ab - ba).norm() < 1e-12 * ab.norm(), "{ab} vs {ba}");
}

// Sampled regression data. Past half a switching light-cone the two leg
// orderings interfere and the decrease stops being monotone.
#[test]
fn swap_amplitude_falls_with_separation() {
    let model = Model::ComplexQuadratic;
    let field = CavityField::new(1, 20.0, 0.0, model.field_kind()).unwrap();
    let sw = Switching::gaussian(0.3).unwrap();
    let at = |x: f64| DetectorSpec::new(model, 1.0, 0.1, sw, SpatialProfile::gaussian([0.0, 0.0, x], 0.05).unwrap()).unwrap();
    let q = QuadOptions::default();
    let mags: Vec<f64> = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]
        .iter()
        .map(|&x| two_detector_swap(&field, &at(0.0), &at(x), a(1), b(1), 8, &q).unwrap().value.norm())
        .collect();
    for w in mags.windows(2) {
        assert!(w[1] < w[0], "{mags:?}");
    }
}

// ---- structure of specific amplitudes ----

#[test]
fn complex_pair_is_a_quarter_of_real_pair() {
    let f2 = field_for(Model::RealQuadratic, 6.0);
    let f3 = field_for(Model::ComplexQuadratic, 6.0);
    let q = QuadOptions::default();
    let a2 = process_amplitude(Model::RealQuadratic, 2, &g(), &g().with_quantum(a(1)).with_quantum(a(-2)), &f2, &[det_for(Model::RealQuadratic, 0.3)], 3, &q).unwrap();
    let a3 = process_amplitude(Model::ComplexQuadratic, 2, &g(), &g().with_quantum(a(1)).with_quantum(b(-2)), &f3, &[det_for(Model::ComplexQuadratic, 0.3)], 3, &q).unwrap();
    assert!(a2.value.norm() > 1e-8);
    assert!((a3.value - 0.25 * a2.value).norm() < 1e-13 * a2.value.norm(), "{} vs {}", a3.value, a2.value);
}

#[test]
fn zero_coupling_gives_zero() {
    let d = det_for(Model::Linear, 0.0).with_coupling(0.0);
    let f = field_for(Model::Linear, 6.0);
    let q = QuadOptions::default();
    for order in 1..=2 {
        let out = if order == 1 { e().with_quantum(a(1)) } else { g().with_quantum(a(1)).with_quantum(a(2)) };
        let amp = process_amplitude(Model::Linear, order, &g(), &out, &f, &[d], 3, &q).unwrap();
        assert_eq!(amp.value, Complex64::new(0.0, 0.0));
    }
    assert_eq!(vnrp_second_order(&f, &d, 4, &q).unwrap().probability, 1.0);
}

#[test]
fn third_order_is_enumerated_but_not_evaluated() {
    let d = enumerate_diagrams(Model::Linear, 3, &g(), &e().with_quantum(a(1)), 1).unwrap();
    assert!(!d.is_empty());
    let f = field_for(Model::Linear, 6.0);
    let r = amplitude(&d[0], &f, &[det_for(Model::Linear, 0.0)], 2, &QuadOptions::default());
    assert!(matches!(r, Err(crate::Error::NotImplemented(_))));
}

/// Direct quadrature of `∫_{t₁>t₂} χχ e^{−iΩ(t₁−t₂)} [φ̄_k(1)φ̄_p(2) + φ̄_p(1)φ̄_k(2)]`
/// on the Duffy square `t₂ = a + (t₁ − a)u`.
#[test]
fn model1_pair_amplitude_matches_direct_quadrature() {
    let f = field_for(Model::Linear, 6.0);
    let d = det_for(Model::Linear, 0.4);
    let (k, p) = (l(1), l(-2));
    let amp = process_amplitude(Model::Linear, 2, &g(), &g().with_quantum(Quantum::particle(k)).with_quantum(Quantum::particle(p)), &f, &[d], 2, &QuadOptions::default()).unwrap();
    let (t0, tf) = d.switching.support();
    let leg = |m: &ModeIndex| {
        let kk = f.momentum(m);
        let w = f.energy(&kk);
        (w, profile_fourier(&d.profile, &kk) / (2.0 * w * f.volume()).sqrt())
    };
    let ((wk, fk), (wp, fp)) = (leg(&k), leg(&p));
    let outer = composite_gauss_legendre(t0, tf, 64, 16);
    let inner = composite_gauss_legendre(0.0, 1.0, 64, 16);
    let mut acc = CNeumaier::new();
    for (&t1, &w1) in outer.nodes.iter().zip(&outer.weights) {
        for (&u, &w2) in inner.nodes.iter().zip(&inner.weights) {
            let t2 = t0 + (t1 - t0) * u;
            let jac = t1 - t0;
            let field_part = fk * fp * (Complex64::from_polar(1.0, wk * t1 + wp * t2) + Complex64::from_polar(1.0, wp * t1 + wk * t2));
            acc.add(w1 * w2 * jac * chi(&d.switching, t1) * chi(&d.switching, t2) * Complex64::from_polar(1.0, -d.gap * (t1 - t2)) * field_part);
        }
    }
    let lam = Complex64::new(0.0, -d.coupling);
    let want = lam * lam * acc.value() * Complex64::from_polar(1.0, -(wk + wp) * tf);
    assert!((amp.value - want).norm() < 1e-8 * want.norm(), "{} vs {want}", amp.value);
}

/// Dawson's integral `e^{−x²}∫₀ˣ e^{s²}ds` by its Taylor series.
fn dawson(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= -2.0 * x * x / (2.0 * n + 1.0);
        sum += term;
    }
    sum
}

/// For Gaussian switching `∫_{t₁>t₂} χχ e^{−iE(t₁−t₂)} = πT² e^{−E²T²} − 2i√π T² D(ET)`,
/// the residue form of the frequency integral.
#[test]
fn vacuum_loop_matches_frequency_form() {
    let t = 1.0;
    let f = CavityField::new(1, 10.0, 0.0, crate::FieldKind::RealScalar).unwrap();
    let d = DetectorSpec::new(Model::Linear, 0.3, 0.1, Switching::gaussian(t).unwrap(), SpatialProfile::pointlike_at_origin()).unwrap();
    let cutoff = 4;
    let amp = vnrp_second_order(&f, &d, cutoff, &QuadOptions::default()).unwrap().second_order;
    let mut want = CNeumaier::new();
    for m in crate::lattice::sup_ball(1, cutoff) {
        let w = f.energy(&f.momentum(&m));
        let e = d.gap + w;
        let i = Complex64::new(std::f64::consts::PI * t * t * (-e * e * t * t).exp(), -2.0 * std::f64::consts::PI.sqrt() * t * t * dawson(e * t));
        want.add(-d.coupling * d.coupling / (2.0 * w * f.volume()) * i);
    }
    let want = want.value();
    assert!((amp.value - want).norm() < 1e-10 * want.norm(), "{} vs {want}", amp.value);
    // Pinned value of the closed form.
    assert!((want.re - -0.0023482031893015828).abs() < 1e-15 && (want.im - 0.004988681783360644).abs() < 1e-15, "{want}");
}

#[test]
fn vnrp_complements_vep() {
    let f = CavityField::new(1, 8.0, 0.0, crate::FieldKind::RealScalar).unwrap();
    let d = DetectorSpec::new(Model::Linear, 1.0, 1e-3, Switching::gaussian(1.0).unwrap(), SpatialProfile::pointlike_at_origin()).unwrap();
    let cutoff = 12;
    let v = vnrp_second_order(&f, &d, cutoff, &QuadOptions::default()).unwrap();
    let vep = vep_model1_gaussian_switch(&f, &d, &SumOptions::new((cutoff as u64 - 3..=cutoff as u64).collect(), 1e-12).unwrap()).unwrap();
    let p = *vep.values.last().unwrap();
    assert!(((1.0 - v.probability) - p).abs() < 1e-6 * p, "{} vs {p}", 1.0 - v.probability);
}

#[test]
fn unitarity_at_second_order() {
    let q = QuadOptions::default();
    for model in Model::ALL {
        let f = CavityField::new(1, 8.0, if model == Model::Spinor { 0.4 } else { 0.0 }, model.field_kind()).unwrap();
        let d = DetectorSpec::new(model, 1.0, 0.1, Switching::gaussian(1.0).unwrap(), SpatialProfile::gaussian([0.0; 3], 0.2).unwrap()).unwrap();
        let c = if model == Model::Linear { 10 } else { 5 };
        let u = unitarity_check(&f, &d, c, c, &q).unwrap();
        let lam2 = d.coupling * d.coupling;
        assert!(u.first_order_prob > 1e-4 * lam2, "{model:?}: {}", u.first_order_prob);
        assert!(u.residual < 1e-8 * lam2, "{model:?}: residual {:e} (p1 {:e})", u.residual, u.first_order_prob);
        let off = unitarity_check(&f, &d, 1, c, &q).unwrap();
        assert!(off.residual > 100.0 * u.residual.max(1e-16), "{model:?}: mismatched {:e}", off.residual);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_quantum(model: Model) -> impl Strategy<Value = Quantum> {
        (prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2)], any::<bool>(), any::<bool>()).prop_map(move |(i, anti, up)| {
            let q = if anti && model.field_kind() != crate::FieldKind::RealScalar { b(i) } else { a(i) };
            if model == Model::Spinor {
                q.with_spin(if up { Spin::Up } else { Spin::Down })
            } else {
                q
            }
        })
    }

    fn arb_process() -> impl Strategy<Value = (Model, usize, ExternalState, ExternalState)> {
        (0usize..4, 1usize..=2).prop_flat_map(|(m, order)| {
            let model = Model::ALL[m];
            (
                Just(model),
                Just(order),
                prop::collection::vec(arb_quantum(model), 0..=1),
                prop::collection::vec(arb_quantum(model), 0..=3),
                any::<bool>(),
                any::<bool>(),
            )
                .prop_map(|(model, order, qi, qo, ei, eo)| {
                    let mut i = if ei { e() } else { g() };
                    let mut o = if eo { e() } else { g() };
                    i.quanta = qi;
                    o.quanta = qo;
                    (model, order, i, o)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn symmetry_factors_partition_contractions((model, order, i, o) in arb_process()) {
            prop_assume!(i.validate(model, 1).is_ok() && o.validate(model, 1).is_ok());
            let d = enumerate_diagrams(model, order, &i, &o, 1).unwrap();
            let total: usize = d.iter().map(|x| x.symmetry_factor).sum();
            prop_assert_eq!(total, contraction_count(model, order, &i, &o, 1).unwrap());
            for x in &d {
                prop_assert!(x.structure_violations().is_empty());
            }
            // A detector flip needs an odd number of vertices.
            if (i.level(0) != o.level(0)) != (order % 2 == 1) {
                prop_assert!(d.is_empty());
            }
        }

        #[test]
        fn amplitudes_scale_with_coupling_power(lam in 0.01f64..1.0, order in 1usize..=2) {
            let f = field_for(Model::Linear, 6.0);
            let d = det_for(Model::Linear, 0.2).with_coupling(lam);
            let out = if order == 1 { e().with_quantum(a(1)) } else { g().with_quantum(a(1)).with_quantum(a(-2)) };
            let q = QuadOptions::default();
            let x = process_amplitude(Model::Linear, order, &g(), &out, &f, &[d], 2, &q).unwrap().value;
            let y = process_amplitude(Model::Linear, order, &g(), &out, &f, &[d.with_coupling(2.0 * lam)], 2, &q).unwrap().value;
            let k = 2f64.powi(order as i32);
            prop_assert!((y - x * k).norm() <= 1e-13 * y.norm());
        }
    }
}
