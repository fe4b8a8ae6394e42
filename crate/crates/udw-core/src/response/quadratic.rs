//! Quadratic couplings: real scalar (model 2), complex scalar (model 3) and
//! Dirac field (model 4).

use super::shells::{
    cumulative, decreasing_tail, double_shell_sums, double_shell_sums_1d_symmetric, power_tail, product_tail,
    single_shell_sums, theta_bound,
};
use super::{PartialSumSeries, SumOptions, VepBreakdown};
use crate::error::{invalid, Error, Result};
use crate::lattice::{dot, embed, CavityField, ModeIndex, Vec3};
use crate::profile::{profile_fourier_sq, time_fourier_sq, DetectorSpec, Model, SpatialProfile, Switching};
use std::f64::consts::PI;

/// Spin-summed pair weight of model 4,
/// `((ω_k+m)(ω_p+m)/ω_kω_p)·|k/(ω_k+m) − p/(ω_p+m)|²`; `2(1 − k̂·p̂)` when massless.
pub fn spinor_weight(k: &Vec3, p: &Vec3, field: &CavityField) -> f64 {
    if field.is_massless() {
        let (nk, np) = (dot(k, k).sqrt(), dot(p, p).sqrt());
        2.0 * (1.0 - dot(k, p) / (nk * np))
    } else {
        spinor_weight_massive_formula(k, p, field.mass())
    }
}

/// The massive expression evaluated as written, also at `m = 0`.
pub(crate) fn spinor_weight_massive_formula(k: &Vec3, p: &Vec3, m: f64) -> f64 {
    let wk = (dot(k, k) + m * m).sqrt();
    let wp = (dot(p, p) + m * m).sqrt();
    let (a, b) = (wk + m, wp + m);
    let d = [k[0] / a - p[0] / b, k[1] / a - p[1] / b, k[2] / a - p[2] / b];
    a * b / (wk * wp) * dot(&d, &d)
}

/// Prefactor of the pair-creation double sum.
///
/// Model 3 creates `a†_k b†_p` once per ordered pair. Model 2 creates
/// `a†_k a†_p` from both orderings of `:Φ²:`, which doubles the probability.
fn pair_prefactor(model: Model, field: &CavityField, lambda: f64) -> f64 {
    let l2n = field.volume().powi(2);
    match model {
        Model::RealQuadratic => lambda * lambda / (2.0 * l2n),
        Model::ComplexQuadratic => lambda * lambda / (4.0 * l2n),
        Model::Spinor => lambda * lambda / (2.0 * l2n),
        Model::Linear => 0.0,
    }
}

fn check(field: &CavityField, det: &DetectorSpec, opts: &SumOptions, models: &[Model]) -> Result<()> {
    if !models.contains(&det.model) {
        return Err(invalid("model", format!("model {} is not handled here", det.model.id())));
    }
    det.model.check_field(field)?;
    opts.validate()
}

/// Partial sums of the renormalized pair-creation term.
fn pair_series(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<PartialSumSeries> {
    let pref = pair_prefactor(det.model, field, det.coupling);
    let spinor = det.model == Model::Spinor;
    let max = opts.max_cutoff() as i64;
    let weight = |k: &Vec3, wk: f64, p: &Vec3, wp: f64| {
        if spinor {
            spinor_weight(k, p, field)
        } else {
            1.0 / (wk * wp)
        }
    };
    let shells = if field.n() == 1 {
        let len = field.length();
        let mom: Vec<f64> = (0..=max).map(|a| 2.0 * PI * a as f64 / len).collect();
        let omega: Vec<f64> = mom.iter().map(|&k| field.energy(&embed(1, &[k]))).collect();
        let prof: Vec<f64> = (-2 * max..=2 * max)
            .map(|s| profile_fourier_sq(&det.profile, &embed(1, &[2.0 * PI * s as f64 / len])))
            .collect();
        let prof_at = |s: i64| prof[(s + 2 * max) as usize];
        double_shell_sums_1d_symmetric(max, |a, b| {
            let (wa, wb) = (omega[a as usize], omega[b as usize]);
            let tf = pref * time_fourier_sq(&det.switching, det.gap + wa + wb);
            let mut out = [0.0; 4];
            for (i, (sa, sb)) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)].into_iter().enumerate() {
                let ka = embed(1, &[sa as f64 * mom[a as usize]]);
                let kb = embed(1, &[sb as f64 * mom[b as usize]]);
                out[i] = tf * weight(&ka, wa, &kb, wb) * prof_at(sa * a + sb * b);
            }
            out
        })
    } else {
        double_shell_sums(field.n(), max, |lk: &ModeIndex, lp: &ModeIndex| {
            let (k, p) = (field.momentum(lk), field.momentum(lp));
            let (wk, wp) = (field.energy(&k), field.energy(&p));
            let kp = [k[0] + p[0], k[1] + p[1], k[2] + p[2]];
            pref * weight(&k, wk, &p, wp)
                * profile_fourier_sq(&det.profile, &kp)
                * time_fourier_sq(&det.switching, det.gap + wk + wp)
        })
    };
    let values = cumulative(&shells, &opts.cutoffs);
    let tails = pair_tails(field, det, opts, pref)?;
    PartialSumSeries::build(&opts.cutoffs, values, tails, opts.tol)
}

/// Remainder bounds of the pair sum, `|p̃| ≤ 1` unless the profile is used explicitly.
fn pair_tails(field: &CavityField, det: &DetectorSpec, opts: &SumOptions, pref: f64) -> Result<Vec<f64>> {
    let (n, len) = (field.n(), field.length());
    let max = opts.max_cutoff() as i64;
    let spinor = det.model == Model::Spinor;
    let product = |a: &(dyn Fn(&ModeIndex) -> f64 + Sync), tail: &dyn Fn(u64) -> f64, scale: f64| {
        let partial = cumulative(&single_shell_sums(n, max, a), &opts.cutoffs);
        opts.cutoffs
            .iter()
            .zip(partial)
            .map(|(&c, ap)| scale * product_tail(ap, tail(c)))
            .collect::<Vec<f64>>()
    };
    let energy = |l: &ModeIndex| field.energy(&field.momentum(l));
    Ok(match (det.switching, det.profile, spinor) {
        (Switching::Gaussian { width }, _, false) => {
            // |χ̃|² ≤ 2πT² e^{-Ω²T²} e^{-ω_k²T²} e^{-ω_p²T²} and a(k) = e^{-ω²T²}/ω
            let t2 = width * width;
            let scale = pref * 2.0 * PI * t2 * (-det.gap * det.gap * t2).exp();
            let a = move |l: &ModeIndex| {
                let w = energy(l);
                (-w * w * t2).exp() / w
            };
            let tail = move |c: u64| decreasing_tail(n, len, c, |k| (-k * k * t2).exp() / k);
            product(&a, &tail, scale)
        }
        (Switching::Gaussian { width }, _, true) => {
            // W ≤ 4 and a(k) = e^{-ω²T²}
            let t2 = width * width;
            let scale = pref * 4.0 * 2.0 * PI * t2 * (-det.gap * det.gap * t2).exp();
            let a = move |l: &ModeIndex| (-energy(l).powi(2) * t2).exp();
            let tail = move |c: u64| decreasing_tail(n, len, c, |k| (-k * k * t2).exp());
            product(&a, &tail, scale)
        }
        (Switching::Sudden { .. }, _, false) => {
            // |χ̃|² ≤ 4/(ω_k+ω_p)² ≤ 1/(ω_k ω_p), so a(k) = 1/ω²
            let a = move |l: &ModeIndex| energy(l).powi(-2);
            let tail = move |c: u64| power_tail(n, len, c, 1.0, 2.0);
            product(&a, &tail, pref)
        }
        (Switching::Sudden { .. }, SpatialProfile::Gaussian { sigma, .. }, true) => {
            // W|χ̃|² ≤ 16/ω_k² on the outer leg; the profile sums to at most θⁿ over the inner leg
            let c = (2.0 * PI * sigma / len).powi(2);
            let theta = theta_bound(c).powi(n as i32);
            opts.cutoffs
                .iter()
                .map(|&cut| 2.0 * pref * 16.0 * theta * power_tail(n, len, cut, 1.0, 2.0))
                .collect()
        }
        (Switching::Sudden { .. }, SpatialProfile::PointLike { .. }, true) => vec![f64::INFINITY; opts.cutoffs.len()],
    })
}

/// Renormalized probability for models 2 and 3 (no tadpole).
pub fn vep_model23_renorm(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<(VepBreakdown, PartialSumSeries)> {
    check(field, det, opts, &[Model::RealQuadratic, Model::ComplexQuadratic])?;
    let s = pair_series(field, det, opts)?;
    Ok((renormalized(&s), s))
}

/// Renormalized probability for model 4.
pub fn vep_model4_renorm(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<(VepBreakdown, PartialSumSeries)> {
    check(field, det, opts, &[Model::Spinor])?;
    let s = pair_series(field, det, opts)?;
    Ok((renormalized(&s), s))
}

fn renormalized(s: &PartialSumSeries) -> VepBreakdown {
    VepBreakdown {
        pair_creation_term: s.last_value(),
        tadpole_term: None,
        renormalized: true,
    }
}

/// The tadpole term alone: `(λ²/4L²ⁿ)(Σ 1/ω)²|χ̃(Ω)|²` for scalars,
/// `(4m²λ²/L²ⁿ)(Σ 1/ω)²|χ̃(Ω)|²` for spinors.
pub fn vep_unrenormalized_tadpole(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<PartialSumSeries> {
    if det.model == Model::Linear {
        return Err(Error::NotApplicable("model 1 has no tadpole term".into()));
    }
    det.model.check_field(field)?;
    opts.validate()?;
    let l2n = field.volume().powi(2);
    let lam2 = det.coupling * det.coupling;
    let pref = match det.model {
        Model::Spinor => 4.0 * field.mass() * field.mass() * lam2 / l2n,
        _ => lam2 / (4.0 * l2n),
    } * time_fourier_sq(&det.switching, det.gap);
    let inv = single_shell_sums(field.n(), opts.max_cutoff() as i64, |l| 1.0 / field.energy(&field.momentum(l)));
    let sums = cumulative(&inv, &opts.cutoffs);
    let values: Vec<f64> = sums.iter().map(|s| pref * s * s).collect();
    let tails = if pref == 0.0 { vec![0.0; values.len()] } else { vec![f64::INFINITY; values.len()] };
    PartialSumSeries::build(&opts.cutoffs, values, tails, opts.tol)
}

/// Pair term plus tadpole at each cutoff, as obtained without normal ordering.
pub fn vep_quadratic_unrenormalized(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<(VepBreakdown, PartialSumSeries)> {
    check(field, det, opts, &[Model::RealQuadratic, Model::ComplexQuadratic, Model::Spinor])?;
    let pair = pair_series(field, det, opts)?;
    let tad = vep_unrenormalized_tadpole(field, det, opts)?;
    let values: Vec<f64> = pair.values.iter().zip(&tad.values).map(|(a, b)| a + b).collect();
    let tails: Vec<f64> = pair.tail_bounds.iter().zip(&tad.tail_bounds).map(|(a, b)| a + b).collect();
    let s = PartialSumSeries::build(&opts.cutoffs, values, tails, opts.tol)?;
    let b = VepBreakdown {
        pair_creation_term: pair.last_value(),
        tadpole_term: Some(tad.last_value()),
        renormalized: false,
    };
    Ok((b, s))
}

/// Massless (1,1) model 4 written over positive momenta only:
/// `(2λ²/L²) Σ_{k,p>0} [|p̃(k−p)|² + |p̃(p−k)|²] |χ̃(Ω+k+p)|²`.
pub fn vep_model4_1d_positive_form(field: &CavityField, det: &DetectorSpec, cutoff: u64) -> Result<f64> {
    det.model.check_field(field)?;
    if field.n() != 1 || !field.is_massless() || det.model != Model::Spinor {
        return Err(invalid("field", "positive-momentum form needs a massless (1,1) spinor and model 4"));
    }
    let len = field.length();
    let pref = 2.0 * det.coupling * det.coupling / (len * len);
    let mut acc = crate::numeric::Neumaier::new();
    for a in 1..=cutoff {
        for b in 1..=cutoff {
            let (k, p) = (2.0 * PI * a as f64 / len, 2.0 * PI * b as f64 / len);
            let prof = profile_fourier_sq(&det.profile, &embed(1, &[k - p])) + profile_fourier_sq(&det.profile, &embed(1, &[p - k]));
            acc.add(pref * prof * time_fourier_sq(&det.switching, det.gap + k + p));
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FieldKind;
    use crate::response::Verdict;
    use crate::spinor::{bar_product_explicit, Charge, Spin, SpinLabel};
    use proptest::prelude::*;

    fn det(model: Model, sw: Switching, prof: SpatialProfile) -> DetectorSpec {
        DetectorSpec::new(model, 1.0, 0.1, sw, prof).unwrap()
    }

    fn pt() -> SpatialProfile {
        SpatialProfile::pointlike_at_origin()
    }

    #[test]
    fn model3_closed_form_in_one_dimension() {
        let len = 1.3;
        let f = CavityField::new(1, len, 0.0, FieldKind::ComplexScalar).unwrap();
        let d = det(Model::ComplexQuadratic, Switching::sudden(0.7).unwrap(), pt());
        let opts = SumOptions::new(vec![3, 6, 9, 12], 1e-10).unwrap();
        let (_, s) = vep_model23_renorm(&f, &d, &opts).unwrap();
        let c = d.gap * len / (2.0 * PI);
        let mut acc = 0.0;
        for l1 in 1..=12 {
            for l2 in 1..=12 {
                let x = c + (l1 + l2) as f64;
                acc += (PI / len * x * 0.7).sin().powi(2) / ((l1 * l2) as f64 * x * x);
            }
        }
        let want = 0.01 * len * len / (4.0 * PI.powi(4)) * acc;
        assert!((s.last_value() - want).abs() < 1e-14 * want);
    }

    #[test]
    fn model3_bounded_by_zeta_chain() {
        let len = 1.0;
        let f = CavityField::new(1, len, 0.0, FieldKind::ComplexScalar).unwrap();
        let d = det(Model::ComplexQuadratic, Switching::sudden(1.0).unwrap(), pt());
        let opts = SumOptions::new(vec![10, 40, 160, 640], 1e-10).unwrap();
        let (_, s) = vep_model23_renorm(&f, &d, &opts).unwrap();
        let z2 = PI * PI / 6.0;
        let z3 = 1.2020569031595942;
        let boundary = 2.0 * (2.0 - z2) - 0.25;
        let bulk = (z2 - 1.0 - 0.25 - 1.0 / 9.0) - 3.0 * (z3 - 1.0 - 0.125 - 1.0 / 27.0);
        let bound = 0.01 * len * len / (4.0 * PI.powi(4)) * (boundary + bulk);
        assert!(s.values.iter().all(|&v| v > 0.0 && v <= bound));
        assert!(s.verdict.is_converged() || matches!(s.verdict, Verdict::Unresolved { .. }));
    }

    #[test]
    fn model4_sudden_summand_closed_form() {
        let len = 1.0;
        let f = CavityField::new(1, len, 0.0, FieldKind::Spinor).unwrap();
        let t = 0.5;
        let d = det(Model::Spinor, Switching::sudden(t).unwrap(), pt());
        let opts = SumOptions::new(vec![2, 4, 8, 16], 1e-10).unwrap();
        let (_, s) = vep_model4_renorm(&f, &d, &opts).unwrap();
        let c = d.gap * len / (2.0 * PI);
        let mut acc = 0.0;
        for l1 in 1..=16 {
            for l2 in 1..=16 {
                let x = c + (l1 + l2) as f64;
                acc += 4.0 * 0.01 / (PI * PI) * (PI / len * x * t).sin().powi(2) / (x * x);
            }
        }
        assert!((s.last_value() - acc).abs() < 1e-13 * acc);
    }

    #[test]
    fn model4_gaussian_closed_form_and_positive_form() {
        let len = 1.0;
        let t = 0.5;
        let f = CavityField::new(1, len, 0.0, FieldKind::Spinor).unwrap();
        let d = det(Model::Spinor, Switching::gaussian(t).unwrap(), pt());
        let opts = SumOptions::new(vec![1, 2, 4, 8], 1e-10).unwrap();
        let (_, s) = vep_model4_renorm(&f, &d, &opts).unwrap();
        let c = d.gap * len / (2.0 * PI);
        let mut acc = 0.0;
        for l1 in 1..=8 {
            for l2 in 1..=8 {
                let x = c + (l1 + l2) as f64;
                acc += (-(4.0 * PI * PI * t * t / (len * len)) * x * x).exp();
            }
        }
        let want = 8.0 * PI * t * t * 0.01 / (len * len) * acc;
        assert!((s.last_value() - want).abs() < 1e-13 * want);
        for prof in [pt(), SpatialProfile::gaussian([0.1, 0.0, 0.0], 0.05).unwrap()] {
            for sw in [Switching::sudden(t).unwrap(), Switching::gaussian(t).unwrap()] {
                let d = det(Model::Spinor, sw, prof);
                let full = vep_model4_renorm(&f, &d, &SumOptions::new(vec![3, 6, 9, 12], 1e-10).unwrap()).unwrap().1;
                let pos = vep_model4_1d_positive_form(&f, &d, 12).unwrap();
                assert!((full.last_value() - pos).abs() < 1e-13 * pos);
            }
        }
    }

    #[test]
    fn model4_sudden_pointlike_log_divergent() {
        let f = CavityField::new(1, 1.0, 0.0, FieldKind::Spinor).unwrap();
        let d = det(Model::Spinor, Switching::sudden(0.5).unwrap(), pt());
        let opts = SumOptions::new(vec![10, 100, 1000, 4000], 1e-10).unwrap();
        let (_, s) = vep_model4_renorm(&f, &d, &opts).unwrap();
        match s.verdict {
            Verdict::LogDivergent { slope } => assert!((slope - 2.0 * 0.01 / (PI * PI)).abs() < 0.2 * slope),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weight_matches_spinor_products() {
        for m in [0.0, 0.4, 2.0] {
            let f = CavityField::new(3, 1.0, m, FieldKind::Spinor).unwrap();
            let k = [0.3, -1.1, 2.0];
            let p = [-0.7, 0.2, 0.9];
            let mut s = 0.0;
            for a in Spin::ALL {
                for b in Spin::ALL {
                    let la = SpinLabel { spin: a, charge: Charge::Particle };
                    let lb = SpinLabel { spin: b, charge: Charge::Antiparticle };
                    s += bar_product_explicit(&k, la, &p, lb, &f).norm_sqr();
                }
            }
            let (wk, wp) = (f.energy(&k), f.energy(&p));
            let want = if m == 0.0 { 2.0 * s } else { 2.0 * s * m * m / (wk * wp) };
            assert!((spinor_weight(&k, &p, &f) - want).abs() < 1e-12, "m={m}");
            let closed = 2.0 * (wk * wp - dot(&k, &p) - m * m) / (wk * wp);
            assert!((spinor_weight(&k, &p, &f) - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn massless_branch_equals_formula_at_zero_mass() {
        let f = CavityField::new(3, 1.0, 0.0, FieldKind::Spinor).unwrap();
        let k = [1.0, 2.0, -0.5];
        let p = [0.2, -0.3, 0.7];
        assert!((spinor_weight(&k, &p, &f) - spinor_weight_massive_formula(&k, &p, 0.0)).abs() < 1e-14);
        let f1 = CavityField::new(1, 1.0, 0.0, FieldKind::Spinor).unwrap();
        assert_eq!(spinor_weight(&embed(1, &[1.0]), &embed(1, &[-2.0]), &f1), 4.0);
        assert_eq!(spinor_weight(&embed(1, &[1.0]), &embed(1, &[2.0]), &f1), 0.0);
    }

    #[test]
    fn tadpole_grows_and_vanishes_for_massless_spinor() {
        let opts = SumOptions::new(vec![10, 100, 1000, 10_000], 1e-10).unwrap();
        for (kind, model) in [(FieldKind::RealScalar, Model::RealQuadratic), (FieldKind::Spinor, Model::Spinor)] {
            let f = CavityField::new(1, 1.0, 0.5, kind).unwrap();
            let d = det(model, Switching::gaussian(0.5).unwrap(), pt());
            let s = vep_unrenormalized_tadpole(&f, &d, &opts).unwrap();
            assert!(s.values.windows(2).all(|w| w[1] > w[0]));
            assert!(s.verdict.is_divergent(), "{:?}", s.verdict);
        }
        let f0 = CavityField::new(1, 1.0, 0.0, FieldKind::Spinor).unwrap();
        let d = det(Model::Spinor, Switching::sudden(1.0).unwrap(), pt());
        let s = vep_unrenormalized_tadpole(&f0, &d, &opts).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        let real = CavityField::new(1, 1.0, 0.0, FieldKind::RealScalar).unwrap();
        let lin = det(Model::Linear, Switching::sudden(1.0).unwrap(), pt());
        assert!(matches!(vep_unrenormalized_tadpole(&real, &lin, &opts), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn tadpole_matches_log_growth() {
        // Σ_{|l|≤Λ} 1/ω ≈ (L/π)(ln Λ + γ) for a massless field
        let len = 1.0;
        let f = CavityField::new(1, len, 0.0, FieldKind::ComplexScalar).unwrap();
        let d = det(Model::ComplexQuadratic, Switching::sudden(1.0).unwrap(), pt());
        let opts = SumOptions::new(vec![10, 100, 1000, 10_000], 1e-10).unwrap();
        let s = vep_unrenormalized_tadpole(&f, &d, &opts).unwrap();
        let chi2 = time_fourier_sq(&d.switching, d.gap);
        for (&c, &v) in opts.cutoffs.iter().zip(&s.values) {
            let h = len / PI * ((c as f64).ln() + 0.5772156649015329 + 0.5 / c as f64);
            let want = 0.01 / (4.0 * len * len) * h * h * chi2;
            assert!((v - want).abs() < 1e-3 * want);
        }
    }

    #[test]
    fn unrenormalized_is_pair_plus_tadpole() {
        let f = CavityField::new(1, 1.0, 0.3, FieldKind::Spinor).unwrap();
        let d = det(Model::Spinor, Switching::gaussian(0.5).unwrap(), pt());
        let opts = SumOptions::new(vec![2, 4, 8, 16], 1e-10).unwrap();
        let (b, s) = vep_quadratic_unrenormalized(&f, &d, &opts).unwrap();
        let (r, _) = vep_model4_renorm(&f, &d, &opts).unwrap();
        assert!(!b.renormalized && r.renormalized && r.tadpole_term.is_none());
        assert!((b.pair_creation_term + b.tadpole_term.unwrap() - s.last_value()).abs() < 1e-15);
        assert_eq!(b.pair_creation_term, r.pair_creation_term);
    }

    #[test]
    fn model2_is_twice_model3() {
        let opts = SumOptions::new(vec![2, 4, 8, 16], 1e-10).unwrap();
        let fr = CavityField::new(1, 1.0, 0.2, FieldKind::RealScalar).unwrap();
        let fc = CavityField::new(1, 1.0, 0.2, FieldKind::ComplexScalar).unwrap();
        let sw = Switching::gaussian(0.5).unwrap();
        let a = vep_model23_renorm(&fr, &det(Model::RealQuadratic, sw, pt()), &opts).unwrap().1;
        let b = vep_model23_renorm(&fc, &det(Model::ComplexQuadratic, sw, pt()), &opts).unwrap().1;
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(*x, 2.0 * y);
        }
    }

    #[test]
    fn three_dimensional_gaussian_converges() {
        let f = CavityField::new(3, 1.0, 0.0, FieldKind::Spinor).unwrap();
        let d = det(Model::Spinor, Switching::gaussian(0.5).unwrap(), pt());
        let opts = SumOptions::new(vec![1, 2, 3, 4], 1e-10).unwrap();
        let (_, s) = vep_model4_renorm(&f, &d, &opts).unwrap();
        assert!(s.verdict.is_converged(), "{:?}", s.verdict);
    }

    #[test]
    fn mismatched_model_rejected() {
        let f = CavityField::new(1, 1.0, 0.0, FieldKind::RealScalar).unwrap();
        let d = det(Model::ComplexQuadratic, Switching::sudden(1.0).unwrap(), pt());
        let opts = SumOptions::new(vec![1, 2, 3, 4], 1e-10).unwrap();
        assert!(matches!(vep_model23_renorm(&f, &d, &opts), Err(Error::ModelFieldMismatch { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn quadratic_scaling(lambda in 0.01f64..2.0, model in 1usize..4, gauss in any::<bool>()) {
            let m = Model::ALL[model];
            let f = CavityField::new(1, 1.0, 0.3, m.field_kind()).unwrap();
            let sw = if gauss { Switching::gaussian(0.4).unwrap() } else { Switching::sudden(0.7).unwrap() };
            let d = DetectorSpec::new(m, 1.0, lambda, sw, pt()).unwrap();
            let opts = SumOptions::new(vec![1, 2, 4, 8], 1e-10).unwrap();
            let a = crate::response::vep(&f, &d, &opts).unwrap();
            let b = crate::response::vep(&f, &d.with_coupling(2.0 * lambda), &opts).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((4.0 * x - y).abs() <= 1e-14 * y);
            }
        }

        #[test]
        fn pair_summand_symmetric(k in prop::array::uniform3(-4.0f64..4.0), p in prop::array::uniform3(-4.0f64..4.0), m in prop_oneof![Just(0.0), 0.1f64..2.0]) {
            prop_assume!(dot(&k, &k) > 1e-4 && dot(&p, &p) > 1e-4);
            let f = CavityField::new(3, 1.0, m, FieldKind::Spinor).unwrap();
            prop_assert!((spinor_weight(&k, &p, &f) - spinor_weight(&p, &k, &f)).abs() < 1e-13);
            let w = spinor_weight(&k, &p, &f);
            prop_assert!((-1e-14..=4.0 + 1e-14).contains(&w));
        }
    }
}
