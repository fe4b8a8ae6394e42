//! Linear coupling to a real scalar.

use super::shells::{cumulative, decreasing_tail, power_tail, single_shell_sums};
use super::{PartialSumSeries, SumOptions};
use crate::error::{invalid, Result};
use crate::lattice::{CavityField, ModeIndex};
use crate::profile::{DetectorSpec, Model, SpatialProfile, Switching};
use std::f64::consts::PI;

/// `P = (λ²/2Lⁿ) Σ_k |f̃(Ω + ω_k, k)|² / ω_k`.
pub fn vep_model1(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<PartialSumSeries> {
    check(field, det, opts)?;
    let pref = det.coupling * det.coupling / (2.0 * field.volume());
    let term = |l: &ModeIndex| {
        let k = field.momentum(l);
        let w = field.energy(&k);
        pref / w * det.spacetime_fourier_sq(det.gap + w, &k)
    };
    let shells = single_shell_sums(field.n(), opts.max_cutoff() as i64, term);
    let values = cumulative(&shells, &opts.cutoffs);
    let tails = opts.cutoffs.iter().map(|&c| model1_tail(field, det, pref, c)).collect();
    PartialSumSeries::build(&opts.cutoffs, values, tails, opts.tol)
}

/// Gaussian switching with a point-like detector:
/// `P = (πλ²T²/Lⁿ) Σ_k e^{-(Ω+ω_k)²T²} / ω_k`.
pub fn vep_model1_gaussian_switch(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<PartialSumSeries> {
    check(field, det, opts)?;
    let t = match det.switching {
        Switching::Gaussian { width } => width,
        _ => return Err(invalid("switching", "this form requires gaussian switching")),
    };
    if !matches!(det.profile, SpatialProfile::PointLike { .. }) {
        return Err(invalid("profile", "this form requires a point-like detector"));
    }
    let pref = PI * det.coupling * det.coupling * t * t / field.volume();
    let term = |l: &ModeIndex| {
        let w = field.energy(&field.momentum(l));
        pref * (-(det.gap + w).powi(2) * t * t).exp() / w
    };
    let shells = single_shell_sums(field.n(), opts.max_cutoff() as i64, term);
    let values = cumulative(&shells, &opts.cutoffs);
    let pref_half = det.coupling * det.coupling / (2.0 * field.volume());
    let tails = opts.cutoffs.iter().map(|&c| model1_tail(field, det, pref_half, c)).collect();
    PartialSumSeries::build(&opts.cutoffs, values, tails, opts.tol)
}

fn check(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<()> {
    if det.model != Model::Linear {
        return Err(invalid("model", "expected model 1"));
    }
    Model::Linear.check_field(field)?;
    opts.validate()
}

/// Remainder beyond shell `cutoff` with `|p̃| ≤ 1` and `ω ≥ |k|`.
fn model1_tail(field: &CavityField, det: &DetectorSpec, pref: f64, cutoff: u64) -> f64 {
    let (n, len) = (field.n(), field.length());
    match (det.switching, det.profile) {
        (Switching::Gaussian { width }, _) => {
            let c = pref * 2.0 * PI * width * width * (-(det.gap * width).powi(2)).exp();
            decreasing_tail(n, len, cutoff, |k| c * (-k * k * width * width).exp() / k)
        }
        (Switching::Sudden { .. }, SpatialProfile::PointLike { .. }) => power_tail(n, len, cutoff, 4.0 * pref, 3.0),
        (Switching::Sudden { .. }, SpatialProfile::Gaussian { sigma, .. }) => {
            decreasing_tail(n, len, cutoff, |k| 4.0 * pref * (-k * k * sigma * sigma).exp() / k.powi(3))
        }
    }
}
