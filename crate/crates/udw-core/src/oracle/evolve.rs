//! Nonperturbative time evolution on a dense truncated space.

use super::interaction::interaction_operator;
use super::space::{TruncatedSpace, DEFAULT_CAP};
use crate::error::{invalid, Error, Result};
use crate::profile::{chi, DetectorSpec};
use crate::wick::FieldModes;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Outcome of one evolution from `|0, g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    /// Probability of ending with the detector excited, any field state.
    pub p_ge: f64,
    /// Probability of ending in `|0, g⟩`.
    pub p_gg: f64,
    /// Final Schrödinger-picture state.
    pub state: DVector<Complex64>,
    /// Largest deviation from orthonormality of a set of propagated probe vectors.
    pub unitarity_defect: f64,
    /// `|P_ge(steps) − P_ge(2·steps)|`, when step halving was requested.
    pub halving_difference: Option<f64>,
    /// False when step halving changed `P_ge` by more than `tol·P_ge + 1e−15`.
    pub converged: bool,
}

impl Evolution {
    /// Probability of every basis state.
    pub fn populations(&self) -> Vec<f64> {
        self.state.iter().map(|z| z.norm_sqr()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Use the normal-ordered interaction for the quadratic models.
    pub normal_ordered: bool,
    /// Relative tolerance for the step-halving comparison; `None` skips it.
    pub halving_tol: Option<f64>,
    /// Number of probe vectors for the unitarity check.
    pub probes: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            normal_ordered: true,
            halving_tol: None,
            probes: 4,
        }
    }
}

/// Single-field, single-detector space for `det.model` with bosonic cap `cap`.
pub fn model_space(fm: &FieldModes, det: &DetectorSpec, cap: u8) -> Result<TruncatedSpace> {
    det.model.check_field(&fm.field)?;
    TruncatedSpace::new(super::interaction::model_table(fm, det.gap)?, cap)
}

struct Stepper {
    half_phase: Vec<Complex64>,
    vecs: DMatrix<Complex64>,
    eigs: Vec<f64>,
}

impl Stepper {
    fn step(&self, psi: &mut DVector<Complex64>, theta: f64) {
        if theta == 0.0 {
            for (z, p) in psi.iter_mut().zip(&self.half_phase) {
                *z *= p * p;
            }
            return;
        }
        for (z, p) in psi.iter_mut().zip(&self.half_phase) {
            *z *= p;
        }
        let mut c = self.vecs.ad_mul(psi);
        for (z, e) in c.iter_mut().zip(&self.eigs) {
            *z *= Complex64::from_polar(1.0, -theta * e);
        }
        *psi = &self.vecs * c;
        for (z, p) in psi.iter_mut().zip(&self.half_phase) {
            *z *= p;
        }
    }
}

fn run(space: &TruncatedSpace, m: &DMatrix<Complex64>, det: &DetectorSpec, t0: f64, t1: f64, steps: usize, probes: usize) -> (DVector<Complex64>, f64) {
    let dt = (t1 - t0) / steps as f64;
    let energies = space.free_energies();
    let eig = m.clone().symmetric_eigen();
    let stepper = Stepper {
        half_phase: energies.iter().map(|e| Complex64::from_polar(1.0, -0.5 * e * dt)).collect(),
        vecs: eig.eigenvectors,
        eigs: eig.eigenvalues.iter().copied().collect(),
    };
    let dim = space.dim();
    let k = probes.clamp(1, dim);
    // Probe 0 is |0, g⟩; the others are fixed spread-out vectors.
    let mut block = DMatrix::<Complex64>::zeros(dim, k);
    block[(0, 0)] = Complex64::new(1.0, 0.0);
    for j in 1..k {
        for i in 0..dim {
            block[(i, j)] = Complex64::from_polar(1.0, (i * (2 * j + 1)) as f64 * 0.7 + j as f64);
        }
    }
    let gram0 = block.ad_mul(&block);
    for s in 0..steps {
        let t = t0 + (s as f64 + 0.5) * dt;
        let theta = det.coupling * chi(&det.switching, t) * dt;
        for j in 0..k {
            let mut col = block.column(j).into_owned();
            stepper.step(&mut col, theta);
            block.set_column(j, &col);
        }
    }
    let gram = block.ad_mul(&block);
    let scale = gram0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = (gram - gram0).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
    (block.column(0).into_owned(), defect)
}

fn probabilities(space: &TruncatedSpace, state: &DVector<Complex64>) -> (f64, f64) {
    let det = space.table.detector(0).expect("model spaces hold detector 0");
    let p_ge = (0..space.dim())
        .filter(|&i| space.occupations(i)[det] == 1)
        .map(|i| state[i].norm_sqr())
        .sum();
    (p_ge, state[0].norm_sqr())
}

/// Strang-split propagation of `H_F + H_d + λχ(t) V` from `t0` to `t1`:
/// exact free half steps around an interaction step evaluated at the
/// midpoint time, with `V` diagonalized once.
pub fn evolve(space: &TruncatedSpace, fm: &FieldModes, det: &DetectorSpec, t0: f64, t1: f64, steps: usize, opts: &EvolveOptions) -> Result<Evolution> {
    if steps == 0 || !(t1 > t0) {
        return Err(invalid("steps", "need at least one step over a non-empty interval"));
    }
    det.model.check_field(&fm.field)?;
    let v = interaction_operator(&space.table, fm, det, 0.0, opts.normal_ordered)?;
    let m = space.operator_matrix(&v);
    let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > 1e-12 * m.iter().map(|z| z.norm()).fold(1.0, f64::max) {
        return Err(Error::NotApplicable(format!("interaction matrix is not Hermitian (defect {herm:e})")));
    }
    let (state, defect) = run(space, &m, det, t0, t1, steps, opts.probes);
    let (p_ge, p_gg) = probabilities(space, &state);
    let (halving_difference, converged) = match opts.halving_tol {
        Some(tol) => {
            let (fine, _) = run(space, &m, det, t0, t1, 2 * steps, 1);
            let d = (probabilities(space, &fine).0 - p_ge).abs();
            (Some(d), d <= tol * p_ge.abs() + 1e-15)
        }
        None => (None, true),
    };
    Ok(Evolution {
        p_ge,
        p_gg,
        state,
        unitarity_defect: defect,
        halving_difference,
        converged,
    })
}

/// Evolution over the switching support at the default cap.
pub fn evolve_model(fm: &FieldModes, det: &DetectorSpec, steps: usize, opts: &EvolveOptions) -> Result<Evolution> {
    let space = model_space(fm, det, DEFAULT_CAP)?;
    let (t0, t1) = det.switching.support();
    evolve(&space, fm, det, t0, t1, steps, opts)
}

/// `|P_ge(cap) − P_ge(cap + 1)|` relative to `P_ge(cap)`.
pub fn cap_sensitivity(fm: &FieldModes, det: &DetectorSpec, steps: usize, cap: u8, opts: &EvolveOptions) -> Result<f64> {
    let (t0, t1) = det.switching.support();
    let a = evolve(&model_space(fm, det, cap)?, fm, det, t0, t1, steps, opts)?;
    let b = evolve(&model_space(fm, det, cap + 1)?, fm, det, t0, t1, steps, opts)?;
    Ok((a.p_ge - b.p_ge).abs() / a.p_ge.abs().max(f64::MIN_POSITIVE))
}
