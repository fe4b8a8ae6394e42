//! Leading-order vacuum excitation probabilities and their convergence in the
//! momentum cutoff.

pub mod diagnose;
pub mod model1;
pub mod quadratic;
pub mod shells;

pub use diagnose::{convergence_diagnose, Verdict, DEFAULT_TOL};
pub use model1::{vep_model1, vep_model1_gaussian_switch};
pub use quadratic::{
    spinor_weight, vep_model23_renorm, vep_model4_1d_positive_form, vep_model4_renorm, vep_quadratic_unrenormalized,
    vep_unrenormalized_tadpole,
};

use crate::error::{invalid, Result};
use crate::lattice::CavityField;
use crate::profile::{DetectorSpec, Model};

/// Cutoff schedule and tolerance for a lattice sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SumOptions {
    /// Sup-norm radii `Λ`, strictly increasing.
    pub cutoffs: Vec<u64>,
    pub tol: f64,
}

impl SumOptions {
    pub fn new(cutoffs: Vec<u64>, tol: f64) -> Result<Self> {
        let o = Self { cutoffs, tol };
        o.validate()?;
        Ok(o)
    }

    /// `count` cutoffs `start·ratio^j`, rounded and deduplicated.
    pub fn geometric(start: u64, ratio: f64, count: usize, tol: f64) -> Result<Self> {
        if start == 0 || !(ratio > 1.0) {
            return Err(invalid("cutoffs", "geometric schedule needs start ≥ 1 and ratio > 1"));
        }
        let mut c: Vec<u64> = (0..count).map(|j| (start as f64 * ratio.powi(j as i32)).round() as u64).collect();
        c.dedup();
        Self::new(c, tol)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoffs.is_empty() || self.cutoffs[0] == 0 || self.cutoffs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("cutoffs", "cutoffs must be positive and strictly increasing"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn max_cutoff(&self) -> u64 {
        *self.cutoffs.last().unwrap()
    }
}

/// Partial sums of a probability against the lattice cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumSeries {
    pub cutoffs: Vec<u64>,
    pub values: Vec<f64>,
    /// Bound on the remainder beyond each cutoff; infinite when none is available.
    pub tail_bounds: Vec<f64>,
    pub verdict: Verdict,
}

impl PartialSumSeries {
    pub(crate) fn build(cutoffs: &[u64], values: Vec<f64>, tail_bounds: Vec<f64>, tol: f64) -> Result<Self> {
        let cf: Vec<f64> = cutoffs.iter().map(|&c| c as f64).collect();
        let verdict = convergence_diagnose(&cf, &values, Some(&tail_bounds), tol)?;
        Ok(Self {
            cutoffs: cutoffs.to_vec(),
            values,
            tail_bounds,
            verdict,
        })
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Rescales every value and bound, e.g. by a coupling ratio squared.
    pub fn scaled(&self, factor: f64, tol: f64) -> Result<Self> {
        Self::build(
            &self.cutoffs,
            self.values.iter().map(|v| v * factor).collect(),
            self.tail_bounds.iter().map(|t| t * factor.abs()).collect(),
            tol,
        )
    }
}

/// The two contributions of a quadratic-model probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VepBreakdown {
    pub pair_creation_term: f64,
    pub tadpole_term: Option<f64>,
    pub renormalized: bool,
}

/// Renormalized leading-order probability for whichever model `det` uses.
pub fn vep(field: &CavityField, det: &DetectorSpec, opts: &SumOptions) -> Result<PartialSumSeries> {
    match det.model {
        Model::Linear => vep_model1(field, det, opts),
        Model::RealQuadratic | Model::ComplexQuadratic => Ok(vep_model23_renorm(field, det, opts)?.1),
        Model::Spinor => Ok(vep_model4_renorm(field, det, opts)?.1),
    }
}
