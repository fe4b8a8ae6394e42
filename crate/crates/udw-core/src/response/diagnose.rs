//! Convergence verdicts for partial sums taken at increasing lattice cutoffs.

use crate::error::{Error, Result};

/// Default absolute tolerance on probabilities.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `|q|` below this counts as logarithmic growth.
const LOG_BAND: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// The tail beyond the last cutoff is below the tolerance.
    Converged { value: f64, abs_err: f64 },
    /// Increments decay like a power but the tail still exceeds the tolerance.
    Unresolved { value: f64, abs_err: f64 },
    /// Increments per unit `ln Λ` approach the constant `slope`.
    LogDivergent { slope: f64 },
    /// Increments per unit `ln Λ` grow.
    Divergent,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Converged { .. } => "Converged",
            Verdict::Unresolved { .. } => "Unresolved",
            Verdict::LogDivergent { .. } => "LogDivergent",
            Verdict::Divergent => "Divergent",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Verdict::LogDivergent { .. } | Verdict::Divergent)
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Verdict::Converged { value, .. } | Verdict::Unresolved { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies partial sums `values[j]` taken at cutoffs `cutoffs[j]`.
///
/// `tails`, when given, are rigorous bounds on the remainder beyond each cutoff.
/// The growth exponent `q` is fitted from the increments per unit `ln Λ`,
/// `c_j ∝ Λ^{-q}`, over the last three intervals.
pub fn convergence_diagnose(cutoffs: &[f64], values: &[f64], tails: Option<&[f64]>, tol: f64) -> Result<Verdict> {
    let n = cutoffs.len();
    if n < 4 {
        return Err(Error::TooFewCutoffs { needed: 4, got: n });
    }
    if values.len() != n || tails.is_some_and(|t| t.len() != n) {
        return Err(crate::error::invalid("values", "series and cutoff lengths differ"));
    }
    if cutoffs.windows(2).any(|w| !(w[1] > w[0])) || cutoffs[0] <= 0.0 {
        return Err(crate::error::invalid("cutoffs", "cutoffs must be positive and strictly increasing"));
    }
    let last = values[n - 1];
    let bound = tails.map(|t| t[n - 1]).filter(|b| b.is_finite());
    if let Some(b) = bound {
        if b <= tol {
            return Ok(Verdict::Converged { value: last, abs_err: b });
        }
    }

    let ln: Vec<f64> = cutoffs.iter().map(|c| c.ln()).collect();
    let rate = |j: usize| (values[j] - values[j - 1]).abs() / (ln[j] - ln[j - 1]);
    let mid = |j: usize| 0.5 * (ln[j] + ln[j - 1]);
    let c = [rate(n - 3), rate(n - 2), rate(n - 1)];

    if c[1] == 0.0 && c[2] == 0.0 {
        return Ok(Verdict::Converged {
            value: last,
            abs_err: bound.unwrap_or(0.0),
        });
    }
    if c[1] == 0.0 || c[0] == 0.0 {
        // isolated zero increment: nothing to fit, fall back to the bound
        return Ok(match bound {
            Some(b) => Verdict::Unresolved { value: last, abs_err: b },
            None => Verdict::Unresolved {
                value: last,
                abs_err: f64::INFINITY,
            },
        });
    }
    let q_prev = -(c[1] / c[0]).ln() / (mid(n - 2) - mid(n - 3));
    let q = -(c[2] / c[1]).ln() / (mid(n - 1) - mid(n - 2));

    if q.abs() < LOG_BAND && q_prev.abs() < LOG_BAND {
        return Ok(Verdict::LogDivergent { slope: c[2] });
    }
    if q < -LOG_BAND {
        return Ok(Verdict::Divergent);
    }
    if q <= 0.0 {
        return Ok(Verdict::LogDivergent { slope: c[2] });
    }
    // geometric remainder of increments shrinking like ρ^{-q}
    let rho = cutoffs[n - 1] / cutoffs[n - 2];
    let d = (values[n - 1] - values[n - 2]).abs();
    let estimate = d / (rho.powf(q) - 1.0);
    let abs_err = bound.unwrap_or(estimate);
    Ok(if abs_err <= tol {
        Verdict::Converged { value: last, abs_err }
    } else {
        Verdict::Unresolved { value: last, abs_err }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partial(cutoffs: &[u64], term: impl Fn(u64) -> f64) -> Vec<f64> {
        let mut acc = crate::numeric::Neumaier::new();
        let mut out = Vec::new();
        let mut l = 1;
        for &c in cutoffs {
            while l <= c {
                acc.add(term(l));
                l += 1;
            }
            out.push(acc.value());
        }
        out
    }

    #[test]
    fn p_series_converges() {
        let cut = [1000u64, 10_000, 100_000, 1_000_000];
        let v = partial(&cut, |l| (l as f64).powi(-3));
        let cf: Vec<f64> = cut.iter().map(|&c| c as f64).collect();
        let verdict = convergence_diagnose(&cf, &v, None, DEFAULT_TOL).unwrap();
        assert!(verdict.is_converged(), "{verdict:?}");
        assert!((verdict.value().unwrap() - 1.2020569031595942).abs() < 1e-11);
    }

    #[test]
    fn harmonic_is_log_divergent() {
        let cut = [100u64, 1000, 10_000, 100_000];
        let v = partial(&cut, |l| 1.0 / l as f64);
        let cf: Vec<f64> = cut.iter().map(|&c| c as f64).collect();
        match convergence_diagnose(&cf, &v, None, DEFAULT_TOL).unwrap() {
            Verdict::LogDivergent { slope } => assert!((slope - 1.0).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn triple_sum_is_log_divergent() {
        let a = 0.5;
        let cut = [4u64, 8, 16, 32, 64];
        let mut vals = Vec::new();
        for &c in &cut {
            let mut acc = crate::numeric::Neumaier::new();
            for l1 in 1..=c {
                for l2 in 1..=c {
                    for l3 in 1..=c {
                        acc.add((a + (l1 + l2 + l3) as f64).powi(-3));
                    }
                }
            }
            vals.push(acc.value());
        }
        let cf: Vec<f64> = cut.iter().map(|&c| c as f64).collect();
        let v = convergence_diagnose(&cf, &vals, None, DEFAULT_TOL).unwrap();
        assert!(matches!(v, Verdict::LogDivergent { .. }), "{v:?}");
    }

    #[test]
    fn power_growth_is_divergent() {
        let cut = [10.0, 20.0, 40.0, 80.0];
        let v: Vec<f64> = cut.iter().map(|c: &f64| c * c).collect();
        assert_eq!(convergence_diagnose(&cut, &v, None, 1e-10).unwrap(), Verdict::Divergent);
    }

    #[test]
    fn tail_bound_decides() {
        let cut = [1.0, 2.0, 4.0, 8.0];
        let v = [1.0, 1.5, 1.6, 1.6 + 1e-3];
        let t = [1.0, 0.1, 1e-2, 1e-12];
        assert!(convergence_diagnose(&cut, &v, Some(&t), 1e-10).unwrap().is_converged());
        let t2 = [1.0, 0.1, 1e-2, 1e-3];
        assert!(matches!(convergence_diagnose(&cut, &v, Some(&t2), 1e-10).unwrap(), Verdict::Unresolved { .. }));
    }

    #[test]
    fn too_few_cutoffs() {
        assert_eq!(
            convergence_diagnose(&[1.0, 2.0, 3.0], &[0.0; 3], None, 1e-10),
            Err(Error::TooFewCutoffs { needed: 4, got: 3 })
        );
    }

    #[test]
    fn zero_series() {
        let cut = [1.0, 2.0, 4.0, 8.0];
        let v = convergence_diagnose(&cut, &[0.0; 4], None, 1e-10).unwrap();
        assert_eq!(v, Verdict::Converged { value: 0.0, abs_err: 0.0 });
    }
}
