//! Shell-by-shell accumulation of lattice sums and remainder bounds.
//!
//! Shell `j` holds the labels with `|l|_∞ = j`. Work is cut into fixed blocks of
//! the lexicographic order, each block keeps one compensated accumulator per
//! shell, and blocks are merged in order. The partition never depends on the
//! thread count, so results are bit-identical across pools.

use crate::lattice::{sup_ball, ModeIndex};
use crate::numeric::Neumaier;
use rayon::prelude::*;
use std::f64::consts::PI;

const BLOCK: usize = 64;

fn merge_blocks(blocks: Vec<Vec<Neumaier>>, shells: usize) -> Vec<f64> {
    let mut acc = vec![Neumaier::new(); shells + 1];
    for b in &blocks {
        for (a, x) in acc.iter_mut().zip(b) {
            a.merge(x);
        }
    }
    acc.iter().map(Neumaier::value).collect()
}

/// Per-shell sums `S_j = Σ_{|l|_∞ = j} f(l)` for `j = 0..=max_shell` (`S_0 = 0`).
pub fn single_shell_sums<F>(n: usize, max_shell: i64, f: F) -> Vec<f64>
where
    F: Fn(&ModeIndex) -> f64 + Sync,
{
    let ball = sup_ball(n, max_shell);
    let shells = max_shell as usize;
    let blocks: Vec<Vec<Neumaier>> = ball
        .par_chunks(BLOCK * BLOCK)
        .map(|chunk| {
            let mut acc = vec![Neumaier::new(); shells + 1];
            for l in chunk {
                acc[l.sup_norm() as usize].add(f(l));
            }
            acc
        })
        .collect();
    merge_blocks(blocks, shells)
}

/// Per-shell sums of `Σ f(l_k, l_p)` where the shell of a pair is `max(|l_k|_∞, |l_p|_∞)`.
pub fn double_shell_sums<F>(n: usize, max_shell: i64, f: F) -> Vec<f64>
where
    F: Fn(&ModeIndex, &ModeIndex) -> f64 + Sync,
{
    let ball = sup_ball(n, max_shell);
    let shells = max_shell as usize;
    let blocks: Vec<Vec<Neumaier>> = ball
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = vec![Neumaier::new(); shells + 1];
            for lk in chunk {
                let sk = lk.sup_norm();
                for lp in &ball {
                    let s = sk.max(lp.sup_norm()) as usize;
                    acc[s].add(f(lk, lp));
                }
            }
            acc
        })
        .collect();
    merge_blocks(blocks, shells)
}

/// One-dimensional pair sum of a summand that is symmetric under `k ↔ p`.
///
/// `f(a, b)` with `1 ≤ a ≤ b` must return the four sign combinations
/// `[F(a,b), F(a,−b), F(−a,b), F(−a,−b)]`. Off-diagonal pairs are counted twice.
pub fn double_shell_sums_1d_symmetric<F>(max_shell: i64, f: F) -> Vec<f64>
where
    F: Fn(i64, i64) -> [f64; 4] + Sync,
{
    let shells: Vec<i64> = (1..=max_shell).collect();
    let per_shell: Vec<f64> = shells
        .par_chunks(BLOCK)
        .flat_map_iter(|chunk| {
            chunk
                .iter()
                .map(|&b| {
                    let mut acc = Neumaier::new();
                    for a in 1..=b {
                        let v = f(a, b);
                        let mult = if a == b { 1.0 } else { 2.0 };
                        for x in v {
                            acc.add(mult * x);
                        }
                    }
                    acc.value()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut out = Vec::with_capacity(per_shell.len() + 1);
    out.push(0.0);
    out.extend(per_shell);
    out
}

/// Partial sums at each cutoff from per-shell sums.
pub fn cumulative(shell_sums: &[f64], cutoffs: &[u64]) -> Vec<f64> {
    let mut acc = Neumaier::new();
    let mut out = Vec::with_capacity(cutoffs.len());
    let mut j = 0usize;
    for &c in cutoffs {
        while j <= c as usize && j < shell_sums.len() {
            acc.add(shell_sums[j]);
            j += 1;
        }
        out.push(acc.value());
    }
    out
}

/// Exact number of labels with `|l|_∞ = j`.
pub fn shell_count(n: usize, j: u64) -> f64 {
    let a = (2 * j + 1) as f64;
    let b = (2 * j - 1) as f64;
    a.powi(n as i32) - b.powi(n as i32)
}

/// Smallest `|k|` on shell `j`.
pub fn shell_kmin(length: f64, j: u64) -> f64 {
    2.0 * PI * j as f64 / length
}

/// Bound on `Σ_{|l|_∞ > Λ} a(k)` for `a(k) ≤ coef·|k|^{-p}`, by integral comparison.
pub fn power_tail(n: usize, length: f64, cutoff: u64, coef: f64, p: f64) -> f64 {
    let nf = n as f64;
    if p <= nf || cutoff == 0 {
        return f64::INFINITY;
    }
    let count_coef = 2.0 * nf * 3f64.powi(n as i32 - 1);
    coef * (length / (2.0 * PI)).powf(p) * count_coef * (cutoff as f64).powf(nf - p) / (p - nf)
}

/// Bound on `Σ_{j > Λ} count_j·g(k_min(j))` for a non-increasing majorant `g`,
/// summed explicitly with a geometric closing estimate once terms shrink fast.
pub fn decreasing_tail(n: usize, length: f64, cutoff: u64, g: impl Fn(f64) -> f64) -> f64 {
    let mut acc = Neumaier::new();
    let mut prev = f64::INFINITY;
    let mut j = cutoff + 1;
    let limit = j + 50_000_000;
    while j < limit {
        let term = shell_count(n, j) * g(shell_kmin(length, j));
        if term == 0.0 {
            return acc.value();
        }
        if !term.is_finite() {
            return f64::INFINITY;
        }
        acc.add(term);
        let r = term / prev;
        if r < 0.5 && term <= 1e-18 * acc.value() {
            acc.add(term * r / (1.0 - r));
            return acc.value();
        }
        prev = term;
        j += 1;
    }
    f64::INFINITY
}

/// Remainder of a double sum whose summand is at most `a(k) a(p)`:
/// pairs outside the ball have at least one leg outside, so the remainder is
/// below `2·A_tail·(A_partial + A_tail)`.
pub fn product_tail(a_partial: f64, a_tail: f64) -> f64 {
    2.0 * a_tail * (a_partial + a_tail)
}

/// `Σ_{m ∈ Z} e^{-c m²} ≤ 1 + sqrt(π/c)`.
pub fn theta_bound(c: f64) -> f64 {
    1.0 + (PI / c).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_ball() {
        for n in 1..=3 {
            for j in 1..=4u64 {
                let direct = sup_ball(n, j as i64).iter().filter(|l| l.sup_norm() == j as i64).count();
                assert_eq!(direct as f64, shell_count(n, j));
                assert!(shell_count(n, j) <= 2.0 * n as f64 * 3f64.powi(n as i32 - 1) * (j as f64).powi(n as i32 - 1));
            }
        }
    }

    #[test]
    fn power_tail_bounds_p_series() {
        // Σ_{|l|>Λ} |k|^{-3} with L = 2π in one dimension
        let l = 2.0 * PI;
        let exact: f64 = (101..2_000_000).map(|j| 2.0 / (j as f64).powi(3)).sum();
        let b = power_tail(1, l, 100, 1.0, 3.0);
        assert!(b >= exact && b < 1.1 * exact);
    }

    #[test]
    fn gaussian_tail_bounds_direct_sum() {
        let l = 1.0;
        let g = |k: f64| (-k * k * 0.01).exp() / k;
        let direct: f64 = (6..100_000u64).map(|j| shell_count(2, j) * g(shell_kmin(l, j))).sum();
        let b = decreasing_tail(2, l, 5, g);
        assert!((b - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn symmetric_fast_path_matches_generic() {
        let f = |k: f64, p: f64| (-(k + 2.0 * p).powi(2) * 0.1).exp() / ((k * k + 1.0) * (p * p + 1.0)) + (k * p).cos() / (1.0 + k * k + p * p);
        let sym = |k: f64, p: f64| 0.5 * (f(k, p) + f(p, k));
        let generic = double_shell_sums(1, 12, |a, b| sym(a.comps()[0] as f64, b.comps()[0] as f64));
        let fast = double_shell_sums_1d_symmetric(12, |a, b| {
            let (a, b) = (a as f64, b as f64);
            [sym(a, b), sym(a, -b), sym(-a, b), sym(-a, -b)]
        });
        for (x, y) in generic.iter().zip(&fast) {
            assert!((x - y).abs() < 1e-13 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn cumulative_partial_sums() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(cumulative(&s, &[1, 2, 4]), vec![1.0, 3.0, 10.0]);
    }
}
