//! Time integrals of the vertex factors.

use crate::numeric::{gauss_legendre, CNeumaier, Rule};
use crate::profile::{chi, time_fourier, Switching};
use num_complex::Complex64;

/// Gauss-Legendre panels over the window and nodes per panel. The panel count
/// is raised when needed so that a panel spans at most `0.75·order` radians
/// of the fastest phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOptions {
    pub panels: usize,
    pub order: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { panels: 4, order: 16 }
    }
}

impl QuadOptions {
    fn panels_for(&self, window: (f64, f64), freq: f64) -> usize {
        let need = ((window.1 - window.0) * freq / (0.75 * self.order as f64)).ceil() as usize;
        self.panels.max(need).max(1)
    }

    pub fn doubled(&self) -> Self {
        Self {
            panels: 2 * self.panels,
            order: self.order,
        }
    }
}

/// `∫ χ(t) e^{iνt} dt`
pub fn single_integral(sw: &Switching, nu: f64) -> Complex64 {
    time_fourier(sw, nu)
}

/// `∫_{t₁>t₂} χ₁(t₁) χ₂(t₂) e^{i(ν₁t₁ + ν₂t₂)}` over `window`.
///
/// The inner integral is accumulated panel by panel, so each outer node only
/// needs one partial-panel rule.
pub fn ordered_integral(chi1: &Switching, chi2: &Switching, nu1: f64, nu2: f64, window: (f64, f64), quad: &QuadOptions) -> Complex64 {
    let (a, b) = window;
    let freq = nu1.abs().max(nu2.abs()).max((nu1 + nu2).abs());
    let panels = quad.panels_for(window, freq);
    let base = gauss_legendre(quad.order);
    let h = (b - a) / panels as f64;
    let inner = |lo: f64, hi: f64| -> Complex64 {
        let r: Rule = base.mapped(lo, hi);
        r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(&t, &w)| Complex64::from_polar(w * chi(chi2, t), nu2 * t))
            .collect::<CNeumaier>()
            .value()
    };
    let mut below = CNeumaier::new();
    let mut total = CNeumaier::new();
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { lo + h };
        let outer = base.mapped(lo, hi);
        let done = below.value();
        for (&t1, &w1) in outer.nodes.iter().zip(&outer.weights) {
            let c = chi(chi1, t1);
            if c == 0.0 {
                continue;
            }
            let f = done + inner(lo, t1);
            total.add(Complex64::from_polar(w1 * c, nu1 * t1) * f);
        }
        below.add(inner(lo, hi));
    }
    total.value()
}

/// Union of the switching windows.
pub fn common_window<'a>(switchings: impl IntoIterator<Item = &'a Switching>) -> (f64, f64) {
    switchings
        .into_iter()
        .map(|s| s.support())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d)))
}
