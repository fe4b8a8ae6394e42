//! Symbolic form of the terms of a contraction sum.

use super::contract::{enumerate_flat, pair_order, PairOrder};
use super::symbol::{FlatSymbol, OperatorSymbol, OperatorWord, Point};
use crate::error::Result;
use crate::spinor::Charge;

/// One term: an overall sign and a product of factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RenderedTerm {
    pub sign: i8,
    pub factors: Vec<String>,
}

impl RenderedTerm {
    /// Factors sorted, with trivial ones dropped, for comparisons up to ordering.
    pub fn canonical(&self) -> RenderedTerm {
        let mut f: Vec<String> = self.factors.iter().filter(|s| s.as_str() != "1").cloned().collect();
        f.sort();
        RenderedTerm { sign: self.sign, factors: f }
    }
}

impl std::fmt::Display for RenderedTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = if self.sign < 0 { "-" } else { "+" };
        let body: Vec<&str> = self.factors.iter().map(|x| x.as_str()).filter(|x| *x != "1").collect();
        if body.is_empty() {
            write!(f, "{s} 1")
        } else {
            write!(f, "{s} {}", body.join(" "))
        }
    }
}

fn mode_name(sym: &OperatorSymbol) -> String {
    match sym {
        OperatorSymbol::Ladder { mode, spin, label, .. } => {
            let base = label.clone().unwrap_or_else(|| format!("({mode})"));
            match spin {
                Some(s) => format!("{base},{}", s.symbol()),
                None => base,
            }
        }
        _ => String::new(),
    }
}

fn time_name(sym: &OperatorSymbol) -> String {
    match sym {
        OperatorSymbol::Monopole { time, label, .. } => label.clone().unwrap_or_else(|| time.to_string()),
        OperatorSymbol::Scalar { point, .. } | OperatorSymbol::Spinor { point, .. } => point_name(point),
        _ => String::new(),
    }
}

fn point_name(p: &Point) -> String {
    p.name()
}

fn index_name(sym: &OperatorSymbol) -> String {
    match sym {
        OperatorSymbol::Spinor { index, .. } => index.to_string(),
        _ => String::new(),
    }
}

/// Factor for the plain product `⟨X Y⟩`, with its sign.
fn written_factor(x: &OperatorSymbol, y: &OperatorSymbol) -> (i8, String) {
    use OperatorSymbol as S;
    let f = match (x, y) {
        (S::Ladder { .. }, S::Ladder { .. }) => format!("δ({},{})", mode_name(x), mode_name(y)),
        (S::Sigma { .. }, S::Sigma { .. }) => "1".to_string(),
        (S::Sigma { .. }, S::Monopole { .. }) => format!("e^{{+iΩ{}}}", time_name(y)),
        (S::Monopole { .. }, S::Sigma { .. }) => format!("e^{{-iΩ{}}}", time_name(x)),
        (S::Monopole { .. }, S::Monopole { .. }) => format!("e^{{-iΩ({}-{})}}", time_name(x), time_name(y)),
        (S::Ladder { .. }, S::Scalar { .. }) => format!("φ*_{}({})", mode_name(x), time_name(y)),
        (S::Scalar { .. }, S::Ladder { .. }) => format!("φ_{}({})", mode_name(y), time_name(x)),
        (S::Ladder { charge, .. }, S::Spinor { .. }) => match charge {
            Charge::Particle => format!("ψ̄+_{}({})_{}", mode_name(x), time_name(y), index_name(y)),
            Charge::Antiparticle => format!("ψ-_{}({})^{}", mode_name(x), time_name(y), index_name(y)),
        },
        (S::Spinor { .. }, S::Ladder { charge, .. }) => match charge {
            Charge::Particle => format!("ψ+_{}({})^{}", mode_name(y), time_name(x), index_name(x)),
            Charge::Antiparticle => format!("ψ̄-_{}({})_{}", mode_name(y), time_name(x), index_name(x)),
        },
        (S::Scalar { .. }, S::Scalar { .. }) => format!("W({},{})", time_name(x), time_name(y)),
        (S::Spinor { conj: false, .. }, S::Spinor { .. }) => {
            format!("W+({},{})^{}_{}", time_name(x), time_name(y), index_name(x), index_name(y))
        }
        (S::Spinor { .. }, S::Spinor { .. }) => {
            format!("W-({},{})^{}_{}", time_name(y), time_name(x), index_name(y), index_name(x))
        }
        _ => "0".to_string(),
    };
    (1, f)
}

/// Factor for the time-ordered contraction of symbols in different slots.
fn ordered_factor(x: &OperatorSymbol, y: &OperatorSymbol) -> (i8, String) {
    use OperatorSymbol as S;
    match (x, y) {
        (S::Monopole { .. }, S::Monopole { .. }) => (1, format!("D_F({}-{})", time_name(x), time_name(y))),
        (S::Scalar { .. }, S::Scalar { .. }) => (1, format!("G_F({}-{})", time_name(x), time_name(y))),
        (S::Spinor { conj: false, .. }, S::Spinor { .. }) => (
            1,
            format!("S_F({}-{})^{}_{}", time_name(x), time_name(y), index_name(x), index_name(y)),
        ),
        (S::Spinor { .. }, S::Spinor { .. }) => (
            -1,
            format!("S_F({}-{})^{}_{}", time_name(y), time_name(x), index_name(y), index_name(x)),
        ),
        _ => (1, "0".to_string()),
    }
}

fn factor(flat: &[FlatSymbol], i: usize, j: usize) -> (i8, String) {
    match pair_order(&flat[i], &flat[j]) {
        PairOrder::Written => written_factor(&flat[i].symbol, &flat[j].symbol),
        PairOrder::TimeOrdered => ordered_factor(&flat[i].symbol, &flat[j].symbol),
    }
}

/// Every full contraction as a signed product of named factors
/// (`δ`, `φ`, `ψ`, `e^{±iΩt}`, `G_F`, `S_F`, `D_F`).
pub fn render_terms(word: &OperatorWord) -> Result<Vec<RenderedTerm>> {
    word.validate()?;
    let flat = word.flatten();
    Ok(enumerate_flat(word, &flat)
        .into_iter()
        .map(|p| {
            let mut sign = p.sign;
            let factors = p
                .pairs
                .iter()
                .map(|&(i, j)| {
                    let (s, f) = factor(&flat, i, j);
                    sign *= s;
                    f
                })
                .collect();
            RenderedTerm { sign, factors }
        })
        .collect())
}
