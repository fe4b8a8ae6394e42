//! One function per subcommand. Each returns the rendered output.

use crate::config::{self, Axis, Format, OracleBlock, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};
use rayon::prelude::*;
use std::time::Instant;
use udw_core::feynman::{adjacency_listing, amplitude, enumerate_diagrams, vnrp_second_order, QuadOptions};
use udw_core::oracle::{evolve, model_space, run_word_suite, EvolveOptions};
use udw_core::response::{vep, vep_quadratic_unrenormalized, PartialSumSeries, SumOptions, Verdict};
use udw_core::wick::{render_terms, Evaluation, FieldModes, OperatorWord, WickConfig};
use udw_core::{CavityField, DetectorSpec, Model, SpatialProfile, Switching};

/// Settings shared by all subcommands after flags override the config.
pub struct Ctx {
    pub cfg: RunConfig,
    pub tol: Option<f64>,
    pub timing: bool,
}

impl Ctx {
    fn seconds(&self, start: Instant) -> f64 {
        if self.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    }
}

pub struct Output {
    pub text: String,
    /// Set when convergence was required and not reached.
    pub failure: Option<String>,
}

fn section<'a, T>(v: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Config(format!("missing `[{name}]` block")))
}

fn verdict_cells(v: &Verdict) -> String {
    match v {
        Verdict::LogDivergent { slope } => format!("LogDivergent(slope={slope:.16e})"),
        other => other.name().to_string(),
    }
}

fn series(field: &CavityField, det: &DetectorSpec, opts: &SumOptions, renormalized: bool) -> Result<PartialSumSeries, CliError> {
    Ok(if renormalized || det.model == Model::Linear {
        vep(field, det, opts)?
    } else {
        vep_quadratic_unrenormalized(field, det, opts)?.1
    })
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    match *v {
        Verdict::Converged { value, abs_err } | Verdict::Unresolved { value, abs_err } => {
            serde_json::json!({ "name": v.name(), "value": value, "abs_err": abs_err })
        }
        Verdict::LogDivergent { slope } => serde_json::json!({ "name": v.name(), "slope": slope }),
        Verdict::Divergent => serde_json::json!({ "name": v.name() }),
    }
}

pub fn run_vep(ctx: &Ctx, format: Format) -> Result<Output, CliError> {
    let b = section(&ctx.cfg.vep, "vep")?;
    let field = ctx.cfg.field()?;
    let det = ctx.cfg.detector(b.detector)?;
    let opts = config::sum_options("vep", &b.cutoffs, &b.schedule, ctx.tol.or(b.tol))?;
    let start = Instant::now();
    let s = series(&field, &det, &opts, b.renormalized)?;
    let secs = ctx.seconds(start);
    let mut t = Table::new(&["cutoff", "partial_sum", "tail_bound", "verdict", "wall_time_s"]);
    for ((c, v), tail) in s.cutoffs.iter().zip(&s.values).zip(&s.tail_bounds) {
        t.push(vec![(*c as i64).into(), (*v).into(), (*tail).into(), verdict_cells(&s.verdict).into(), secs.into()]);
    }
    t.note("verdict", verdict_json(&s.verdict));
    t.note("model", det.model.id());
    let failure = (b.require_converged && !s.verdict.is_converged()).then(|| format!("vep verdict {}", s.verdict));
    Ok(Output {
        text: t.render(format)?,
        failure,
    })
}

pub fn run_vnrp(ctx: &Ctx, format: Format) -> Result<Output, CliError> {
    let b = section(&ctx.cfg.vnrp, "vnrp")?;
    let field = ctx.cfg.field()?;
    let det = ctx.cfg.detector(b.detector)?;
    if b.cutoffs.is_empty() || b.cutoffs.iter().any(|&c| c < 1) {
        return Err(CliError::Config("`vnrp.cutoffs` must be a non-empty list of positive integers".into()));
    }
    let quad = QuadOptions {
        panels: b.quadrature.panels,
        order: b.quadrature.order,
    };
    let mut t = Table::new(&["cutoff", "vnrp", "second_order_re", "second_order_im", "tail", "quad_error", "wall_time_s"]);
    let mut worst: f64 = 0.0;
    for &c in &b.cutoffs {
        let start = Instant::now();
        let v = vnrp_second_order(&field, &det, c, &quad)?;
        let a = v.second_order;
        worst = worst.max(a.quad_error);
        t.push(vec![c.into(), v.probability.into(), a.value.re.into(), a.value.im.into(), a.tail.into(), a.quad_error.into(), ctx.seconds(start).into()]);
    }
    let tol = ctx.tol.or(b.tol).unwrap_or(udw_core::response::DEFAULT_TOL);
    let failure = (b.require_converged && !(worst <= tol)).then(|| format!("quadrature error {worst:e} above {tol:e}"));
    Ok(Output {
        text: t.render(format)?,
        failure,
    })
}

pub fn run_wick(ctx: &Ctx, format: Format) -> Result<Output, CliError> {
    let b = section(&ctx.cfg.wick, "wick")?;
    let mut cfg = WickConfig::new();
    if ctx.cfg.field.is_some() {
        cfg = cfg.with_field(0, FieldModes::ball(ctx.cfg.field()?, b.cutoff));
    }
    for (i, d) in ctx.cfg.detectors()?.iter().enumerate() {
        cfg = cfg.with_detector(i as u32, d.gap);
    }
    let word = OperatorWord::parse(&b.word)?.with_kinds(&cfg.kinds());
    let terms = render_terms(&word)?;
    let ev = Evaluation::new(&word, &cfg)?;
    let total = ev.total();
    if format == Format::Text {
        let mut s = format!("word {word}\n");
        for (term, p) in terms.iter().zip(&ev.pairings) {
            let sign = if term.sign < 0 { '-' } else { '+' };
            let z = ev.term(p);
            s.push_str(&format!("{sign} {}  = {:.16e} {:+.16e}i\n", term.factors.join(" "), z.re, z.im));
        }
        s.push_str(&format!("total {:.16e} {:+.16e}i\n", total.re, total.im));
        return Ok(Output { text: s, failure: None });
    }
    let mut t = Table::new(&["term", "sign", "factors", "re", "im"]);
    for (i, (term, p)) in terms.iter().zip(&ev.pairings).enumerate() {
        let z = ev.term(p);
        t.push(vec![i.into(), (term.sign as i64).into(), term.factors.join(" ").into(), z.re.into(), z.im.into()]);
    }
    t.push(vec!["total".into(), Cell::Text(String::new()), Cell::Text(String::new()), total.re.into(), total.im.into()]);
    t.note("word", word.to_string());
    t.note("pairings", ev.pairings.len());
    Ok(Output {
        text: t.render(format)?,
        failure: None,
    })
}

pub fn run_diagrams(ctx: &Ctx, format: Format) -> Result<Output, CliError> {
    let b = section(&ctx.cfg.diagrams, "diagrams")?;
    let field = ctx.cfg.field()?;
    let dets = ctx.cfg.detectors()?;
    let model = dets.first().ok_or_else(|| CliError::Config("`diagrams` needs at least one `[[detector]]`".into()))?.model;
    if dets.iter().any(|d| d.model != model) {
        return Err(CliError::Config("all `[[detector]]` blocks must use the same model".into()));
    }
    let n = dets.len() as u32;
    let initial = config::external_state("diagrams.initial", &b.initial, n, &field)?;
    let fin = config::external_state("diagrams.final", &b.final_, n, &field)?;
    let diagrams = enumerate_diagrams(model, b.order, &initial, &fin, n)?;
    if format == Format::Text {
        return Ok(Output {
            text: adjacency_listing(&diagrams),
            failure: None,
        });
    }
    let quad = QuadOptions {
        panels: b.quadrature.panels,
        order: b.quadrature.order,
    };
    let amps = if b.evaluate {
        diagrams
            .par_iter()
            .map(|d| amplitude(d, &field, &dets, b.cutoff, &quad).map(Some))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![None; diagrams.len()]
    };
    let mut t = Table::new(&["diagram", "symmetry_factor", "sign", "adjacency", "re", "im"]);
    for (i, (d, a)) in diagrams.iter().zip(&amps).enumerate() {
        let (re, im) = a.as_ref().map_or((Cell::Text(String::new()), Cell::Text(String::new())), |a| (a.value.re.into(), a.value.im.into()));
        t.push(vec![(i + 1).into(), d.symmetry_factor.into(), (d.sign as i64).into(), d.to_adjacency().trim_end().replace('\n', "; ").into(), re, im]);
    }
    t.note("diagrams", diagrams.len());
    Ok(Output {
        text: t.render(format)?,
        failure: None,
    })
}

pub fn run_oracle(ctx: &Ctx, format: Format) -> Result<Output, CliError> {
    match section(&ctx.cfg.oracle, "oracle")? {
        OracleBlock::Compare { count, seed, tol } => {
            let tol = ctx.tol.or(*tol).unwrap_or(1e-10);
            let r = run_word_suite(*count, *seed, tol)?;
            let mut t = Table::new(&["word", "pairings", "engine_re", "engine_im", "oracle_re", "oracle_im", "rel_diff", "pass"]);
            for c in &r.comparisons {
                t.push(vec![
                    c.word.clone().into(),
                    c.pairings.into(),
                    c.wick.re.into(),
                    c.wick.im.into(),
                    c.oracle.re.into(),
                    c.oracle.im.into(),
                    c.rel_diff.into(),
                    (if c.rel_diff < tol { "yes" } else { "no" }).into(),
                ]);
            }
            let fails = r.failures().len();
            t.note("words", r.comparisons.len());
            t.note("nonzero", r.nonzero());
            t.note("failures", fails);
            t.note("max_rel_diff", r.max_rel_diff());
            eprintln!(
                "{} words, {} nonzero, {fails} above {tol:e}, max relative difference {:e}",
                r.comparisons.len(),
                r.nonzero(),
                r.max_rel_diff()
            );
            Ok(Output {
                text: t.render(format)?,
                failure: (fails > 0).then(|| format!("{fails} words differ by more than {tol:e}")),
            })
        }
        OracleBlock::Evolve { cutoff, steps, cap, halving_tol, detector } => {
            let field = ctx.cfg.field()?;
            let det = ctx.cfg.detector(*detector)?;
            let fm = FieldModes::ball(field, *cutoff);
            let space = model_space(&fm, &det, *cap)?;
            let opts = EvolveOptions {
                halving_tol: *halving_tol,
                ..EvolveOptions::default()
            };
            let (t0, t1) = det.switching.support();
            let start = Instant::now();
            let e = evolve(&space, &fm, &det, t0, t1, *steps, &opts)?;
            let mut t = Table::new(&["dimension", "steps", "p_ge", "p_gg", "unitarity_defect", "halving_difference", "wall_time_s"]);
            t.push(vec![
                space.dim().into(),
                (*steps).into(),
                e.p_ge.into(),
                e.p_gg.into(),
                e.unitarity_defect.into(),
                e.halving_difference.unwrap_or(f64::NAN).into(),
                ctx.seconds(start).into(),
            ]);
            Ok(Output {
                text: t.render(format)?,
                failure: (!e.converged).then(|| format!("step halving moved P(g→e) by {:e}", e.halving_difference.unwrap_or(f64::NAN))),
            })
        }
    }
}

fn with_axis(field: &CavityField, det: &DetectorSpec, axis: Axis, x: f64) -> Result<(CavityField, DetectorSpec), CliError> {
    let key = |e: udw_core::Error| CliError::Config(format!("`sweep.values` ({} = {x}): {e}", axis.name()));
    let rebuild = |gap: f64, sw: Switching, prof: SpatialProfile| DetectorSpec::new(det.model, gap, det.coupling, sw, prof).map_err(key);
    Ok(match axis {
        Axis::Width => {
            let sw = match det.switching {
                Switching::Sudden { t0, duration } if t0 == -0.5 * duration => Switching::sudden(x),
                Switching::Sudden { t0, .. } => Switching::sudden_from(t0, x),
                Switching::Gaussian { .. } => Switching::gaussian(x),
            }
            .map_err(key)?;
            (*field, rebuild(det.gap, sw, det.profile)?)
        }
        Axis::Sigma => {
            let x0 = match det.profile {
                SpatialProfile::PointLike { x0 } | SpatialProfile::Gaussian { x0, .. } => x0,
            };
            (*field, rebuild(det.gap, det.switching, SpatialProfile::gaussian(x0, x).map_err(key)?)?)
        }
        Axis::Gap => (*field, rebuild(x, det.switching, det.profile)?),
        Axis::Coupling => (*field, DetectorSpec::new(det.model, det.gap, x, det.switching, det.profile).map_err(key)?),
        Axis::Length => (field.with_length(x).map_err(key)?, *det),
        Axis::Mass => (field.with_mass(x).map_err(key)?, *det),
    })
}

/// "increasing", "decreasing", "constant" or "mixed".
fn monotonicity(v: &[f64]) -> &'static str {
    let up = v.windows(2).all(|w| w[1] > w[0]);
    let down = v.windows(2).all(|w| w[1] < w[0]);
    match (up, down) {
        _ if v.len() < 2 => "constant",
        (true, _) => "increasing",
        (_, true) => "decreasing",
        _ if v.windows(2).all(|w| w[1] == w[0]) => "constant",
        _ => "mixed",
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn run_sweep(ctx: &Ctx, format: Format) -> Result<Output, CliError> {
    let b = section(&ctx.cfg.sweep, "sweep")?;
    let axis = Axis::parse(&b.axis).ok_or_else(|| {
        CliError::Config(format!("`sweep.axis` = {:?}: expected one of T, sigma, gap, coupling, L, m", b.axis))
    })?;
    if b.values.is_empty() {
        return Err(CliError::Config("`sweep.values` is empty".into()));
    }
    let field = ctx.cfg.field()?;
    let det = ctx.cfg.detector(b.detector)?;
    let opts = config::sum_options("sweep", &b.cutoffs, &b.schedule, ctx.tol.or(b.tol))?;
    let points = b
        .values
        .iter()
        .map(|&x| with_axis(&field, &det, axis, x))
        .collect::<Result<Vec<_>, _>>()?;
    let results = points
        .par_iter()
        .map(|(f, d)| {
            let start = Instant::now();
            series(f, d, &opts, b.renormalized).map(|s| (s, ctx.seconds(start)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[axis.name(), "value", "tail_bound", "verdict", "wall_time_s"]);
    let mut finals = Vec::new();
    let mut failures = Vec::new();
    for (x, (s, secs)) in b.values.iter().zip(&results) {
        let v = s.verdict.value().unwrap_or(s.last_value());
        finals.push(v);
        if b.require_converged && !s.verdict.is_converged() {
            failures.push(format!("{} = {x}: {}", axis.name(), s.verdict));
        }
        t.push(vec![(*x).into(), v.into(), (*s.tail_bounds.last().unwrap()).into(), verdict_cells(&s.verdict).into(), (*secs).into()]);
    }
    let mono = monotonicity(&finals);
    t.note("axis", axis.name());
    t.note("monotonicity", mono);
    eprintln!("{} sweep: value {mono}", axis.name());
    if axis == Axis::Coupling {
        if let Some(p) = log_log_slope(&b.values, &finals) {
            t.note("coupling_exponent", p);
            eprintln!("fitted exponent in coupling: {p:.12}");
        }
    }
    Ok(Output {
        text: t.render(format)?,
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotonicity_labels() {
        assert_eq!(monotonicity(&[3.0, 2.0, 1.0]), "decreasing");
        assert_eq!(monotonicity(&[1.0, 2.0]), "increasing");
        assert_eq!(monotonicity(&[1.0, 2.0, 1.5]), "mixed");
        assert_eq!(monotonicity(&[1.0, 1.0]), "constant");
    }

    #[test]
    fn quadratic_slope() {
        let x = [0.1, 0.2, 0.4];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
        assert!((log_log_slope(&x, &y).unwrap() - 2.0).abs() < 1e-12);
    }
}
