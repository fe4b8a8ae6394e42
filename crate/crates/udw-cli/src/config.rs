//! Run configuration read from TOML. Unknown keys are rejected.

use crate::error::CliError;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use udw_core::feynman::{ExternalState, Level, Quantum};
use udw_core::response::{SumOptions, DEFAULT_TOL};
use udw_core::{CavityField, DetectorSpec, FieldKind, Model, ModeIndex, SpatialProfile, Spin, Switching};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: Option<FieldBlock>,
    #[serde(default, rename = "detector")]
    pub detectors: Vec<DetectorBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    pub vep: Option<VepBlock>,
    pub vnrp: Option<VnrpBlock>,
    pub wick: Option<WickBlock>,
    pub diagrams: Option<DiagramsBlock>,
    pub oracle: Option<OracleBlock>,
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub n: usize,
    pub length: f64,
    #[serde(default)]
    pub mass: f64,
    pub kind: KindName,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    RealScalar,
    ComplexScalar,
    Spinor,
}

impl From<KindName> for FieldKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::RealScalar => FieldKind::RealScalar,
            KindName::ComplexScalar => FieldKind::ComplexScalar,
            KindName::Spinor => FieldKind::Spinor,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorBlock {
    pub model: u8,
    pub gap: f64,
    pub coupling: f64,
    pub switching: SwitchingBlock,
    #[serde(default)]
    pub profile: ProfileBlock,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SwitchingBlock {
    Sudden {
        duration: f64,
        start: Option<f64>,
    },
    Gaussian {
        width: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileBlock {
    #[default]
    Pointlike,
    PointlikeAt {
        center: Vec<f64>,
    },
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    /// Adjacency listing or rendered terms, for `diagrams` and `wick`.
    Text,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// Write measured wall times; `false` writes zeros so reruns are byte-identical.
    #[serde(default = "yes")]
    pub timing: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            path: None,
            format: None,
            timing: true,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub start: u64,
    pub ratio: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VepBlock {
    pub cutoffs: Option<Vec<u64>>,
    pub schedule: Option<Schedule>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub require_converged: bool,
    #[serde(default = "yes")]
    pub renormalized: bool,
    #[serde(default)]
    pub detector: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadBlock {
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_order")]
    pub order: usize,
}

impl Default for QuadBlock {
    fn default() -> Self {
        Self {
            panels: default_panels(),
            order: default_order(),
        }
    }
}

fn default_panels() -> usize {
    4
}

fn default_order() -> usize {
    16
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnrpBlock {
    pub cutoffs: Vec<i64>,
    #[serde(default)]
    pub quadrature: QuadBlock,
    /// Largest acceptable `quad_error` when convergence is required.
    pub tol: Option<f64>,
    #[serde(default)]
    pub require_converged: bool,
    #[serde(default)]
    pub detector: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WickBlock {
    pub word: String,
    /// Field modes `|l|_∞ ≤ cutoff`.
    pub cutoff: i64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StateBlock {
    /// Detector ids that are excited.
    #[serde(default)]
    pub excited: Vec<u32>,
    /// Quanta such as `a(1)`, `b(-2)` or `a(1,0,2):up`.
    #[serde(default)]
    pub quanta: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramsBlock {
    pub order: usize,
    #[serde(default)]
    pub initial: StateBlock,
    #[serde(default, rename = "final")]
    pub final_: StateBlock,
    /// Also evaluate each diagram's amplitude.
    #[serde(default)]
    pub evaluate: bool,
    #[serde(default = "default_loop_cutoff")]
    pub cutoff: i64,
    #[serde(default)]
    pub quadrature: QuadBlock,
}

fn default_loop_cutoff() -> i64 {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleBlock {
    /// Random operator words, engine against oracle.
    Compare {
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_seed")]
        seed: u64,
        tol: Option<f64>,
    },
    /// Direct time evolution of `|0, g⟩`.
    Evolve {
        cutoff: i64,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default = "default_cap")]
        cap: u8,
        /// Relative step-halving tolerance; convergence is then required.
        halving_tol: Option<f64>,
        #[serde(default)]
        detector: usize,
    },
}

fn default_count() -> usize {
    500
}

fn default_seed() -> u64 {
    1
}

fn default_steps() -> usize {
    800
}

fn default_cap() -> u8 {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Width,
    Sigma,
    Gap,
    Coupling,
    Length,
    Mass,
}

impl Axis {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "T" | "t" | "width" | "duration" => Axis::Width,
            "sigma" | "σ" => Axis::Sigma,
            "gap" | "omega" | "Omega" | "Ω" => Axis::Gap,
            "coupling" | "lambda" | "λ" => Axis::Coupling,
            "L" | "length" => Axis::Length,
            "m" | "mass" => Axis::Mass,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Width => "T",
            Axis::Sigma => "sigma",
            Axis::Gap => "gap",
            Axis::Coupling => "coupling",
            Axis::Length => "L",
            Axis::Mass => "m",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: String,
    pub values: Vec<f64>,
    pub cutoffs: Option<Vec<u64>>,
    pub schedule: Option<Schedule>,
    pub tol: Option<f64>,
    #[serde(default)]
    pub require_converged: bool,
    #[serde(default = "yes")]
    pub renormalized: bool,
    #[serde(default)]
    pub detector: usize,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn cfg_err(key: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {e}"))
}

impl RunConfig {
    pub fn field(&self) -> Result<CavityField, CliError> {
        let f = self.field.as_ref().ok_or_else(|| CliError::Config("missing `[field]` block".into()))?;
        CavityField::new(f.n, f.length, f.mass, f.kind.into()).map_err(|e| cfg_err("field", e))
    }

    pub fn detector(&self, i: usize) -> Result<DetectorSpec, CliError> {
        let key = format!("detector[{i}]");
        let d = self
            .detectors
            .get(i)
            .ok_or_else(|| CliError::Config(format!("missing `{key}`: {} detector block(s) given", self.detectors.len())))?;
        let n = self.field.as_ref().map_or(3, |f| f.n);
        let model = Model::from_id(d.model).map_err(|e| cfg_err(&format!("{key}.model"), e))?;
        let switching = match d.switching {
            SwitchingBlock::Sudden { duration, start: None } => Switching::sudden(duration),
            SwitchingBlock::Sudden { duration, start: Some(t0) } => Switching::sudden_from(t0, duration),
            SwitchingBlock::Gaussian { width } => Switching::gaussian(width),
        }
        .map_err(|e| cfg_err(&format!("{key}.switching"), e))?;
        let point = |c: &[f64], what: &str| -> Result<[f64; 3], CliError> {
            if !c.is_empty() && c.len() != n {
                return Err(CliError::Config(format!("`{key}.profile.{what}` has {} components, field has n = {n}", c.len())));
            }
            let mut x = [0.0; 3];
            // Components fill the last axes, so n = 1 uses the third.
            for (i, v) in c.iter().enumerate() {
                x[3 - c.len() + i] = *v;
            }
            Ok(x)
        };
        let profile = match &d.profile {
            ProfileBlock::Pointlike => SpatialProfile::pointlike_at_origin(),
            ProfileBlock::PointlikeAt { center } => SpatialProfile::PointLike { x0: point(center, "center")? },
            ProfileBlock::Gaussian { center, sigma } => {
                SpatialProfile::gaussian(point(center, "center")?, *sigma).map_err(|e| cfg_err(&format!("{key}.profile.sigma"), e))?
            }
        };
        let det = DetectorSpec::new(model, d.gap, d.coupling, switching, profile).map_err(|e| cfg_err(&key, e))?;
        if self.field.is_some() {
            model.check_field(&self.field()?).map_err(|e| cfg_err(&format!("{key}.model"), e))?;
        }
        Ok(det)
    }

    pub fn detectors(&self) -> Result<Vec<DetectorSpec>, CliError> {
        (0..self.detectors.len()).map(|i| self.detector(i)).collect()
    }
}

pub fn sum_options(section: &str, cutoffs: &Option<Vec<u64>>, schedule: &Option<Schedule>, tol: Option<f64>) -> Result<SumOptions, CliError> {
    let tol = tol.unwrap_or(DEFAULT_TOL);
    let o = match (cutoffs, schedule) {
        (Some(c), None) => SumOptions::new(c.clone(), tol),
        (None, Some(s)) => SumOptions::geometric(s.start, s.ratio, s.count, tol),
        (None, None) => return Err(CliError::Config(format!("`{section}` needs `cutoffs` or `schedule`"))),
        (Some(_), Some(_)) => return Err(CliError::Config(format!("`{section}` takes `cutoffs` or `schedule`, not both"))),
    };
    o.map_err(|e| cfg_err(section, e))
}

fn parse_quantum(text: &str, kind: FieldKind, n: usize) -> Result<Quantum, String> {
    let (body, spin) = match text.split_once(':') {
        Some((b, s)) => (b.trim(), Some(s.trim())),
        None => (text.trim(), None),
    };
    let (head, rest) = body.split_at(body.find('(').ok_or_else(|| format!("`{text}`: expected a(...) or b(...)"))?);
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("`{text}`: unbalanced parentheses"))?;
    let comps = inner
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("`{text}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if comps.len() != n {
        return Err(format!("`{text}`: {} components, field has n = {n}", comps.len()));
    }
    let mode = ModeIndex::new(&comps).map_err(|e| format!("`{text}`: {e}"))?;
    let q = match head.trim() {
        "a" => Quantum::particle(mode),
        "b" => Quantum::antiparticle(mode),
        h => return Err(format!("`{text}`: unknown quantum `{h}`")),
    };
    match (spin, kind == FieldKind::Spinor) {
        (Some("up"), true) => Ok(q.with_spin(Spin::Up)),
        (Some("down"), true) => Ok(q.with_spin(Spin::Down)),
        (None, false) => Ok(q),
        (None, true) => Err(format!("`{text}`: spinor quanta need `:up` or `:down`")),
        (Some(s), true) => Err(format!("`{text}`: unknown spin `{s}`")),
        (Some(_), false) => Err(format!("`{text}`: scalar quanta carry no spin")),
    }
}

pub fn external_state(key: &str, s: &StateBlock, n_detectors: u32, field: &CavityField) -> Result<ExternalState, CliError> {
    let mut st = ExternalState::ground(n_detectors);
    for d in &s.excited {
        st = st.with_level(*d, Level::Excited);
    }
    for q in &s.quanta {
        let q = parse_quantum(q, field.kind(), field.n()).map_err(|e| CliError::Config(format!("`{key}.quanta`: {e}")))?;
        st = st.with_quantum(q);
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_configs_load() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
        let mut seen = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let cfg = load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            if cfg.field.is_some() {
                cfg.detectors().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            }
            seen += 1;
        }
        assert!(seen >= 5);
    }

    #[test]
    fn quanta_strings() {
        let q = parse_quantum("a(1,0,-2):up", FieldKind::Spinor, 3).unwrap();
        assert_eq!(q.spin, Some(Spin::Up));
        assert_eq!(q.mode, ModeIndex::new(&[1, 0, -2]).unwrap());
        assert!(parse_quantum("b(3)", FieldKind::ComplexScalar, 1).is_ok());
        assert!(parse_quantum("b(3)", FieldKind::Spinor, 1).is_err());
        assert!(parse_quantum("a(1):up", FieldKind::RealScalar, 1).is_err());
        assert!(parse_quantum("c(1)", FieldKind::RealScalar, 1).is_err());
        assert!(parse_quantum("a(1,2)", FieldKind::RealScalar, 1).is_err());
    }
}
