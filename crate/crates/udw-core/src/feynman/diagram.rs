//! Diagrams as classes of Wick contractions of the process word
//! `⟨out| V(t₁) ⋯ V(t_k) |in⟩` with `t₁ > ⋯ > t_k`.

use super::state::{ExternalLeg, ExternalState, LegKind, Quantum, FIELD};
use crate::error::{Error, Result};
use crate::lattice::FieldKind;
use crate::profile::Model;
use crate::spinor::Charge;
use crate::wick::{enumerate_full_contractions, ContractionPairing, Group, OperatorSymbol, OperatorWord, Point, SpinorIndex};
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    /// Vertex by time rank, 0 being the latest.
    Vertex(usize),
    Leg(usize),
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Vertex(v) => write!(f, "v{}", v + 1),
            Endpoint::Leg(l) => write!(f, "L{}", l + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineKind {
    Detector(u32),
    Scalar,
    Spinor,
}

/// A line. Directed lines run from the end that carries charge in
/// (`Ψ̄`, `Φ†`, outgoing antiparticle, incoming particle) to the other end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub kind: LineKind,
    pub directed: bool,
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramVertex {
    pub detector: u32,
    /// Label of the summed spinor index, for spinor vertices.
    pub index: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub model: Model,
    pub order: usize,
    pub vertices: Vec<DiagramVertex>,
    pub edges: Vec<Edge>,
    /// Outgoing legs first, then incoming ones.
    pub legs: Vec<ExternalLeg>,
    /// Number of contractions the diagram stands for.
    pub symmetry_factor: usize,
    pub sign: i8,
    /// `⟨out|` and `|in⟩` normalization for repeated bosons.
    pub normalization: f64,
    pub(crate) word: OperatorWord,
    pub(crate) pairing: ContractionPairing,
    pub(crate) ends: Vec<Endpoint>,
}

fn vertex_group(model: Model, v: usize, time: f64, detector: u32) -> Group {
    let point = Point::labeled(&format!("y{}", v + 1), time, &[]);
    let mu = OperatorSymbol::monopole(detector, time);
    let fields = match model {
        Model::Linear => vec![OperatorSymbol::scalar(FIELD, point, false)],
        Model::RealQuadratic => vec![
            OperatorSymbol::scalar(FIELD, point.clone(), false),
            OperatorSymbol::scalar(FIELD, point, false),
        ],
        Model::ComplexQuadratic => vec![
            OperatorSymbol::scalar(FIELD, point.clone(), true),
            OperatorSymbol::scalar(FIELD, point, false),
        ],
        Model::Spinor => {
            let a = SpinorIndex::Label(format!("A{}", v + 1));
            vec![
                OperatorSymbol::psibar(FIELD, point.clone(), a.clone()),
                OperatorSymbol::psi(FIELD, point, a),
            ]
        }
    };
    Group::vertex(mu, fields)
}

fn annihilator(sym: &OperatorSymbol) -> OperatorSymbol {
    match sym.clone() {
        OperatorSymbol::Ladder {
            field,
            charge,
            mode,
            spin,
            label,
            ..
        } => OperatorSymbol::Ladder {
            field,
            charge,
            mode,
            spin,
            dagger: false,
            label,
        },
        OperatorSymbol::Sigma { detector, .. } => OperatorSymbol::Sigma { detector, raising: false },
        s => s,
    }
}

fn leg_of(sym: &OperatorSymbol, outgoing: bool) -> ExternalLeg {
    let kind = match sym {
        OperatorSymbol::Sigma { detector, .. } => LegKind::Detector(*detector),
        OperatorSymbol::Ladder { charge, mode, spin, .. } => LegKind::Field(Quantum {
            charge: *charge,
            mode: *mode,
            spin: *spin,
        }),
        _ => unreachable!("external states hold ladder and level operators only"),
    };
    ExternalLeg { outgoing, kind }
}

/// Word, legs and per-symbol endpoints for vertex detectors `sequence`
/// (latest vertex first).
pub fn process_word(model: Model, sequence: &[u32], in_state: &ExternalState, out_state: &ExternalState) -> (OperatorWord, Vec<ExternalLeg>, Vec<Endpoint>) {
    let prefix: Vec<OperatorSymbol> = out_state.creators().iter().rev().map(annihilator).collect();
    let suffix = in_state.creators();
    let k = sequence.len();
    let core: Vec<Group> = sequence
        .iter()
        .enumerate()
        .map(|(v, &d)| vertex_group(model, v, (k - v) as f64, d))
        .collect();
    let mut legs: Vec<ExternalLeg> = prefix.iter().map(|s| leg_of(s, true)).collect();
    legs.extend(suffix.iter().map(|s| leg_of(s, false)));
    let mut ends: Vec<Endpoint> = (0..prefix.len()).map(Endpoint::Leg).collect();
    for (v, g) in core.iter().enumerate() {
        ends.extend(g.symbols().map(|_| Endpoint::Vertex(v)));
    }
    ends.extend((0..suffix.len()).map(|i| Endpoint::Leg(prefix.len() + i)));
    let word = OperatorWord::new(prefix, core, suffix).with_kind(FIELD, model.field_kind());
    (word, legs, ends)
}

/// Whether the symbol sits at the charge-in end of a directed line.
fn is_tail(sym: &OperatorSymbol) -> bool {
    match sym {
        OperatorSymbol::Spinor { conj, .. } => *conj,
        OperatorSymbol::Scalar { dagger, .. } => *dagger,
        OperatorSymbol::Ladder { charge, dagger, .. } => (*charge == Charge::Particle) == *dagger,
        _ => false,
    }
}

fn edge_of(word: &OperatorWord, flat: &[crate::wick::FlatSymbol], ends: &[Endpoint], i: usize, j: usize) -> Result<Edge> {
    let (a, b) = (&flat[i].symbol, &flat[j].symbol);
    let (ea, eb) = (ends[i], ends[j]);
    let kind = match (a, word.kind_of(a)) {
        (OperatorSymbol::Monopole { detector, .. } | OperatorSymbol::Sigma { detector, .. }, _) => LineKind::Detector(*detector),
        (_, Some(FieldKind::Spinor)) => LineKind::Spinor,
        _ => LineKind::Scalar,
    };
    let directed = matches!(word.kind_of(a), Some(FieldKind::ComplexScalar | FieldKind::Spinor));
    if !directed {
        return Ok(Edge {
            kind,
            directed,
            from: ea.min(eb),
            to: ea.max(eb),
        });
    }
    match (is_tail(a), is_tail(b)) {
        (true, false) => Ok(Edge { kind, directed, from: ea, to: eb }),
        (false, true) => Ok(Edge { kind, directed, from: eb, to: ea }),
        _ => Err(Error::MalformedWord(format!("line {ea}–{eb} joins two ends of the same orientation"))),
    }
}

/// All diagrams of order `order` between two states with detectors `0..n_detectors`.
/// Every assignment of detectors to the time-ranked vertices is included.
pub fn enumerate_diagrams(model: Model, order: usize, in_state: &ExternalState, out_state: &ExternalState, n_detectors: u32) -> Result<Vec<Diagram>> {
    if n_detectors == 0 {
        return Err(Error::IncompatibleState("a process needs at least one detector".into()));
    }
    in_state.validate(model, n_detectors)?;
    out_state.validate(model, n_detectors)?;
    let kind = model.field_kind();
    let normalization = in_state.normalization(kind) * out_state.normalization(kind);
    let mut out: Vec<Diagram> = Vec::new();
    let mut index: HashMap<(Vec<u32>, Vec<Edge>, i8), usize> = HashMap::new();
    for seq in sequences(n_detectors, order) {
        let (word, legs, ends) = process_word(model, &seq, in_state, out_state);
        let flat = word.flatten();
        for pairing in enumerate_full_contractions(&word)? {
            let mut edges = pairing
                .pairs
                .iter()
                .map(|&(i, j)| edge_of(&word, &flat, &ends, i, j))
                .collect::<Result<Vec<_>>>()?;
            edges.sort();
            let key = (seq.clone(), edges.clone(), pairing.sign);
            match index.get(&key) {
                Some(&d) => out[d].symmetry_factor += 1,
                None => {
                    index.insert(key, out.len());
                    out.push(Diagram {
                        model,
                        order,
                        vertices: seq
                            .iter()
                            .enumerate()
                            .map(|(v, &detector)| DiagramVertex {
                                detector,
                                index: (model == Model::Spinor).then(|| format!("A{}", v + 1)),
                            })
                            .collect(),
                        edges,
                        legs: legs.clone(),
                        symmetry_factor: 1,
                        sign: pairing.sign,
                        normalization,
                        word: word.clone(),
                        pairing,
                        ends: ends.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every word of length `k` over `0..n`, lexicographically.
fn sequences(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..n).map(move |d| {
                    let mut t = s.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

/// Number of full contractions summed over all vertex detector assignments.
pub fn contraction_count(model: Model, order: usize, in_state: &ExternalState, out_state: &ExternalState, n_detectors: u32) -> Result<usize> {
    let mut n = 0;
    for seq in sequences(n_detectors, order) {
        let (word, _, _) = process_word(model, &seq, in_state, out_state);
        n += enumerate_full_contractions(&word)?.len();
    }
    Ok(n)
}

impl Diagram {
    /// Breaches of the vertex rules: one detector line and the model's number
    /// of field lines per vertex, and one incoming plus one outgoing end for
    /// directed lines.
    pub fn structure_violations(&self) -> Vec<String> {
        let want_fields = if self.model == Model::Linear { 1 } else { 2 };
        let mut out = Vec::new();
        for v in 0..self.order {
            let at = Endpoint::Vertex(v);
            let mut det = 0;
            let mut field = 0;
            let (mut heads, mut tails) = (0, 0);
            for e in &self.edges {
                for (end, is_from) in [(e.from, true), (e.to, false)] {
                    if end != at {
                        continue;
                    }
                    match e.kind {
                        LineKind::Detector(_) => det += 1,
                        _ => {
                            field += 1;
                            if e.directed {
                                if is_from {
                                    tails += 1;
                                } else {
                                    heads += 1;
                                }
                            }
                        }
                    }
                }
            }
            if det != 1 {
                out.push(format!("v{} has {det} detector lines", v + 1));
            }
            if field != want_fields {
                out.push(format!("v{} has {field} field lines", v + 1));
            }
            if heads > 1 || tails > 1 {
                out.push(format!("v{} has {heads} incoming and {tails} outgoing directed ends", v + 1));
            }
        }
        out
    }

    /// Adjacency text: header, vertices, legs, edges, `end`.
    pub fn to_adjacency(&self) -> String {
        let mut s = String::new();
        let sign = if self.sign < 0 { "-1" } else { "+1" };
        let _ = writeln!(
            s,
            "diagram model={} order={} symmetry={} sign={}",
            self.model.id(),
            self.order,
            self.symmetry_factor,
            sign
        );
        for (v, vx) in self.vertices.iter().enumerate() {
            match &vx.index {
                Some(a) => {
                    let _ = writeln!(s, "vertex v{} detector={} index={a}", v + 1, vx.detector);
                }
                None => {
                    let _ = writeln!(s, "vertex v{} detector={}", v + 1, vx.detector);
                }
            }
        }
        for (l, leg) in self.legs.iter().enumerate() {
            let _ = writeln!(s, "leg L{} {leg}", l + 1);
        }
        for e in &self.edges {
            let kind = match e.kind {
                LineKind::Detector(d) => format!("detector{d}"),
                LineKind::Scalar => "scalar".into(),
                LineKind::Spinor => "spinor".into(),
            };
            let arrow = if e.directed { "->" } else { "--" };
            let _ = writeln!(s, "edge {kind} {} {arrow} {}", e.from, e.to);
        }
        s.push_str("end\n");
        s
    }
}

/// Concatenated adjacency blocks.
pub fn adjacency_listing(diagrams: &[Diagram]) -> String {
    diagrams.iter().map(Diagram::to_adjacency).collect()
}
