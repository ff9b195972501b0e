//! DOT and JSON output, and the ball JSON reader.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cayley::Ball;
use crate::error::{Error, Result};
use crate::qmcheck::{self, AxiomReport, FiniteGraph};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// DOT with canonical words as vertex labels and syllables as edge labels.
pub fn ball_to_dot(ball: &Ball) -> String {
    let spec = ball.spec();
    let mut out = String::from("graph ball {\n");
    for (i, w) in ball.words().iter().enumerate() {
        let _ = writeln!(out, "  {i} [label={}];", quote(&spec.format(w)));
    }
    for e in ball.edges() {
        let label = format!("{}:{}", spec.graph().name(e.vertex), e.elem);
        let _ = writeln!(out, "  {} -- {} [label={}];", e.from, e.to, quote(&label));
    }
    out.push_str("}\n");
    out
}

pub fn graph_to_dot(g: &FiniteGraph, name: &str) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in 0..g.len() {
        let _ = writeln!(out, "  {v} [label={}];", quote(g.label(v)));
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  {a} -- {b};");
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallEdgeJson {
    pub from: usize,
    pub to: usize,
    pub vertex: String,
    pub elem: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson {
    pub schema: u32,
    pub spec: String,
    pub radius: u32,
    pub bound: u64,
    pub vertices: Vec<String>,
    pub edges: Vec<BallEdgeJson>,
}

/// `spec_text` is stored verbatim, normally the canonical spec text.
pub fn ball_to_json(ball: &Ball, spec_text: &str) -> BallJson {
    let spec = ball.spec();
    BallJson {
        schema: 1,
        spec: spec_text.to_string(),
        radius: ball.radius(),
        bound: ball.bound(),
        vertices: ball.words().iter().map(|w| spec.format(w)).collect(),
        edges: ball
            .edges()
            .iter()
            .map(|e| BallEdgeJson {
                from: e.from,
                to: e.to,
                vertex: spec.graph().name(e.vertex).to_string(),
                elem: e.elem,
            })
            .collect(),
    }
}

/// Reads a ball document back as a plain graph.
pub fn parse_ball_json(text: &str) -> Result<FiniteGraph> {
    let doc: BallJson =
        serde_json::from_str(text).map_err(|e| crate::ParseError::new(e.line(), e.column(), e.to_string()))?;
    if doc.schema != 1 {
        return Err(crate::ParseError::new(1, 1, format!("unsupported schema {}", doc.schema)).into());
    }
    let pairs: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e.from, e.to)).collect();
    FiniteGraph::with_labels(doc.vertices, &pairs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphJson {
    pub schema: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<[usize; 2]>,
}

pub fn graph_to_json(g: &FiniteGraph) -> GraphJson {
    GraphJson {
        schema: 1,
        vertices: g.labels().to_vec(),
        edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QmReport {
    pub schema: u32,
    pub axioms: AxiomReport,
    pub hyperplane_count: usize,
    pub dimension: usize,
    pub failures: Vec<String>,
}

/// Axioms, hyperplane count and cubical dimension of a finite graph.
pub fn qm_report(g: &FiniteGraph, scope: qmcheck::AxiomScope) -> QmReport {
    let axioms = qmcheck::check_axioms(g, scope);
    let classes = qmcheck::edge_classes(g);
    QmReport {
        schema: 1,
        failures: axioms.failures(),
        hyperplane_count: classes.count,
        dimension: qmcheck::max_transverse_family(&classes).len(),
        axioms,
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(format!("serialization failed: {e}")))
}
