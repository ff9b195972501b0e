//! Text formats: graph-product specs, wall systems and edge lists.
//!
//! Spec files are line oriented:
//!
//! ```text
//! # a square of order-two groups
//! vertex a C2
//! vertex b Z
//! vertex c table:groups/s3.txt
//! edge a b
//! word w a:1*b:-2
//! gens b 2,3
//! ```
//!
//! Declaration order of vertices is the canonical vertex order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, ParseError, Result};
use crate::graph::{SimplicialGraph, VertexId};
use crate::groups::{CayleyTable, Element, GroupDescriptor};
use crate::qmcheck::FiniteGraph;
use crate::walls::SpaceWithPartitions;
use crate::words::{GraphProductSpec, NormalWord};

/// A parsed spec file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub spec: GraphProductSpec,
    /// Named words in declaration order.
    pub words: Vec<(String, NormalWord)>,
    /// Generating-set overrides in declaration order.
    pub gens: Vec<(VertexId, Vec<Element>)>,
}

impl SpecFile {
    pub fn word(&self, name: &str) -> Option<&NormalWord> {
        self.words.iter().find(|(n, _)| n == name).map(|(_, w)| w)
    }
}

/// Whitespace-separated tokens with their 1-based columns, comments removed.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &body[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (body[..s].chars().count() + 1, t))
        .collect()
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn expect_len(toks: &[(usize, &str)], n: usize, line: usize, usage: &str) -> Result<(), ParseError> {
    if toks.len() != n {
        let col = toks.get(n).map_or(toks.last().map_or(1, |t| t.0), |t| t.0);
        return Err(ParseError::new(line, col, format!("expected `{usage}`")));
    }
    Ok(())
}

fn parse_descriptor(text: &str, base: Option<&Path>) -> std::result::Result<GroupDescriptor, String> {
    if text == "Z" {
        return Ok(GroupDescriptor::Integers);
    }
    if let Some(n) = text.strip_prefix('C') {
        let n: u32 = n.parse().map_err(|_| format!("bad cyclic order in {text:?}"))?;
        return GroupDescriptor::cyclic(n).map_err(|e| e.to_string());
    }
    if let Some(path) = text.strip_prefix("table:") {
        if path.is_empty() {
            return Err("empty table path".into());
        }
        let full = match base {
            Some(dir) => dir.join(path),
            None => Path::new(path).to_path_buf(),
        };
        let body = std::fs::read_to_string(&full).map_err(|e| format!("cannot read table {path}: {e}"))?;
        let table = CayleyTable::parse(&body).map_err(|e| e.to_string())?.with_source(path);
        return GroupDescriptor::table(table).map_err(|e| e.to_string());
    }
    Err(format!("unknown group descriptor {text:?} (expected C<n>, Z or table:<path>)"))
}

/// Parses a spec; table paths are resolved against `base`.
pub fn parse_spec(text: &str, base: Option<&Path>) -> Result<SpecFile> {
    let mut graph = SimplicialGraph::empty();
    let mut groups = Vec::new();
    let mut word_lines = Vec::new();
    let mut gens_lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let toks = tokens(line);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        match keyword {
            "vertex" => {
                expect_len(&toks, 3, ln, "vertex <name> <C<n>|Z|table:path>")?;
                let (ncol, name) = toks[1];
                if !valid_name(name) {
                    return Err(ParseError::new(ln, ncol, format!("invalid vertex name {name:?}")).into());
                }
                let (dcol, desc) = toks[2];
                let group = parse_descriptor(desc, base).map_err(|m| ParseError::new(ln, dcol, m))?;
                graph
                    .add_vertex(name)
                    .map_err(|e| ParseError::new(ln, ncol, e.to_string()))?;
                groups.push(group);
            }
            "edge" => {
                expect_len(&toks, 3, ln, "edge <a> <b>")?;
                for &(c, name) in &toks[1..] {
                    if graph.vertex(name).is_err() {
                        return Err(ParseError::new(ln, c, format!("no such vertex: {name}")).into());
                    }
                }
                graph
                    .add_edge(toks[1].1, toks[2].1)
                    .map_err(|e| ParseError::new(ln, toks[1].0, e.to_string()))?;
            }
            "word" => {
                expect_len(&toks, 3, ln, "word <name> <expr>")?;
                word_lines.push((ln, toks[1], toks[2]));
            }
            "gens" => {
                expect_len(&toks, 3, ln, "gens <vertex> <k1,k2,...>")?;
                gens_lines.push((ln, toks[1], toks[2]));
            }
            other => {
                return Err(ParseError::new(ln, col, format!("unknown directive {other:?}")).into());
            }
        }
    }
    let spec = GraphProductSpec::new(graph, groups)?;
    let mut words: Vec<(String, NormalWord)> = Vec::new();
    for (ln, (ncol, name), (ecol, expr)) in word_lines {
        if !valid_name(name) || words.iter().any(|(n, _)| n == name) {
            return Err(ParseError::new(ln, ncol, format!("invalid or duplicate word name {name:?}")).into());
        }
        let w = spec.word(expr).map_err(|e| ParseError::new(ln, ecol, e.to_string()))?;
        words.push((name.to_string(), w));
    }
    let mut gens = Vec::new();
    for (ln, (vcol, v), (kcol, list)) in gens_lines {
        let u = spec
            .graph()
            .vertex(v)
            .map_err(|_| ParseError::new(ln, vcol, format!("no such vertex: {v}")))?;
        let ks = list
            .split(',')
            .map(|k| k.trim().parse::<Element>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| ParseError::new(ln, kcol, format!("malformed generator list {list:?}")))?;
        if ks.is_empty() {
            return Err(ParseError::new(ln, kcol, "empty generator list").into());
        }
        gens.push((u, ks));
    }
    Ok(SpecFile { spec, words, gens })
}

/// Reads a spec file, resolving tables relative to its directory.
pub fn read_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text, path.parent())
}

/// Canonical text of a spec file; [`parse_spec`] inverts it.
pub fn print_spec(file: &SpecFile) -> String {
    let spec = &file.spec;
    let g = spec.graph();
    let mut out = String::new();
    for v in 0..g.len() {
        let _ = writeln!(out, "vertex {} {}", g.name(v), spec.group(v));
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "edge {} {}", g.name(a), g.name(b));
    }
    for (name, w) in &file.words {
        let _ = writeln!(out, "word {name} {}", spec.display(w));
    }
    for (u, ks) in &file.gens {
        let list: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "gens {} {}", g.name(*u), list.join(","));
    }
    out
}

/// Wall-system files: `point <id>` lines, then `wall <sector>|<sector>|...`
/// with comma-separated point ids.
pub fn parse_walls(text: &str) -> Result<SpaceWithPartitions> {
    let mut points: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut walls = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let toks = tokens(line);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        match keyword {
            "point" => {
                expect_len(&toks, 2, ln, "point <id>")?;
                let (c, id) = toks[1];
                if !valid_name(id) || index.contains_key(id) {
                    return Err(ParseError::new(ln, c, format!("invalid or duplicate point {id:?}")).into());
                }
                index.insert(id.to_string(), points.len());
                points.push(id.to_string());
            }
            "wall" => {
                expect_len(&toks, 2, ln, "wall <ids>|<ids>|...")?;
                let (c, body) = toks[1];
                let mut sectors = Vec::new();
                for part in body.split('|') {
                    let mut sector = Vec::new();
                    for id in part.split(',').filter(|s| !s.is_empty()) {
                        let &p = index
                            .get(id)
                            .ok_or_else(|| ParseError::new(ln, c, format!("unknown point {id:?}")))?;
                        sector.push(p);
                    }
                    sectors.push(sector);
                }
                walls.push(sectors);
            }
            other => {
                return Err(ParseError::new(ln, col, format!("unknown directive {other:?}")).into());
            }
        }
    }
    SpaceWithPartitions::new(points, walls)
}

pub fn print_walls(space: &SpaceWithPartitions) -> String {
    let mut out = String::new();
    for p in space.points() {
        let _ = writeln!(out, "point {p}");
    }
    for w in 0..space.wall_count() {
        let parts: Vec<String> = space
            .sectors(w)
            .iter()
            .map(|s| s.iter().map(|&p| space.points()[p].as_str()).collect::<Vec<_>>().join(","))
            .collect();
        let _ = writeln!(out, "wall {}", parts.join("|"));
    }
    out
}

/// Edge lists: one `a b` pair per line; `vertex x` declares an isolated
/// vertex. Vertices are numbered by first appearance.
pub fn parse_edge_list(text: &str) -> Result<FiniteGraph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut id = |name: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(name.to_string()).or_insert_with(|| {
            labels.push(name.to_string());
            labels.len() - 1
        })
    };
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let toks = tokens(line);
        match toks.as_slice() {
            [] => {}
            [(_, "vertex"), (_, name)] => {
                id(name, &mut labels);
            }
            [(_, a), (_, b)] => {
                let (x, y) = (id(a, &mut labels), id(b, &mut labels));
                edges.push((x, y, ln, toks[0].0));
            }
            _ => return Err(ParseError::new(ln, toks[0].0, "expected `a b` or `vertex x`").into()),
        }
    }
    let mut seen = std::collections::HashSet::new();
    for &(x, y, ln, col) in &edges {
        if x == y || !seen.insert((x.min(y), x.max(y))) {
            return Err(ParseError::new(ln, col, "loop or repeated edge").into());
        }
    }
    let pairs: Vec<(usize, usize)> = edges.iter().map(|&(x, y, _, _)| (x, y)).collect();
    FiniteGraph::with_labels(labels, &pairs)
}
