//! Normal forms in graph products.
//!
//! A word is a sequence of syllables, each a non-identity element of one
//! vertex group. Reduction uses incremental right multiplication: a new
//! syllable at vertex `u` either amalgamates with (or cancels) the unique
//! syllable at `u` that can be shuffled to the end, or is appended. The reduced
//! result is then put in canonical shuffle order: repeatedly take, among the
//! syllables that can be shuffled to the front, the one whose vertex was
//! declared first.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{SimplicialGraph, VertexId, VertexSet};
use crate::groups::{Element, GroupDescriptor, IDENTITY};

/// A graph product: a simplicial graph with a non-trivial group on each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphProductSpec {
    graph: SimplicialGraph,
    groups: Vec<GroupDescriptor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub vertex: VertexId,
    pub value: Element,
}

impl Syllable {
    pub fn new(vertex: VertexId, value: Element) -> Self {
        Syllable { vertex, value }
    }
}

/// A reduced word in canonical shuffle order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord(Vec<Syllable>);

impl NormalWord {
    pub fn identity() -> Self {
        NormalWord(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> VertexSet {
        self.0.iter().map(|s| s.vertex).collect()
    }
}

/// Length, support, head and tail of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordAttributes {
    pub length: usize,
    pub support: VertexSet,
    pub head: Vec<Syllable>,
    pub tail: Vec<Syllable>,
}

/// `Display` adapter printing a word with vertex names, e.g. `u:1*v:2`.
pub struct WordDisplay<'a> {
    spec: &'a GraphProductSpec,
    syllables: &'a [Syllable],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("e");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{}:{}", self.spec.graph.name(s.vertex), s.value)?;
        }
        Ok(())
    }
}

impl GraphProductSpec {
    pub fn new(graph: SimplicialGraph, groups: Vec<GroupDescriptor>) -> Result<Self> {
        if groups.len() != graph.len() {
            return Err(Error::InvalidVertexSet(format!(
                "{} vertices but {} groups",
                graph.len(),
                groups.len()
            )));
        }
        if groups.iter().any(|g| g.order() == Some(1)) {
            return Err(Error::TrivialGroup);
        }
        Ok(GraphProductSpec { graph, groups })
    }

    pub fn graph(&self) -> &SimplicialGraph {
        &self.graph
    }

    pub fn groups(&self) -> &[GroupDescriptor] {
        &self.groups
    }

    pub fn group(&self, v: VertexId) -> &GroupDescriptor {
        &self.groups[v]
    }

    pub fn has_infinite_group(&self) -> bool {
        self.groups.iter().any(|g| !g.is_finite())
    }

    /// The vertices carrying a finite group.
    pub fn finite_vertices(&self) -> VertexSet {
        self.groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_finite())
            .map(|(v, _)| v)
            .collect()
    }

    /// The induced sub-product on `s`.
    pub fn restrict(&self, s: VertexSet) -> GraphProductSpec {
        GraphProductSpec {
            graph: self.graph.induced(s),
            groups: s.iter().map(|v| self.groups[v].clone()).collect(),
        }
    }

    pub fn display<'a>(&'a self, w: &'a NormalWord) -> WordDisplay<'a> {
        WordDisplay {
            spec: self,
            syllables: &w.0,
        }
    }

    pub fn display_raw<'a>(&'a self, w: &'a [Syllable]) -> WordDisplay<'a> {
        WordDisplay { spec: self, syllables: w }
    }

    pub fn format(&self, w: &NormalWord) -> String {
        self.display(w).to_string()
    }

    /// Parses `u:1*v:-2`; `e` (or an empty string) is the identity.
    /// Integers are interpreted per vertex group.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Syllable>> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Vec::new());
        }
        text.split('*')
            .map(|tok| {
                let tok = tok.trim();
                let (name, k) = tok
                    .rsplit_once(':')
                    .ok_or_else(|| Error::MalformedWord(format!("syllable {tok:?} is not vertex:k")))?;
                let k: i64 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedWord(format!("syllable {tok:?} has a non-integer exponent")))?;
                let v = self.graph.vertex(name.trim())?;
                Ok(Syllable::new(v, self.groups[v].element_from_int(k)?))
            })
            .collect()
    }

    /// Parses and reduces.
    pub fn word(&self, text: &str) -> Result<NormalWord> {
        let raw = self.parse_word(text)?;
        self.reduce(&raw)
    }

    fn check_syllables(&self, w: &[Syllable]) -> Result<()> {
        for s in w {
            if s.vertex >= self.graph.len() {
                return Err(Error::UnknownVertex(s.vertex.to_string()));
            }
            self.groups[s.vertex].validate(s.value)?;
        }
        Ok(())
    }

    /// Right-multiplies the reduced (not necessarily canonical) word `w` by
    /// one valid syllable, keeping it reduced.
    fn push_reduced(&self, w: &mut Vec<Syllable>, h: Syllable) {
        if h.value == IDENTITY {
            return;
        }
        let u = h.vertex;
        let link = self.graph.nbrs(u);
        let mut found = None;
        for j in (0..w.len()).rev() {
            let x = w[j].vertex;
            if x == u {
                found = Some(j);
                break;
            }
            if !link.contains(x) {
                break;
            }
        }
        match found {
            Some(j) => {
                let v = self.groups[u].mul(w[j].value, h.value);
                if v == IDENTITY {
                    w.remove(j);
                } else {
                    w[j].value = v;
                }
            }
            None => w.push(h),
        }
    }

    /// Reduces an arbitrary syllable sequence (identity syllables allowed).
    pub fn reduce(&self, w: &[Syllable]) -> Result<NormalWord> {
        self.check_syllables(w)?;
        let mut out = Vec::with_capacity(w.len());
        for &s in w {
            self.push_reduced(&mut out, s);
        }
        Ok(self.canonical_order(out))
    }

    /// True iff no identity syllable occurs and no two syllables at the same
    /// vertex can be shuffled next to each other.
    pub fn is_reduced(&self, w: &[Syllable]) -> bool {
        for (i, s) in w.iter().enumerate() {
            if s.value == IDENTITY {
                return false;
            }
            let link = self.graph.nbrs(s.vertex);
            for t in &w[i + 1..] {
                if t.vertex == s.vertex {
                    return false;
                }
                if !link.contains(t.vertex) {
                    break;
                }
            }
        }
        true
    }

    /// Canonical representative of a reduced word. Unreduced input is reduced
    /// first.
    pub fn canonicalize(&self, w: &[Syllable]) -> Result<NormalWord> {
        self.check_syllables(w)?;
        if self.is_reduced(w) {
            Ok(self.canonical_order(w.to_vec()))
        } else {
            self.reduce(w)
        }
    }

    fn canonical_order(&self, mut rest: Vec<Syllable>) -> NormalWord {
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut before = VertexSet::EMPTY;
            let mut best: Option<usize> = None;
            for (i, s) in rest.iter().enumerate() {
                if before.is_subset(self.graph.nbrs(s.vertex)) && best.is_none_or(|b| s.vertex < rest[b].vertex) {
                    best = Some(i);
                }
                before.insert(s.vertex);
            }
            out.push(rest.remove(best.expect("first syllable is always a candidate")));
        }
        NormalWord(out)
    }

    pub fn multiply(&self, a: &NormalWord, b: &NormalWord) -> Result<NormalWord> {
        self.check_syllables(&a.0)?;
        self.check_syllables(&b.0)?;
        let mut out = a.0.clone();
        for &s in &b.0 {
            self.push_reduced(&mut out, s);
        }
        Ok(self.canonical_order(out))
    }

    pub fn inverse(&self, a: &NormalWord) -> Result<NormalWord> {
        self.check_syllables(&a.0)?;
        let inv: Vec<Syllable> = a
            .0
            .iter()
            .rev()
            .map(|s| Syllable::new(s.vertex, self.groups[s.vertex].inv(s.value)))
            .collect();
        Ok(self.canonical_order(inv))
    }

    /// `a · s` for a single syllable.
    pub fn right_multiply(&self, a: &NormalWord, s: Syllable) -> Result<NormalWord> {
        self.check_syllables(std::slice::from_ref(&s))?;
        let mut out = a.0.clone();
        self.push_reduced(&mut out, s);
        Ok(self.canonical_order(out))
    }

    /// `a⁻¹ b`.
    pub fn quotient(&self, a: &NormalWord, b: &NormalWord) -> Result<NormalWord> {
        self.multiply(&self.inverse(a)?, b)
    }

    /// Word problem: do `a` and `b` represent the same element?
    pub fn equal(&self, a: &[Syllable], b: &[Syllable]) -> Result<bool> {
        Ok(self.reduce(a)? == self.reduce(b)?)
    }

    /// Syllables that can be shuffled to the front of `w`.
    pub fn head(&self, w: &NormalWord) -> Vec<Syllable> {
        let mut before = VertexSet::EMPTY;
        let mut out = Vec::new();
        for s in &w.0 {
            if before.is_subset(self.graph.nbrs(s.vertex)) {
                out.push(*s);
            }
            before.insert(s.vertex);
        }
        out
    }

    /// Syllables that can be shuffled to the end of `w`.
    pub fn tail(&self, w: &NormalWord) -> Vec<Syllable> {
        let mut after = VertexSet::EMPTY;
        let mut out = Vec::new();
        for s in w.0.iter().rev() {
            if after.is_subset(self.graph.nbrs(s.vertex)) {
                out.push(*s);
            }
            after.insert(s.vertex);
        }
        out.reverse();
        out
    }

    pub fn attributes(&self, w: &NormalWord) -> WordAttributes {
        WordAttributes {
            length: w.len(),
            support: w.support(),
            head: self.head(w),
            tail: self.tail(w),
        }
    }

    /// Removes every syllable supported in `s` that can be shuffled to the
    /// end, repeatedly, leaving a word whose tail avoids `s`.
    pub fn strip_tail_in(&self, w: &NormalWord, s: VertexSet) -> NormalWord {
        let mut kept: Vec<Syllable> = Vec::with_capacity(w.len());
        // Scan from the right; a syllable is removable iff it lies in `s` and
        // every kept syllable after it commutes with it.
        let mut after_kept = VertexSet::EMPTY;
        let mut removed_any = false;
        for x in w.0.iter().rev() {
            if s.contains(x.vertex) && after_kept.is_subset(self.graph.nbrs(x.vertex)) {
                removed_any = true;
                continue;
            }
            after_kept.insert(x.vertex);
            kept.push(*x);
        }
        if !removed_any {
            return w.clone();
        }
        kept.reverse();
        self.canonical_order(kept)
    }

    /// Removes head syllables supported in `s` repeatedly.
    pub fn strip_head_in(&self, w: &NormalWord, s: VertexSet) -> NormalWord {
        let mut kept: Vec<Syllable> = Vec::with_capacity(w.len());
        let mut before_kept = VertexSet::EMPTY;
        for x in &w.0 {
            if s.contains(x.vertex) && before_kept.is_subset(self.graph.nbrs(x.vertex)) {
                continue;
            }
            before_kept.insert(x.vertex);
            kept.push(*x);
        }
        self.canonical_order(kept)
    }

    /// The syllable of `head(w)` at vertex `u`, or the identity.
    pub fn head_at(&self, w: &NormalWord, u: VertexId) -> Element {
        let mut before = VertexSet::EMPTY;
        for s in &w.0 {
            if s.vertex == u {
                return if before.is_subset(self.graph.nbrs(u)) {
                    s.value
                } else {
                    IDENTITY
                };
            }
            before.insert(s.vertex);
        }
        IDENTITY
    }
}
