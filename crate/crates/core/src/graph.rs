//! Finite simplicial graphs and the exact predicates the rest of the crate
//! relies on: links and stars, induced squares, clique and chromatic numbers,
//! and join decompositions.
//!
//! Vertices are identified by their declaration index. That order is the
//! global tie-breaker for canonical words and coset representatives.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Largest number of vertices a [`SimplicialGraph`] may have.
pub const MAX_VERTICES: usize = 64;
/// Default cap for [`SimplicialGraph::clique_number`].
pub const CLIQUE_CAP: usize = 24;
/// Default cap for [`SimplicialGraph::chromatic_number`].
pub const CHROMATIC_CAP: usize = 16;

/// A set of vertices of a graph with at most 64 vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: VertexId) -> Self {
        VertexSet(1 << v)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, v: VertexId) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: VertexId) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: VertexId) {
        self.0 &= !(1 << v);
    }

    pub fn with(self, v: VertexId) -> Self {
        VertexSet(self.0 | 1 << v)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<VertexId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = VertexId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite graph without loops or multiple edges.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialGraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    nbrs: Vec<VertexSet>,
}

impl fmt::Debug for SimplicialGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialGraph")
            .field("vertices", &self.names)
            .field("edges", &self.edge_names())
            .finish()
    }
}

impl SimplicialGraph {
    /// Build a graph from vertex names and edges given by name.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = SimplicialGraph::empty();
        for v in vertices {
            g.add_vertex(v.as_ref())?;
        }
        for (a, b) in edges {
            g.add_edge(a.as_ref(), b.as_ref())?;
        }
        Ok(g)
    }

    /// Build a graph on vertices `0..n` (named by their index) from index pairs.
    pub fn from_indices(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut g = SimplicialGraph::empty();
        for name in &names {
            g.add_vertex(name)?;
        }
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidEdge(a.to_string(), b.to_string()));
            }
            g.add_edge(&names[a], &names[b])?;
        }
        Ok(g)
    }

    pub fn empty() -> Self {
        SimplicialGraph {
            names: Vec::new(),
            index: HashMap::new(),
            nbrs: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId> {
        if self.index.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        if self.names.len() == MAX_VERTICES {
            return Err(Error::TooManyVertices(MAX_VERTICES + 1));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.nbrs.push(VertexSet::EMPTY);
        Ok(id)
    }

    /// Adds an edge. Loops and repeated edges are rejected.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let x = self.vertex(a)?;
        let y = self.vertex(b)?;
        if x == y || self.adjacent(x, y) {
            return Err(Error::InvalidEdge(a.to_string(), b.to_string()));
        }
        self.nbrs[x].insert(y);
        self.nbrs[y].insert(x);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.nbrs[a].contains(b)
    }

    /// Edges as index pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in self.nbrs[a].iter().filter(|&b| b > a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn edge_names(&self) -> Vec<(&str, &str)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (self.name(a), self.name(b)))
            .collect()
    }

    /// Neighbours of `v`.
    pub fn link(&self, v: VertexId) -> Result<VertexSet> {
        self.nbrs
            .get(v)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    pub fn link_of(&self, name: &str) -> Result<VertexSet> {
        Ok(self.nbrs[self.vertex(name)?])
    }

    /// Unchecked link, for hot loops over known vertex ids.
    #[inline]
    pub fn nbrs(&self, v: VertexId) -> VertexSet {
        self.nbrs[v]
    }

    /// `link(v) ∪ {v}`.
    #[inline]
    pub fn star(&self, v: VertexId) -> VertexSet {
        self.nbrs[v].with(v)
    }

    pub fn set_names(&self, s: VertexSet) -> Vec<&str> {
        s.iter().map(|v| self.name(v)).collect()
    }

    pub fn set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet> {
        names
            .iter()
            .map(|n| self.vertex(n.as_ref()))
            .collect::<Result<VertexSet>>()
    }

    /// True iff every two distinct vertices of `s` are adjacent.
    pub fn is_complete(&self, s: VertexSet) -> bool {
        s.iter().all(|v| s.difference(self.star(v)).is_empty())
    }

    /// Finds an induced 4-cycle, returned in cyclic order, or `None` when the
    /// graph is square-free. The witness is the lexicographically first one.
    pub fn induced_square(&self) -> Option<[VertexId; 4]> {
        let n = self.len();
        for a in 0..n {
            for c in a + 1..n {
                if self.adjacent(a, c) {
                    continue;
                }
                let common = self.nbrs[a].intersection(self.nbrs[c]);
                for b in common.iter() {
                    let rest = common.difference(self.star(b));
                    if let Some(d) = rest.iter().find(|&d| d > b) {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
        None
    }

    pub fn is_square_free(&self) -> bool {
        self.induced_square().is_none()
    }

    /// True iff `(a, b, c, d)` is an induced 4-cycle in that cyclic order.
    pub fn is_induced_square(&self, sq: [VertexId; 4]) -> bool {
        let [a, b, c, d] = sq;
        if sq.iter().any(|&v| v >= self.len()) {
            return false;
        }
        self.adjacent(a, b)
            && self.adjacent(b, c)
            && self.adjacent(c, d)
            && self.adjacent(d, a)
            && !self.adjacent(a, c)
            && !self.adjacent(b, d)
    }

    /// Exact clique number with the default cap.
    pub fn clique_number(&self) -> Result<usize> {
        self.clique_number_capped(CLIQUE_CAP)
    }

    pub fn clique_number_capped(&self, cap: usize) -> Result<usize> {
        if self.len() > cap {
            return Err(Error::TooLarge {
                what: "clique",
                size: self.len(),
                cap,
            });
        }
        Ok(self.max_clique_in(self.all()).len())
    }

    /// A maximum clique inside `candidates` (branch and bound).
    pub fn max_clique_in(&self, candidates: VertexSet) -> VertexSet {
        fn expand(g: &SimplicialGraph, current: VertexSet, mut cand: VertexSet, best: &mut VertexSet) {
            if cand.is_empty() {
                if current.len() > best.len() {
                    *best = current;
                }
                return;
            }
            while let Some(v) = cand.first() {
                if current.len() + cand.len() <= best.len() {
                    return;
                }
                expand(g, current.with(v), cand.intersection(g.nbrs[v]), best);
                cand.remove(v);
            }
        }
        let mut best = VertexSet::EMPTY;
        expand(self, VertexSet::EMPTY, candidates, &mut best);
        best
    }

    /// Exact chromatic number with the default cap; returns the number of
    /// colours and a proper colouring using exactly that many.
    pub fn chromatic_number(&self) -> Result<(usize, Vec<usize>)> {
        self.chromatic_number_capped(CHROMATIC_CAP)
    }

    pub fn chromatic_number_capped(&self, cap: usize) -> Result<(usize, Vec<usize>)> {
        let n = self.len();
        if n > cap {
            return Err(Error::TooLarge {
                what: "chromatic number",
                size: n,
                cap,
            });
        }
        if n == 0 {
            return Ok((0, Vec::new()));
        }
        // Colour high-degree vertices first.
        let mut order: Vec<VertexId> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.nbrs[v].len()), v));
        let lower = self.max_clique_in(self.all()).len().max(1);
        for k in lower..=n {
            let mut colour = vec![usize::MAX; n];
            if self.colour_rec(&order, 0, k, 0, &mut colour) {
                return Ok((k, colour));
            }
        }
        Err(Error::Invariant("no colouring found with n colours".into()))
    }

    fn colour_rec(&self, order: &[VertexId], pos: usize, k: usize, used: usize, colour: &mut [usize]) -> bool {
        if pos == order.len() {
            return used == k;
        }
        if k - used > order.len() - pos {
            return false;
        }
        let v = order[pos];
        let limit = (used + 1).min(k);
        for c in 0..limit {
            if self.nbrs[v].iter().any(|w| colour[w] == c) {
                continue;
            }
            colour[v] = c;
            if self.colour_rec(order, pos + 1, k, used.max(c + 1), colour) {
                return true;
            }
        }
        colour[v] = usize::MAX;
        false
    }

    /// True iff `colouring` assigns different colours to adjacent vertices.
    pub fn is_proper_colouring(&self, colouring: &[usize]) -> bool {
        colouring.len() == self.len() && self.edges().iter().all(|&(a, b)| colouring[a] != colouring[b])
    }

    /// Connected components of the complement of the subgraph induced on `s`.
    pub fn complement_components(&self, s: VertexSet) -> Vec<VertexSet> {
        let mut left = s;
        let mut comps = Vec::new();
        while let Some(start) = left.first() {
            let mut comp = VertexSet::singleton(start);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut next = VertexSet::EMPTY;
                for v in frontier.iter() {
                    next = next.union(s.difference(self.star(v)));
                }
                frontier = next.difference(comp);
                comp = comp.union(frontier);
            }
            left = left.difference(comp);
            comps.push(comp);
        }
        comps
    }

    /// All unordered partitions of `s` into two nonempty parts such that every
    /// vertex of one part is adjacent to every vertex of the other. The first
    /// part always contains the smallest vertex of `s`.
    ///
    /// A graph is a join exactly when its complement is disconnected, so the
    /// parts are unions of complement components. The output has
    /// `2^(c-1) - 1` entries for `c` components.
    pub fn join_decompositions(&self, s: VertexSet) -> Vec<(VertexSet, VertexSet)> {
        let comps = self.complement_components(s);
        let c = comps.len();
        let mut out = Vec::new();
        if c < 2 {
            return out;
        }
        for mask in 0u64..(1u64 << (c - 1)) - 1 {
            let mut first = comps[0];
            for (i, comp) in comps[1..].iter().enumerate() {
                if mask >> i & 1 == 1 {
                    first = first.union(*comp);
                }
            }
            out.push((first, s.difference(first)));
        }
        out
    }

    /// The subgraph induced on `s`, with vertices renumbered in order.
    pub fn induced(&self, s: VertexSet) -> SimplicialGraph {
        let verts: Vec<VertexId> = s.iter().collect();
        let mut g = SimplicialGraph::empty();
        for &v in &verts {
            g.add_vertex(self.name(v)).expect("distinct names");
        }
        for (i, &a) in verts.iter().enumerate() {
            for &b in &verts[i + 1..] {
                if self.adjacent(a, b) {
                    g.add_edge(self.name(a), self.name(b)).expect("valid edge");
                }
            }
        }
        g
    }
}
