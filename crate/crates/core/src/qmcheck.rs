//! Verification toolkit for finite graphs: weakly modular and quasi-median
//! axioms, hyperplanes and sectors, gates, gated and convex hulls, intervals,
//! prisms, projections and the Helly property.
//!
//! Operations that only make sense on quasi-median graphs take a
//! [`QuasiMedianGraph`], which can only be obtained by verifying the axioms.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

pub const UNREACHABLE: u32 = u32::MAX;
/// Largest graph [`is_prism`] will factor.
pub const PRISM_CAP: usize = 1 << 14;

/// A finite simple undirected graph with optional vertex labels and an
/// optional interior mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    labels: Vec<String>,
    adj: Vec<Vec<u32>>,
    interior: Option<Vec<bool>>,
}

impl FiniteGraph {
    /// Vertices `0..n`, labelled by their index.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidEdge(a.to_string(), b.to_string()));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        for list in &mut adj {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return Err(Error::InvalidEdge("duplicate".into(), "edge".into()));
            }
        }
        Ok(FiniteGraph {
            labels,
            adj,
            interior: None,
        })
    }

    /// Marks the vertices where local axioms must hold.
    pub fn with_interior(mut self, interior: Vec<bool>) -> Self {
        assert_eq!(interior.len(), self.len());
        self.interior = Some(interior);
        self
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn interior(&self) -> Option<&[bool]> {
        self.interior.as_deref()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior.as_ref().is_none_or(|m| m[v])
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adj.iter().enumerate() {
            for &b in list.iter().filter(|&&b| b as usize > a) {
                out.push((a, b as usize));
            }
        }
        out
    }

    /// Common neighbours of `a` and `b`.
    pub fn common_neighbors(&self, a: usize, b: usize) -> Vec<usize> {
        let (x, y) = (&self.adj[a], &self.adj[b]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(x[i] as usize);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Breadth-first distances from `src`; [`UNREACHABLE`] for other components.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x] + 1;
            for &y in &self.adj[x] {
                if dist[y as usize] == UNREACHABLE {
                    dist[y as usize] = d;
                    queue.push_back(y as usize);
                }
            }
        }
        dist
    }

    pub fn distances(&self) -> DistanceMatrix {
        let n = self.len();
        let rows = par::map_range(n, |s| self.bfs(s));
        DistanceMatrix {
            n,
            d: rows.into_iter().flatten().collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.bfs(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// True iff the subgraph induced on `set` is connected.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return true;
        }
        let inside = self.mask(set);
        let mut seen = vec![false; self.len()];
        seen[set[0]] = true;
        let mut stack = vec![set[0]];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                let y = y as usize;
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == set.len()
    }

    pub fn mask(&self, set: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &v in set {
            m[v] = true;
        }
        m
    }

    /// Subgraph induced on `set` (kept in the given order); the interior mask
    /// is carried over.
    pub fn induced(&self, set: &[usize]) -> FiniteGraph {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &v) in set.iter().enumerate() {
            pos[v] = i;
        }
        let adj = set
            .iter()
            .map(|&v| {
                let mut l: Vec<u32> = self.adj[v]
                    .iter()
                    .filter_map(|&w| (pos[w as usize] != usize::MAX).then_some(pos[w as usize] as u32))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        FiniteGraph {
            labels: set.iter().map(|&v| self.labels[v].clone()).collect(),
            adj,
            interior: self.interior.as_ref().map(|m| set.iter().map(|&v| m[v]).collect()),
        }
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges().iter().all(|&(a, b)| self.common_neighbors(a, b).is_empty())
    }

    /// True iff the graph is a forest.
    pub fn is_acyclic(&self) -> bool {
        let mut dsu = DisjointSets::new(self.len());
        self.edges().into_iter().all(|(a, b)| dsu.union(a, b))
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.is_acyclic()
    }
}

/// All-pairs distances.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.d[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.d[a * self.n..(a + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Plain union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already together.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Which configurations [`check_axioms`] quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomScope {
    /// Every vertex as a base point, with exact distances in the graph.
    Whole,
    /// Only `root` as a base point. Triangle configurations are checked up to
    /// distance `triangle_radius`, quadrangle configurations when the far
    /// vertex is within `quadrangle_radius + 1`. Used for balls in
    /// vertex-transitive graphs, where distances from the centre are exact.
    Rooted {
        root: usize,
        triangle_radius: u32,
        quadrangle_radius: u32,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub triangle_ok: bool,
    pub quadrangle_ok: bool,
    /// Base, then the two adjacent vertices without a witness.
    pub triangle_failure: Option<[usize; 3]>,
    /// Base, far vertex, then its two neighbours without a witness.
    pub quadrangle_failure: Option<[usize; 4]>,
    /// `[x, y, a, b]`: `x-y` an edge, `a`, `b` common neighbours, `a`, `b` not adjacent.
    pub k4minus_witness: Option<[usize; 4]>,
    /// `[a, b, x, y, z]`: `a`, `b` non-adjacent with independent common neighbours `x`, `y`, `z`.
    pub k32_witness: Option<[usize; 5]>,
}

impl AxiomReport {
    pub fn weakly_modular(&self) -> bool {
        self.triangle_ok && self.quadrangle_ok
    }

    pub fn is_quasi_median(&self) -> bool {
        self.weakly_modular() && self.k4minus_witness.is_none() && self.k32_witness.is_none()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(w) = self.triangle_failure {
            out.push(format!("triangle condition fails at {w:?}"));
        }
        if let Some(w) = self.quadrangle_failure {
            out.push(format!("quadrangle condition fails at {w:?}"));
        }
        if let Some(w) = self.k4minus_witness {
            out.push(format!("induced K4- at {w:?}"));
        }
        if let Some(w) = self.k32_witness {
            out.push(format!("induced K3,2 at {w:?}"));
        }
        out
    }
}

fn triangle_failure_from(g: &FiniteGraph, u: usize, dist: &[u32], limit: u32) -> Option<[usize; 3]> {
    for v in 0..g.len() {
        let k = dist[v];
        if k == 0 || k == UNREACHABLE || k > limit {
            continue;
        }
        for &w in g.neighbors(v) {
            let w = w as usize;
            if w <= v || dist[w] != k {
                continue;
            }
            if !g.common_neighbors(v, w).iter().any(|&x| dist[x] + 1 == k) {
                return Some([u, v, w]);
            }
        }
    }
    None
}

fn quadrangle_failure_from(g: &FiniteGraph, u: usize, dist: &[u32], limit: u32) -> Option<[usize; 4]> {
    for z in 0..g.len() {
        let k = dist[z];
        if k < 2 || k == UNREACHABLE || k > limit + 1 {
            continue;
        }
        let lower: Vec<usize> = g
            .neighbors(z)
            .iter()
            .map(|&x| x as usize)
            .filter(|&x| dist[x] + 1 == k)
            .collect();
        for (i, &v) in lower.iter().enumerate() {
            for &w in &lower[i + 1..] {
                if !g.common_neighbors(v, w).iter().any(|&x| dist[x] + 2 == k) {
                    return Some([u, z, v, w]);
                }
            }
        }
    }
    None
}

/// Induced `K4⁻` among interior vertices.
pub fn find_k4minus(g: &FiniteGraph) -> Option<[usize; 4]> {
    let edges: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|&(a, b)| g.is_interior(a) && g.is_interior(b))
        .collect();
    par::find_map_first(edges.len(), |i| {
        let (x, y) = edges[i];
        let common: Vec<usize> = g.common_neighbors(x, y).into_iter().filter(|&c| g.is_interior(c)).collect();
        for (j, &a) in common.iter().enumerate() {
            for &b in &common[j + 1..] {
                if !g.adjacent(a, b) {
                    return Some([x, y, a, b]);
                }
            }
        }
        None
    })
}

/// Induced `K3,2` among interior vertices.
pub fn find_k32(g: &FiniteGraph) -> Option<[usize; 5]> {
    par::find_map_first(g.len(), |a| {
        if !g.is_interior(a) {
            return None;
        }
        let mut seen = HashSet::new();
        for &m in g.neighbors(a) {
            for &b in g.neighbors(m as usize) {
                let b = b as usize;
                if b <= a || !g.is_interior(b) || g.adjacent(a, b) || !seen.insert(b) {
                    continue;
                }
                let common: Vec<usize> = g.common_neighbors(a, b).into_iter().filter(|&c| g.is_interior(c)).collect();
                if common.len() < 3 {
                    continue;
                }
                for i in 0..common.len() {
                    for j in i + 1..common.len() {
                        if g.adjacent(common[i], common[j]) {
                            continue;
                        }
                        for k in j + 1..common.len() {
                            if !g.adjacent(common[i], common[k]) && !g.adjacent(common[j], common[k]) {
                                return Some([a, b, common[i], common[j], common[k]]);
                            }
                        }
                    }
                }
            }
        }
        None
    })
}

/// Checks the triangle and quadrangle conditions and looks for induced
/// `K4⁻` and `K3,2`.
pub fn check_axioms(g: &FiniteGraph, scope: AxiomScope) -> AxiomReport {
    let (triangle_failure, quadrangle_failure) = match scope {
        AxiomScope::Whole => {
            let dm = g.distances();
            let bases: Vec<usize> = (0..g.len()).filter(|&u| g.is_interior(u)).collect();
            let tri = par::find_map_first(bases.len(), |i| triangle_failure_from(g, bases[i], dm.row(bases[i]), u32::MAX - 1));
            let quad =
                par::find_map_first(bases.len(), |i| quadrangle_failure_from(g, bases[i], dm.row(bases[i]), u32::MAX - 2));
            (tri, quad)
        }
        AxiomScope::Rooted {
            root,
            triangle_radius,
            quadrangle_radius,
        } => {
            let dist = g.bfs(root);
            (
                triangle_failure_from(g, root, &dist, triangle_radius),
                quadrangle_failure_from(g, root, &dist, quadrangle_radius),
            )
        }
    };
    AxiomReport {
        triangle_ok: triangle_failure.is_none(),
        quadrangle_ok: quadrangle_failure.is_none(),
        triangle_failure,
        quadrangle_failure,
        k4minus_witness: find_k4minus(g),
        k32_witness: find_k32(g),
    }
}

/// Edge ids and the equivalence generated by "two sides of a triangle" and
/// "opposite sides of an induced square".
#[derive(Clone, Debug)]
pub struct EdgeClasses {
    pub edges: Vec<(usize, usize)>,
    /// Class index of each edge; classes are numbered by first edge.
    pub class_of: Vec<usize>,
    pub count: usize,
    /// Unordered pairs of transverse classes, each pair `(i, j)` with `i < j`.
    pub transverse: BTreeSet<(usize, usize)>,
    edge_id: HashMap<(usize, usize), usize>,
}

impl EdgeClasses {
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_id.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn class_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_id(a, b).map(|e| self.class_of[e])
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (e, &c) in self.class_of.iter().enumerate() {
            out[c].push(e);
        }
        out
    }

    pub fn are_transverse(&self, a: usize, b: usize) -> bool {
        self.transverse.contains(&(a.min(b), a.max(b)))
    }
}

/// Union-find closure of the triangle and square relations. Transversality is
/// recorded from squares whose four corners satisfy `keep_square`.
pub fn edge_classes_with(g: &FiniteGraph, keep_square: impl Fn(usize) -> bool) -> EdgeClasses {
    let edges = g.edges();
    let edge_id: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let id = |a: usize, b: usize| edge_id[&(a.min(b), a.max(b))];
    let mut dsu = DisjointSets::new(edges.len());
    for &(a, b) in &edges {
        for c in g.common_neighbors(a, b) {
            if c > b {
                dsu.union(id(a, b), id(a, c));
                dsu.union(id(a, b), id(b, c));
            }
        }
    }
    let mut squares = Vec::new();
    for x in 0..g.len() {
        let nb = g.neighbors(x);
        for (i, &y) in nb.iter().enumerate() {
            for &z in &nb[i + 1..] {
                let (y, z) = (y as usize, z as usize);
                if g.adjacent(y, z) {
                    continue;
                }
                for w in g.common_neighbors(y, z) {
                    if w == x || g.adjacent(w, x) {
                        continue;
                    }
                    dsu.union(id(x, y), id(z, w));
                    dsu.union(id(x, z), id(y, w));
                    if [x, y, z, w].iter().all(|&v| keep_square(v)) {
                        squares.push((id(x, y), id(x, z)));
                    }
                }
            }
        }
    }
    let mut number = HashMap::new();
    let class_of: Vec<usize> = (0..edges.len())
        .map(|e| {
            let r = dsu.find(e);
            let next = number.len();
            *number.entry(r).or_insert(next)
        })
        .collect();
    let transverse = squares
        .into_iter()
        .map(|(e, f)| {
            let (a, b) = (class_of[e], class_of[f]);
            (a.min(b), a.max(b))
        })
        .collect();
    EdgeClasses {
        edges,
        class_of,
        count: number.len(),
        transverse,
        edge_id,
    }
}

pub fn edge_classes(g: &FiniteGraph) -> EdgeClasses {
    edge_classes_with(g, |_| true)
}

/// A hyperplane: an edge class together with its sectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    /// Member edges `(a, b)`, `a < b`.
    pub edges: Vec<(usize, usize)>,
    /// Connected components after deleting the member edges.
    pub sectors: Vec<Vec<usize>>,
    /// Sector index of every vertex.
    pub sector_of: Vec<u32>,
}

impl EdgeClass {
    pub fn representative(&self) -> (usize, usize) {
        self.edges[0]
    }

    /// Endpoints of member edges.
    pub fn carrier(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        set.into_iter().collect()
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.sector_of[x] != self.sector_of[y]
    }
}

/// Hyperplanes of `g` with their sectors.
pub fn hyperplanes(g: &FiniteGraph) -> Vec<EdgeClass> {
    let classes = edge_classes(g);
    hyperplanes_from(g, &classes)
}

pub fn hyperplanes_from(g: &FiniteGraph, classes: &EdgeClasses) -> Vec<EdgeClass> {
    let members = classes.members();
    par::map_slice(&members, |ids| {
        let in_class: HashSet<(usize, usize)> = ids.iter().map(|&e| classes.edges[e]).collect();
        let mut sector_of = vec![u32::MAX; g.len()];
        let mut sectors = Vec::new();
        for s in 0..g.len() {
            if sector_of[s] != u32::MAX {
                continue;
            }
            let idx = sectors.len() as u32;
            sector_of[s] = idx;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in g.neighbors(x) {
                    let y = y as usize;
                    if sector_of[y] == u32::MAX && !in_class.contains(&(x.min(y), x.max(y))) {
                        sector_of[y] = idx;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            sectors.push(comp);
        }
        EdgeClass {
            edges: ids.iter().map(|&e| classes.edges[e]).collect(),
            sectors,
            sector_of,
        }
    })
}

/// Largest family of pairwise transverse classes.
pub fn max_transverse_family(classes: &EdgeClasses) -> Vec<usize> {
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); classes.count];
    for &(a, b) in &classes.transverse {
        nbrs[a].insert(b);
        nbrs[b].insert(a);
    }
    let mut best = Vec::new();
    for cliq in maximal_cliques(&nbrs) {
        if cliq.len() > best.len() {
            best = cliq;
        }
    }
    best
}

/// All maximal cliques (Bron–Kerbosch with pivoting), each sorted, in
/// lexicographic order.
pub fn maximal_cliques(nbrs: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    fn bk(
        nbrs: &[BTreeSet<usize>],
        r: &mut Vec<usize>,
        p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&&u| nbrs[u].intersection(&p).count())
            .copied()
            .expect("p or x nonempty");
        let candidates: Vec<usize> = p.difference(&nbrs[pivot]).copied().collect();
        let mut p = p;
        for v in candidates {
            r.push(v);
            let np = p.intersection(&nbrs[v]).copied().collect();
            let nx = x.intersection(&nbrs[v]).copied().collect();
            bk(nbrs, r, np, nx, out);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    let all: BTreeSet<usize> = (0..nbrs.len()).collect();
    if all.is_empty() {
        return out;
    }
    bk(nbrs, &mut Vec::new(), all, BTreeSet::new(), &mut out);
    out.sort();
    out
}

/// Verifies that `g` is a (Cartesian) product of complete graphs, by mapping
/// every vertex to its tuple of sectors and checking the product structure
/// explicitly. Returns the factor sizes, or `None` if `g` is not a prism.
pub fn prism_factors(g: &FiniteGraph) -> Result<Option<Vec<usize>>> {
    if g.len() > PRISM_CAP {
        return Err(Error::CapExceeded {
            what: "prism factorization",
            cap: PRISM_CAP,
        });
    }
    if g.is_empty() || !g.is_connected() {
        return Ok(None);
    }
    let classes = edge_classes(g);
    for a in 0..classes.count {
        for b in a + 1..classes.count {
            if !classes.are_transverse(a, b) {
                return Ok(None);
            }
        }
    }
    let hyps = hyperplanes_from(g, &classes);
    let sizes: Vec<usize> = hyps.iter().map(|h| h.sectors.len()).collect();
    let product: usize = sizes.iter().product();
    if product != g.len() {
        return Ok(None);
    }
    let mut seen = HashSet::new();
    for v in 0..g.len() {
        let tuple: Vec<u32> = hyps.iter().map(|h| h.sector_of[v]).collect();
        if !seen.insert(tuple) {
            return Ok(None);
        }
    }
    let expected_edges: usize = g.len() * sizes.iter().map(|s| s - 1).sum::<usize>() / 2;
    if expected_edges != g.edge_count() {
        return Ok(None);
    }
    for (a, b) in g.edges() {
        if hyps.iter().filter(|h| h.separates(a, b)).count() != 1 {
            return Ok(None);
        }
    }
    Ok(Some(sizes))
}

pub fn is_prism(g: &FiniteGraph) -> Result<bool> {
    Ok(prism_factors(g)?.is_some())
}

/// A finite graph that passed [`check_axioms`] on its whole vertex set,
/// together with its distances and hyperplanes.
#[derive(Clone, Debug)]
pub struct QuasiMedianGraph {
    graph: FiniteGraph,
    dist: DistanceMatrix,
    classes: EdgeClasses,
    hyperplanes: Vec<EdgeClass>,
}

impl QuasiMedianGraph {
    pub fn verify(graph: FiniteGraph) -> Result<Self> {
        let graph = FiniteGraph {
            interior: None,
            ..graph
        };
        if graph.is_empty() || !graph.is_connected() {
            return Err(Error::NotQuasiMedian("graph is empty or disconnected".into()));
        }
        let report = check_axioms(&graph, AxiomScope::Whole);
        if !report.is_quasi_median() {
            return Err(Error::NotQuasiMedian(report.failures().join("; ")));
        }
        let dist = graph.distances();
        let classes = edge_classes(&graph);
        let hyperplanes = hyperplanes_from(&graph, &classes);
        Ok(QuasiMedianGraph {
            graph,
            dist,
            classes,
            hyperplanes,
        })
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.dist.get(a, b)
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn hyperplanes(&self) -> &[EdgeClass] {
        &self.hyperplanes
    }

    pub fn edge_classes(&self) -> &EdgeClasses {
        &self.classes
    }

    /// Indices of hyperplanes separating `x` and `y`.
    pub fn separating(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.hyperplanes.len()).filter(|&h| self.hyperplanes[h].separates(x, y)).collect()
    }

    /// Unique vertex of `y_set` lying on a geodesic from `x` to every vertex
    /// of `y_set`, if any.
    pub fn gate(&self, y_set: &[usize], x: usize) -> Option<usize> {
        gate_with(&self.dist, y_set, x)
    }

    /// Gatedness decided by gates and by local convexity plus triangles;
    /// the two must agree on quasi-median graphs.
    pub fn is_gated(&self, y_set: &[usize]) -> Result<bool> {
        if y_set.is_empty() {
            return Err(Error::InvalidVertexSet("empty set".into()));
        }
        let by_gates = (0..self.len()).all(|x| self.gate(y_set, x).is_some());
        if !self.graph.is_connected_subset(y_set) {
            return Ok(by_gates);
        }
        let by_local = self.is_locally_convex_with_triangles(y_set);
        if by_gates != by_local {
            return Err(Error::Invariant(format!(
                "gatedness by gates ({by_gates}) disagrees with the local criterion ({by_local})"
            )));
        }
        Ok(by_gates)
    }

    fn is_locally_convex_with_triangles(&self, y_set: &[usize]) -> bool {
        let inside = self.graph.mask(y_set);
        for (i, &a) in y_set.iter().enumerate() {
            for &b in &y_set[i + 1..] {
                let d = self.distance(a, b);
                if (d == 1 || d == 2) && self.graph.common_neighbors(a, b).iter().any(|&c| !inside[c]) {
                    return false;
                }
            }
        }
        true
    }

    /// Intersection of all sectors containing `s`; checked to be gated.
    pub fn gated_hull(&self, s: &[usize]) -> Result<Vec<usize>> {
        if s.is_empty() {
            return Err(Error::InvalidVertexSet("empty set".into()));
        }
        let mut keep = vec![true; self.len()];
        for h in &self.hyperplanes {
            let side = h.sector_of[s[0]];
            if s.iter().all(|&x| h.sector_of[x] == side) {
                for v in 0..self.len() {
                    if h.sector_of[v] != side {
                        keep[v] = false;
                    }
                }
            }
        }
        let hull: Vec<usize> = (0..self.len()).filter(|&v| keep[v]).collect();
        if !s.iter().all(|&x| keep[x]) || !self.is_gated(&hull)? {
            return Err(Error::Invariant("gated hull is not a gated superset".into()));
        }
        Ok(hull)
    }

    /// `{m : d(x,m) + d(m,y) = d(x,y)}`.
    pub fn interval(&self, x: usize, y: usize) -> Vec<usize> {
        interval_with(&self.dist, x, y)
    }

    /// Intervals in quasi-median graphs are median: quasi-median and
    /// triangle-free.
    pub fn is_interval_median(&self, x: usize, y: usize) -> bool {
        let iv = self.interval(x, y);
        let sub = self.graph.induced(&iv);
        check_axioms(&sub, AxiomScope::Whole).is_quasi_median() && sub.is_triangle_free()
    }

    /// Least set containing `s` and closed under intervals, checked against
    /// the intersection of all multisectors containing `s`.
    pub fn convex_hull(&self, s: &[usize]) -> Result<Vec<usize>> {
        if s.is_empty() {
            return Err(Error::InvalidVertexSet("empty set".into()));
        }
        let mut inside = self.graph.mask(s);
        let mut members: Vec<usize> = s.to_vec();
        members.sort_unstable();
        members.dedup();
        loop {
            let mut added = Vec::new();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    for m in self.interval(a, b) {
                        if !inside[m] {
                            inside[m] = true;
                            added.push(m);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            members.extend(added);
            members.sort_unstable();
        }
        let mut keep = vec![true; self.len()];
        for h in &self.hyperplanes {
            let met: HashSet<u32> = s.iter().map(|&x| h.sector_of[x]).collect();
            for v in 0..self.len() {
                if !met.contains(&h.sector_of[v]) {
                    keep[v] = false;
                }
            }
        }
        if keep != inside {
            return Err(Error::Invariant(
                "interval closure disagrees with the multisector intersection".into(),
            ));
        }
        Ok(members)
    }

    /// Maximal prisms, one per maximal family of pairwise transverse
    /// hyperplanes, obtained as the intersection of the carriers.
    pub fn maximal_prisms(&self) -> Result<Vec<Vec<usize>>> {
        if self.hyperplanes.is_empty() {
            return Ok(vec![(0..self.len()).collect()]);
        }
        let mut nbrs = vec![BTreeSet::new(); self.classes.count];
        for &(a, b) in &self.classes.transverse {
            nbrs[a].insert(b);
            nbrs[b].insert(a);
        }
        let mut prisms = Vec::new();
        let mut seen = HashSet::new();
        for family in maximal_cliques(&nbrs) {
            let mut count = vec![0usize; self.len()];
            for &h in &family {
                for v in self.hyperplanes[h].carrier() {
                    count[v] += 1;
                }
            }
            let prism: Vec<usize> = (0..self.len()).filter(|&v| count[v] == family.len()).collect();
            let sub = self.graph.induced(&prism);
            match prism_factors(&sub)? {
                Some(f) if f.len() == family.len() => {}
                _ => {
                    return Err(Error::Invariant(format!(
                        "carrier intersection of family {family:?} is not a prism of dimension {}",
                        family.len()
                    )))
                }
            }
            if !seen.insert(prism.clone()) {
                return Err(Error::Invariant("two families give the same prism".into()));
            }
            prisms.push(prism);
        }
        Ok(prisms)
    }

    pub fn cubical_dimension(&self) -> usize {
        max_transverse_family(&self.classes).len()
    }

    /// Checks that the gate map onto `y_set` is 1-Lipschitz and that the
    /// hyperplanes separating two gates are exactly those separating the
    /// points and crossing `y_set`.
    pub fn projection_checks(&self, y_set: &[usize]) -> Result<ProjectionReport> {
        let gates: Vec<usize> = (0..self.len())
            .map(|x| self.gate(y_set, x).ok_or_else(|| Error::InvalidVertexSet("set is not gated".into())))
            .collect::<Result<_>>()?;
        let crossing: Vec<bool> = self
            .hyperplanes
            .iter()
            .map(|h| {
                let first = h.sector_of[y_set[0]];
                y_set.iter().any(|&y| h.sector_of[y] != first)
            })
            .collect();
        let n = self.len();
        let failures: Vec<Vec<String>> = par::map_range(n, |x| {
            let mut out = Vec::new();
            for y in x + 1..n {
                let (px, py) = (gates[x], gates[y]);
                if self.distance(px, py) > self.distance(x, y) {
                    out.push(format!("d(p({x}),p({y})) > d({x},{y})"));
                }
                for (i, h) in self.hyperplanes.iter().enumerate() {
                    if h.separates(px, py) != (h.separates(x, y) && crossing[i]) {
                        out.push(format!("hyperplane {i} misclassified for ({x},{y})"));
                    }
                }
            }
            out
        });
        let failures: Vec<String> = failures.into_iter().flatten().collect();
        Ok(ProjectionReport {
            lipschitz_ok: !failures.iter().any(|f| f.starts_with("d(")),
            separation_ok: !failures.iter().any(|f| f.starts_with("hyperplane")),
            failures,
        })
    }

    /// For gated sets: pairwise intersecting implies a common vertex.
    pub fn helly_check(&self, family: &[Vec<usize>]) -> Result<bool> {
        for y in family {
            if !self.is_gated(y)? {
                return Err(Error::InvalidVertexSet("family member is not gated".into()));
            }
        }
        let masks: Vec<Vec<bool>> = family.iter().map(|y| self.graph.mask(y)).collect();
        let pairwise = (0..family.len())
            .all(|i| (i + 1..family.len()).all(|j| family[i].iter().any(|&v| masks[j][v])));
        if !pairwise {
            return Ok(true);
        }
        Ok((0..self.len()).any(|v| masks.iter().all(|m| m[v])))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub lipschitz_ok: bool,
    pub separation_ok: bool,
    pub failures: Vec<String>,
}

/// Gate of `x` in `y_set` with respect to the given distances.
pub fn gate_with(dist: &DistanceMatrix, y_set: &[usize], x: usize) -> Option<usize> {
    let &p = y_set.iter().min_by_key(|&&y| dist.get(x, y))?;
    let dp = dist.get(x, p);
    y_set
        .iter()
        .all(|&y| dist.get(x, y) == dp.saturating_add(dist.get(p, y)))
        .then_some(p)
}

pub fn interval_with(dist: &DistanceMatrix, x: usize, y: usize) -> Vec<usize> {
    let d = dist.get(x, y);
    (0..dist.len())
        .filter(|&m| dist.get(x, m).saturating_add(dist.get(m, y)) == d)
        .collect()
}

/// Gate of `x` in `y_set` of an arbitrary finite graph.
pub fn gate(g: &FiniteGraph, y_set: &[usize], x: usize) -> Option<usize> {
    let dx = g.bfs(x);
    let &p = y_set.iter().min_by_key(|&&y| dx[y])?;
    let dp = g.bfs(p);
    y_set.iter().all(|&y| dx[y] == dx[p].saturating_add(dp[y])).then_some(p)
}
