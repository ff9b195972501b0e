//! Finite exploration of the quasi-median Cayley graph `X(Γ,𝒢)`: vertices are
//! group elements, and `g`, `h` are adjacent when `g⁻¹h` is a single syllable.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet};
use crate::groups::{Element, WordMetric, IDENTITY};
use crate::qmcheck::{self, AxiomReport, AxiomScope, FiniteGraph};
use crate::words::{GraphProductSpec, NormalWord, Syllable};

pub const BALL_CAP: usize = 200_000;
/// Largest number of candidate triangles scanned by [`Ball::quasi_median`].
pub const TRIANGLE_SCAN_CAP: usize = 50_000_000;

/// An edge `from → to` with `to = from · (vertex : elem)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BallEdge {
    pub from: usize,
    pub to: usize,
    pub vertex: VertexId,
    pub elem: Element,
}

/// The ball of a given radius around `center`, with ℤ-syllables restricted to
/// `[-bound, bound]`. Edges are all edges of `X(Γ,𝒢)` between ball vertices,
/// so every visible part of a clique is complete.
#[derive(Clone, Debug)]
pub struct Ball {
    spec: GraphProductSpec,
    center: NormalWord,
    radius: u32,
    bound: u64,
    words: Vec<NormalWord>,
    relative: Vec<NormalWord>,
    norms: Vec<u32>,
    index: HashMap<NormalWord, usize>,
    edges: Vec<BallEdge>,
    truncated: Vec<bool>,
    graph: FiniteGraph,
}

/// `(u, m)`: the hyperplane dual to the cliques `m·x·G_u` for `x ∈ ⟨link(u)⟩`.
/// `m` has no tail syllable in `star(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperplaneKey {
    pub label: VertexId,
    pub base: NormalWord,
}

fn tail_vertices(spec: &GraphProductSpec, w: &NormalWord) -> VertexSet {
    spec.tail(w).iter().map(|s| s.vertex).collect()
}

/// `w` with its tail syllable at `u` (if any) removed, and that syllable's value.
fn split_tail_at(spec: &GraphProductSpec, w: &NormalWord, u: VertexId) -> (NormalWord, Element) {
    match spec.tail(w).into_iter().find(|s| s.vertex == u) {
        Some(s) => (spec.strip_tail_in(w, VertexSet::singleton(u)), s.value),
        None => (w.clone(), IDENTITY),
    }
}

impl Ball {
    /// Ball around the identity.
    pub fn new(spec: &GraphProductSpec, radius: u32, bound: u64) -> Result<Ball> {
        Ball::around(spec, &NormalWord::identity(), radius, bound)
    }

    pub fn around(spec: &GraphProductSpec, center: &NormalWord, radius: u32, bound: u64) -> Result<Ball> {
        Ball::around_capped(spec, center, radius, bound, BALL_CAP)
    }

    pub fn around_capped(
        spec: &GraphProductSpec,
        center: &NormalWord,
        radius: u32,
        bound: u64,
        cap: usize,
    ) -> Result<Ball> {
        if bound == 0 && spec.has_infinite_group() {
            return Err(Error::ZeroBound);
        }
        let center = spec.canonicalize(center.syllables())?;
        let n = spec.graph().len();
        let steps: Vec<Vec<Element>> = (0..n).map(|u| spec.group(u).enumerate(bound)).collect();
        let mut relative = vec![NormalWord::identity()];
        let mut norms = vec![0u32];
        let mut index: HashMap<NormalWord, usize> = HashMap::from([(NormalWord::identity(), 0)]);
        let mut start = 0;
        for k in 0..radius {
            let end = relative.len();
            for i in start..end {
                let w = relative[i].clone();
                let tails = tail_vertices(spec, &w);
                for u in (0..n).filter(|&u| !tails.contains(u)) {
                    for &s in &steps[u] {
                        let x = spec.right_multiply(&w, Syllable::new(u, s))?;
                        if !index.contains_key(&x) {
                            if relative.len() >= cap {
                                return Err(Error::BallTooLarge(cap));
                            }
                            index.insert(x.clone(), relative.len());
                            relative.push(x);
                            norms.push(k + 1);
                        }
                    }
                }
            }
            start = end;
        }

        let mut edges = Vec::new();
        let mut seen_cliques = HashSet::new();
        let mut truncated = vec![false; relative.len()];
        for (i, w) in relative.iter().enumerate() {
            let tails = tail_vertices(spec, w);
            for u in 0..n {
                let (base, _) = split_tail_at(spec, w, u);
                let infinite = !spec.group(u).is_finite();
                if infinite && (tails.contains(u) || norms[i] < radius) {
                    truncated[i] = true;
                }
                let b = index[&base];
                if !seen_cliques.insert((u, b)) {
                    continue;
                }
                let mut members = vec![(b, IDENTITY)];
                for &s in &steps[u] {
                    let x = spec.right_multiply(&base, Syllable::new(u, s))?;
                    if let Some(&j) = index.get(&x) {
                        members.push((j, s));
                    }
                }
                let g = spec.group(u);
                for (p, &(a, va)) in members.iter().enumerate() {
                    for &(c, vc) in &members[p + 1..] {
                        let (from, to, elem) = if a < c {
                            (a, c, g.mul(g.inv(va), vc))
                        } else {
                            (c, a, g.mul(g.inv(vc), va))
                        };
                        edges.push(BallEdge {
                            from,
                            to,
                            vertex: u,
                            elem,
                        });
                    }
                }
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));

        let words: Vec<NormalWord> = if center.is_identity() {
            relative.clone()
        } else {
            relative.iter().map(|w| spec.multiply(&center, w)).collect::<Result<_>>()?
        };
        let index = if center.is_identity() {
            index
        } else {
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect()
        };
        let labels = words.iter().map(|w| spec.format(w)).collect();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.from, e.to)).collect();
        let graph = FiniteGraph::with_labels(labels, &pairs)?;
        Ok(Ball {
            spec: spec.clone(),
            center,
            radius,
            bound,
            words,
            relative,
            norms,
            index,
            edges,
            truncated,
            graph,
        })
    }

    pub fn spec(&self) -> &GraphProductSpec {
        &self.spec
    }

    pub fn center(&self) -> &NormalWord {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &NormalWord {
        &self.words[i]
    }

    pub fn words(&self) -> &[NormalWord] {
        &self.words
    }

    /// `center⁻¹ · word(i)`.
    pub fn relative(&self, i: usize) -> &NormalWord {
        &self.relative[i]
    }

    pub fn index_of(&self, w: &NormalWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Distance from the centre.
    pub fn norm(&self, i: usize) -> u32 {
        self.norms[i]
    }

    pub fn edges(&self) -> &[BallEdge] {
        &self.edges
    }

    pub fn is_truncated(&self, i: usize) -> bool {
        self.truncated[i]
    }

    pub fn truncated_flags(&self) -> &[bool] {
        &self.truncated
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    /// Vertices at distance at most `radius - margin` from the centre.
    pub fn interior(&self, margin: u32) -> Vec<usize> {
        let limit = self.radius.saturating_sub(margin);
        (0..self.len()).filter(|&i| self.norms[i] <= limit).collect()
    }

    /// Base-point scope at the centre: triangles up to the radius, quadrangles
    /// whose far vertex is within the radius.
    pub fn axiom_scope(&self) -> AxiomScope {
        AxiomScope::Rooted {
            root: 0,
            triangle_radius: self.radius,
            quadrangle_radius: self.radius.saturating_sub(1),
        }
    }

    pub fn check_axioms(&self) -> AxiomReport {
        qmcheck::check_axioms(&self.graph, self.axiom_scope())
    }

    pub fn require(&self, w: &NormalWord) -> Result<usize> {
        self.index_of(w)
            .ok_or_else(|| Error::NotInBall(self.spec.format(w)))
    }

    /// Gated hull of the given vertices, as ball indices.
    pub fn gated_hull(&self, s: &[usize]) -> Result<Vec<usize>> {
        let words: Vec<NormalWord> = s.iter().map(|&i| self.words[i].clone()).collect();
        let hull = gated_hull_words(&self.spec, &words, self.len().max(1))?;
        let mut out = hull
            .iter()
            .map(|w| self.index_of(w).ok_or(Error::HullEscapesBall))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        Ok(out)
    }

    /// The unique minimal equilateral median triangle of `(x, y, z)`, found by
    /// scanning all median triangles inside the gated hull.
    pub fn quasi_median(&self, x: usize, y: usize, z: usize) -> Result<QuasiMedian> {
        let hull = self.gated_hull(&[x, y, z])?;
        let sub = self.graph.induced(&hull);
        let dist = sub.distances();
        let pos = |v: usize| hull.binary_search(&v).expect("point lies in its hull");
        let (px, py, pz) = (pos(x), pos(y), pos(z));
        let d = |a: usize, b: usize| dist.get(a, b);
        let between = |a: usize, b: usize, c: usize| d(a, b) + d(b, c) == d(a, c);
        let cands = |a: usize, b: usize, c: usize| -> Vec<usize> {
            (0..hull.len()).filter(|&m| between(a, m, b) && between(a, m, c)).collect()
        };
        let (cx, cy, cz) = (cands(px, py, pz), cands(py, px, pz), cands(pz, px, py));
        if cx.len().saturating_mul(cy.len()).saturating_mul(cz.len()) > TRIANGLE_SCAN_CAP {
            return Err(Error::CapExceeded {
                what: "quasi-median triangle scan",
                cap: TRIANGLE_SCAN_CAP,
            });
        }
        let mut best: Option<(u32, Vec<[usize; 3]>)> = None;
        for &a in &cx {
            for &b in &cy {
                let k = d(a, b);
                if best.as_ref().is_some_and(|(m, _)| k > *m) {
                    continue;
                }
                if d(px, a) + k + d(b, py) != d(px, py) {
                    continue;
                }
                for &c in &cz {
                    if d(b, c) != k || d(a, c) != k {
                        continue;
                    }
                    if d(px, a) + k + d(c, pz) != d(px, pz) || d(py, b) + k + d(c, pz) != d(py, pz) {
                        continue;
                    }
                    match &mut best {
                        Some((m, list)) if *m == k => list.push([a, b, c]),
                        _ => best = Some((k, vec![[a, b, c]])),
                    }
                }
            }
        }
        let (size, list) = best.ok_or_else(|| Error::Invariant("no median triangle found".into()))?;
        if list.len() != 1 {
            return Err(Error::Invariant(format!(
                "{} minimal median triangles of size {size}",
                list.len()
            )));
        }
        let [a, b, c] = list[0];
        Ok(QuasiMedian {
            points: [hull[a], hull[b], hull[c]],
            size: size as usize,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiMedian {
    /// Ball indices of `x'`, `y'`, `z'`.
    pub points: [usize; 3],
    pub size: usize,
}

pub fn distance(spec: &GraphProductSpec, g: &NormalWord, h: &NormalWord) -> Result<usize> {
    Ok(spec.quotient(g, h)?.len())
}

/// The path `g, g·s₁, g·s₁s₂, …` along the canonical word `s₁…sₙ` of `g⁻¹h`.
pub fn geodesic(spec: &GraphProductSpec, g: &NormalWord, h: &NormalWord) -> Result<Vec<NormalWord>> {
    let q = spec.quotient(g, h)?;
    let mut path = vec![spec.canonicalize(g.syllables())?];
    for &s in q.syllables() {
        let next = spec.right_multiply(path.last().expect("nonempty"), s)?;
        path.push(next);
    }
    Ok(path)
}

/// Key of the hyperplane dual to the edge `(g, g·s)`.
pub fn hyperplane_of_edge(spec: &GraphProductSpec, g: &NormalWord, s: Syllable) -> Result<HyperplaneKey> {
    spec.group(s.vertex).validate(s.value)?;
    if s.value == IDENTITY {
        return Err(Error::MalformedWord("an edge needs a non-identity syllable".into()));
    }
    Ok(clique_key(spec, g, s.vertex))
}

/// Key of the hyperplane dual to the clique `g·G_u`.
pub fn clique_key(spec: &GraphProductSpec, g: &NormalWord, u: VertexId) -> HyperplaneKey {
    HyperplaneKey {
        label: u,
        base: spec.strip_tail_in(g, spec.graph().star(u)),
    }
}

/// Keys of the hyperplanes crossed by [`geodesic`]; these are exactly the
/// hyperplanes separating `g` and `h`.
pub fn separating_hyperplanes(spec: &GraphProductSpec, g: &NormalWord, h: &NormalWord) -> Result<Vec<HyperplaneKey>> {
    let path = geodesic(spec, g, h)?;
    let q = spec.quotient(g, h)?;
    let mut keys: Vec<HyperplaneKey> = q
        .syllables()
        .iter()
        .zip(&path)
        .map(|(s, p)| clique_key(spec, p, s.vertex))
        .collect();
    keys.sort();
    Ok(keys)
}

/// Number of hyperplanes separating `x`, `y` and `z` pairwise.
pub fn separating_all(spec: &GraphProductSpec, x: &NormalWord, y: &NormalWord, z: &NormalWord) -> Result<usize> {
    let xy: HashSet<HyperplaneKey> = separating_hyperplanes(spec, x, y)?.into_iter().collect();
    let yz: HashSet<HyperplaneKey> = separating_hyperplanes(spec, y, z)?.into_iter().collect();
    let xz = separating_hyperplanes(spec, x, z)?;
    Ok(xz.iter().filter(|k| xy.contains(k) && yz.contains(k)).count())
}

/// Sector of `x` with respect to the hyperplane `key`: the gate of `x` in
/// the clique `base·G_u`, given as the element of `G_u`.
pub fn sector_of(spec: &GraphProductSpec, key: &HyperplaneKey, x: &NormalWord) -> Result<Element> {
    let q = spec.quotient(&key.base, x)?;
    Ok(spec.head_at(&q, key.label))
}

/// True iff `w ∈ ⟨a⟩⟨b⟩`.
pub fn in_product(spec: &GraphProductSpec, w: &NormalWord, a: VertexSet, b: VertexSet) -> bool {
    let mut cur = w.clone();
    loop {
        let next = spec.strip_tail_in(&spec.strip_head_in(&cur, a), b);
        if next.is_identity() {
            return true;
        }
        if next == cur {
            return false;
        }
        cur = next;
    }
}

/// Two hyperplanes are transverse iff their labels are distinct adjacent
/// vertices and their carriers meet, i.e. `m₁⁻¹m₂ ∈ ⟨st u⟩⟨st v⟩`.
pub fn transverse(spec: &GraphProductSpec, a: &HyperplaneKey, b: &HyperplaneKey) -> Result<bool> {
    let g = spec.graph();
    if a.label == b.label || !g.adjacent(a.label, b.label) {
        return Ok(false);
    }
    let q = spec.quotient(&a.base, &b.base)?;
    Ok(in_product(spec, &q, g.star(a.label), g.star(b.label)))
}

/// Gate of `g` in the clique `base·G_u`.
pub fn gate_in_clique(spec: &GraphProductSpec, g: &NormalWord, base: &NormalWord, u: VertexId) -> Result<NormalWord> {
    let q = spec.quotient(base, g)?;
    let a = spec.head_at(&q, u);
    spec.right_multiply(base, Syllable::new(u, a))
}

/// Gated hull of a finite set of elements: the vertices reachable from the
/// first point by crossing only hyperplanes that separate two points of `s`.
/// Infinite when such a hyperplane carries an infinite label.
pub fn gated_hull_words(spec: &GraphProductSpec, s: &[NormalWord], cap: usize) -> Result<Vec<NormalWord>> {
    let first = s.first().ok_or_else(|| Error::InvalidVertexSet("empty set".into()))?;
    let first = spec.canonicalize(first.syllables())?;
    let mut keys = HashSet::new();
    for x in &s[1..] {
        keys.extend(separating_hyperplanes(spec, &first, x)?);
    }
    if keys.iter().any(|k| !spec.group(k.label).is_finite()) {
        return Err(Error::HullEscapesBall);
    }
    let labels: VertexSet = keys.iter().map(|k| k.label).collect();
    let mut seen: HashSet<NormalWord> = HashSet::from([first.clone()]);
    let mut out = vec![first.clone()];
    let mut queue = VecDeque::from([first]);
    while let Some(g) = queue.pop_front() {
        for u in labels.iter() {
            if !keys.contains(&clique_key(spec, &g, u)) {
                continue;
            }
            for v in spec.group(u).enumerate(0) {
                let h = spec.right_multiply(&g, Syllable::new(u, v))?;
                if seen.insert(h.clone()) {
                    if out.len() >= cap {
                        return Err(Error::HullEscapesBall);
                    }
                    out.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
    }
    Ok(out)
}

/// A generating set for every vertex group, with its word metric.
#[derive(Clone, Debug)]
pub struct GeneratingSets {
    gens: Vec<Vec<Element>>,
    metrics: Vec<WordMetric>,
}

impl GeneratingSets {
    /// Default generators everywhere.
    pub fn standard(spec: &GraphProductSpec) -> Result<Self> {
        GeneratingSets::with_overrides(spec, &[])
    }

    pub fn with_overrides(spec: &GraphProductSpec, overrides: &[(VertexId, Vec<Element>)]) -> Result<Self> {
        let n = spec.graph().len();
        let mut gens: Vec<Vec<Element>> = (0..n).map(|u| spec.group(u).default_generators()).collect();
        for (u, set) in overrides {
            if *u >= n {
                return Err(Error::UnknownVertex(u.to_string()));
            }
            gens[*u] = set.iter().map(|&k| spec.group(*u).element_from_int(k)).collect::<Result<_>>()?;
        }
        let metrics = (0..n)
            .map(|u| {
                spec.group(u).word_metric(&gens[u]).map_err(|e| match e {
                    Error::NotGenerating { gens, .. } => Error::NotGenerating {
                        vertex: spec.graph().name(u).to_string(),
                        gens,
                    },
                    other => other,
                })
            })
            .collect::<Result<_>>()?;
        Ok(GeneratingSets { gens, metrics })
    }

    pub fn generators(&self, u: VertexId) -> &[Element] {
        &self.gens[u]
    }

    pub fn length(&self, s: Syllable) -> u64 {
        self.metrics[s.vertex].length(s.value)
    }
}

/// Sum of the vertex-group word lengths of the syllables of `g⁻¹h`.
pub fn weighted_distance(spec: &GraphProductSpec, gens: &GeneratingSets, g: &NormalWord, h: &NormalWord) -> Result<u64> {
    let q = spec.quotient(g, h)?;
    Ok(q.syllables().iter().map(|&s| gens.length(s)).sum())
}

/// An `(n+1) × (n+1)` grid of elements spanned by an induced square
/// `a-b-c-d`: point `(i, j)` is the alternating word in `G_a`, `G_c` of length
/// `i` followed by the alternating word in `G_b`, `G_d` of length `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSquare {
    pub square: [VertexId; 4],
    pub n: usize,
    pub points: Vec<NormalWord>,
}

impl FlatSquare {
    pub fn point(&self, i: usize, j: usize) -> &NormalWord {
        &self.points[i * (self.n + 1) + j]
    }

    /// Checks `d(p(i,j), p(i',j')) = |i-i'| + |j-j'|` for all pairs.
    pub fn verify(&self, spec: &GraphProductSpec) -> Result<bool> {
        let m = self.n + 1;
        for p in 0..self.points.len() {
            for q in p + 1..self.points.len() {
                let want = (p / m).abs_diff(q / m) + (p % m).abs_diff(q % m);
                if distance(spec, &self.points[p], &self.points[q])? != want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Flat square on the first induced square of `Γ`.
pub fn flat_square_witness(spec: &GraphProductSpec, n: usize) -> Result<FlatSquare> {
    let sq = spec.graph().induced_square().ok_or(Error::NoInducedSquare)?;
    flat_square_at(spec, sq, n)
}

pub fn flat_square_at(spec: &GraphProductSpec, sq: [VertexId; 4], n: usize) -> Result<FlatSquare> {
    let g = spec.graph();
    if sq.iter().any(|&v| v >= g.len()) || !g.is_induced_square(sq) {
        let names: Vec<String> = sq
            .iter()
            .map(|&v| if v < g.len() { g.name(v).to_string() } else { v.to_string() })
            .collect();
        return Err(Error::NotAnInducedSquare(names.join(",")));
    }
    let [a, b, c, d] = sq;
    let alternating = |x: VertexId, y: VertexId, len: usize| -> Vec<Syllable> {
        (0..len)
            .map(|k| {
                let v = if k % 2 == 0 { x } else { y };
                Syllable::new(v, spec.group(v).canonical_nontrivial())
            })
            .collect()
    };
    let mut points = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            let mut w = alternating(a, c, i);
            w.extend(alternating(b, d, j));
            points.push(spec.reduce(&w)?);
        }
    }
    Ok(FlatSquare { square: sq, n, points })
}
