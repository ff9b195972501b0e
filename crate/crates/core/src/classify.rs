//! Hyperbolicity of graph products (Meier's conditions), hyperbolicity of
//! `X(Γ,𝒢)`, and the large-join fixpoint deciding relative hyperbolicity.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::par;
use crate::words::GraphProductSpec;

/// Largest graph for full large-join enumeration.
pub const FULL_JOIN_CAP: usize = 16;

/// `Λ𝒢` is finite: `Λ` is complete and carries only finite groups.
pub fn is_narrow(spec: &GraphProductSpec, s: VertexSet) -> bool {
    s.is_subset(spec.finite_vertices()) && spec.graph().is_complete(s)
}

pub fn is_vast(spec: &GraphProductSpec, s: VertexSet) -> bool {
    !is_narrow(spec, s)
}

/// Large joins `(Λ₁, Λ₂)`, both parts vast. Full mode lists every subset with
/// every such bipartition; maximal mode lists one bipartition for each
/// inclusion-maximal underlying subset.
pub fn large_joins(spec: &GraphProductSpec, maximal_only: bool) -> Result<Vec<(VertexSet, VertexSet)>> {
    let g = spec.graph();
    let n = g.len();
    if maximal_only {
        return Ok(maximal_large_joins(spec));
    }
    if n > FULL_JOIN_CAP {
        return Err(Error::TooLarge {
            what: "large-join enumeration (use maximal joins)",
            size: n,
            cap: FULL_JOIN_CAP,
        });
    }
    let found = par::map_range(1usize << n, |bits| {
        let s = VertexSet::from_bits(bits as u64);
        if s.len() < 2 {
            return Vec::new();
        }
        g.join_decompositions(s)
            .into_iter()
            .filter(|&(a, b)| is_vast(spec, a) && is_vast(spec, b))
            .collect()
    });
    Ok(found.into_iter().flatten().collect())
}

/// Common neighbours of every vertex of `s`.
fn common_neighbours(spec: &GraphProductSpec, s: VertexSet) -> VertexSet {
    let g = spec.graph();
    s.iter().fold(g.all(), |acc, v| acc.intersection(g.nbrs(v)))
}

/// Every join is contained in one of the form `(A, N(A))` with
/// `A = N(N(A))`; the closed sets are the intersections of links.
fn maximal_large_joins(spec: &GraphProductSpec) -> Vec<(VertexSet, VertexSet)> {
    let g = spec.graph();
    let mut closed: BTreeSet<u64> = BTreeSet::from([g.all().bits()]);
    let mut frontier: Vec<VertexSet> = vec![g.all()];
    let links: Vec<VertexSet> = (0..g.len()).map(|v| g.nbrs(v)).collect();
    while let Some(s) = frontier.pop() {
        for &l in &links {
            let t = s.intersection(l);
            if closed.insert(t.bits()) {
                frontier.push(t);
            }
        }
    }
    let mut joins: Vec<(VertexSet, VertexSet)> = Vec::new();
    for &bits in &closed {
        let a = VertexSet::from_bits(bits);
        let b = common_neighbours(spec, a);
        if a.is_empty() || b.is_empty() || !is_vast(spec, a) || !is_vast(spec, b) {
            continue;
        }
        let pair = if a.first() < b.first() { (a, b) } else { (b, a) };
        if !joins.contains(&pair) {
            joins.push(pair);
        }
    }
    let unions: Vec<VertexSet> = joins.iter().map(|&(a, b)| a.union(b)).collect();
    let mut out: Vec<(VertexSet, VertexSet)> = joins
        .iter()
        .zip(&unions)
        .filter(|&(_, &u)| !unions.iter().any(|&w| w != u && u.is_subset(w)))
        .map(|(&j, _)| j)
        .collect();
    out.sort_by_key(|&(a, b)| (a.union(b).bits(), a.bits()));
    out.dedup_by_key(|&mut (a, b)| a.union(b));
    out
}

/// `Λ ∪ {v : link(v) ∩ Λ vast}`.
pub fn cp(spec: &GraphProductSpec, s: VertexSet) -> VertexSet {
    let g = spec.graph();
    (0..g.len())
        .filter(|&v| !s.contains(v) && is_vast(spec, g.nbrs(v).intersection(s)))
        .fold(s, |acc, v| acc.with(v))
}

/// Collection of vertex subsets, kept sorted by bit pattern.
pub type Collection = BTreeSet<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelHypReport {
    pub j_sequence: Vec<Collection>,
    pub j_infinity: Collection,
    pub j_final: Collection,
    pub is_relatively_hyperbolic: bool,
}

impl RelHypReport {
    /// Members of the final collection, which generate the peripheral
    /// subgroups.
    pub fn peripherals(&self) -> Vec<VertexSet> {
        self.j_final.iter().map(|&b| VertexSet::from_bits(b)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JOptions {
    pub maximal_only: bool,
    /// Apply `cp` until it stabilises instead of once per step.
    pub iterate_cp: bool,
}

fn step(spec: &GraphProductSpec, current: &Collection, iterate_cp: bool) -> Collection {
    let members: Vec<VertexSet> = current.iter().map(|&b| VertexSet::from_bits(b)).collect();
    let k = members.len();
    let mut comp = vec![usize::MAX; k];
    let mut next = Collection::new();
    for start in 0..k {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = start;
        let mut stack = vec![start];
        let mut union = VertexSet::EMPTY;
        while let Some(i) = stack.pop() {
            union = union.union(members[i]);
            for j in 0..k {
                if comp[j] == usize::MAX && is_vast(spec, members[i].intersection(members[j])) {
                    comp[j] = start;
                    stack.push(j);
                }
            }
        }
        let mut closed = cp(spec, union);
        if iterate_cp {
            loop {
                let again = cp(spec, closed);
                if again == closed {
                    break;
                }
                closed = again;
            }
        }
        next.insert(closed.bits());
    }
    next
}

/// Runs the fixpoint from the large joins.
pub fn j_sequence(spec: &GraphProductSpec, opts: JOptions) -> Result<RelHypReport> {
    let n = spec.graph().len();
    let j0: Collection = large_joins(spec, opts.maximal_only)?
        .into_iter()
        .map(|(a, b)| a.union(b).bits())
        .collect();
    let guard = if n >= 63 { u64::MAX } else { 1u64 << n };
    let mut seq = vec![j0];
    loop {
        let next = step(spec, seq.last().expect("nonempty"), opts.iterate_cp);
        if &next == seq.last().expect("nonempty") {
            break;
        }
        if seq.len() as u64 > guard {
            return Err(Error::Invariant("large-join fixpoint did not stabilise".into()));
        }
        seq.push(next);
    }
    let j_infinity = seq.last().expect("nonempty").clone();
    let covered = j_infinity.iter().fold(VertexSet::EMPTY, |acc, &b| acc.union(VertexSet::from_bits(b)));
    let mut j_final = j_infinity.clone();
    for v in spec.graph().all().difference(covered).iter() {
        j_final.insert(VertexSet::singleton(v).bits());
    }
    let whole = spec.graph().all().bits();
    let is_relatively_hyperbolic = !(j_final.len() == 1 && j_final.contains(&whole));
    Ok(RelHypReport {
        j_sequence: seq,
        j_infinity,
        j_final,
        is_relatively_hyperbolic,
    })
}

pub const MEIER_CONDITIONS: [&str; 4] = [
    "every vertex group is hyperbolic",
    "no two infinite vertex-groups are adjacent",
    "two vertex-groups adjacent to a common infinite vertex-group are adjacent",
    "square-free",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeierReport {
    pub verdict: bool,
    /// 1-based index of the first failed condition.
    pub failed_index: Option<usize>,
    pub failed_condition: Option<String>,
}

/// Meier's criterion for hyperbolicity of a graph product of hyperbolic groups.
pub fn meier(spec: &GraphProductSpec) -> MeierReport {
    let g = spec.graph();
    let infinite: Vec<usize> = (0..g.len()).filter(|&v| !spec.group(v).is_finite()).collect();
    let checks = [
        spec.groups().iter().all(|d| d.is_hyperbolic()),
        infinite
            .iter()
            .all(|&v| infinite.iter().all(|&w| !g.adjacent(v, w))),
        infinite.iter().all(|&v| g.is_complete(g.nbrs(v))),
        g.is_square_free(),
    ];
    match checks.iter().position(|ok| !ok) {
        None => MeierReport {
            verdict: true,
            failed_index: None,
            failed_condition: None,
        },
        Some(i) => MeierReport {
            verdict: false,
            failed_index: Some(i + 1),
            failed_condition: Some(MEIER_CONDITIONS[i].to_string()),
        },
    }
}

/// `X(Γ,𝒢)` is hyperbolic iff `Γ` is square-free (`Γ` finite).
pub fn x_hyperbolic(spec: &GraphProductSpec) -> bool {
    spec.graph().is_square_free()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Peripheral {
    pub vertices: Vec<String>,
    pub groups: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelHypJson {
    pub verdict: bool,
    pub j_sequence: Vec<Vec<Vec<String>>>,
    pub peripherals: Vec<Peripheral>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyReport {
    pub schema: u32,
    pub meier: MeierReport,
    pub x_hyperbolic: bool,
    pub rel_hyp: RelHypJson,
}

fn names(spec: &GraphProductSpec, s: VertexSet) -> Vec<String> {
    spec.graph().set_names(s).into_iter().map(String::from).collect()
}

pub fn classify(spec: &GraphProductSpec, opts: JOptions) -> Result<ClassifyReport> {
    let rel = j_sequence(spec, opts)?;
    let peripherals = rel
        .peripherals()
        .into_iter()
        .map(|s| {
            let sub = spec.restrict(s);
            Peripheral {
                vertices: sub.graph().names().to_vec(),
                groups: sub.groups().iter().map(|g| g.to_string()).collect(),
                edges: sub
                    .graph()
                    .edge_names()
                    .into_iter()
                    .map(|(a, b)| [a.to_string(), b.to_string()])
                    .collect(),
            }
        })
        .collect();
    Ok(ClassifyReport {
        schema: 1,
        meier: meier(spec),
        x_hyperbolic: x_hyperbolic(spec),
        rel_hyp: RelHypJson {
            verdict: rel.is_relatively_hyperbolic,
            j_sequence: rel
                .j_sequence
                .iter()
                .map(|c| c.iter().map(|&b| names(spec, VertexSet::from_bits(b))).collect())
                .collect(),
            peripherals,
        },
    })
}
