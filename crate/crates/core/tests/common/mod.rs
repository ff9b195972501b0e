#![allow(dead_code)]

use gprod::qmcheck::FiniteGraph;
use gprod::{CayleyTable, GraphProductSpec, GroupDescriptor, SimplicialGraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spec(n: usize, edges: &[(usize, usize)], groups: Vec<GroupDescriptor>) -> GraphProductSpec {
    let g = SimplicialGraph::from_indices(n, edges).unwrap();
    GraphProductSpec::new(g, groups).unwrap()
}

pub fn c(n: u32) -> GroupDescriptor {
    GroupDescriptor::cyclic(n).unwrap()
}

pub fn z() -> GroupDescriptor {
    GroupDescriptor::Integers
}

/// Permutations of {0,1,2}, identity first.
pub fn s3_perms() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]]
}

/// `(p·q)(i) = p(q(i))`
pub fn compose(p: &[usize; 3], q: &[usize; 3]) -> [usize; 3] {
    [p[q[0]], p[q[1]], p[q[2]]]
}

pub fn s3() -> GroupDescriptor {
    let perms = s3_perms();
    let rows = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| {
                    let r = compose(p, q);
                    perms.iter().position(|x| *x == r).unwrap()
                })
                .collect()
        })
        .collect();
    GroupDescriptor::table(CayleyTable::new(rows).unwrap()).unwrap()
}

pub fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn random_spec<R: Rng>(rng: &mut R, max_n: usize, menu: &[GroupDescriptor]) -> GraphProductSpec {
    let n = rng.gen_range(1..=max_n);
    let edges = random_edges(rng, n, 0.5);
    let groups = (0..n).map(|_| menu.choose(rng).unwrap().clone()).collect();
    spec(n, &edges, groups)
}

/// Exhaustive clique number.
pub fn clique_number(g: &SimplicialGraph) -> usize {
    let n = g.len();
    (0u64..1 << n)
        .filter(|&m| (0..n).all(|a| (a + 1..n).all(|b| m >> a & 1 == 0 || m >> b & 1 == 0 || g.adjacent(a, b))))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Exhaustive chromatic number with a witness colouring.
pub fn chromatic(g: &SimplicialGraph) -> (usize, Vec<usize>) {
    let n = g.len();
    for k in 1..=n.max(1) {
        let mut col = vec![0usize; n];
        loop {
            if g.edges().iter().all(|&(a, b)| col[a] != col[b]) {
                return (k, col);
            }
            let mut i = 0;
            while i < n {
                col[i] += 1;
                if col[i] < k {
                    break;
                }
                col[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    unreachable!()
}

/// Factors for product graphs with known hyperplane structure.
#[derive(Clone, Copy, Debug)]
pub enum Factor {
    Clique(usize),
    Path(usize),
    Star(usize),
}

impl Factor {
    pub fn len(self) -> usize {
        match self {
            Factor::Clique(n) | Factor::Path(n) => n,
            Factor::Star(k) => k + 1,
        }
    }

    pub fn adjacent(self, a: usize, b: usize) -> bool {
        a != b
            && match self {
                Factor::Clique(_) => true,
                Factor::Path(_) => a.abs_diff(b) == 1,
                Factor::Star(_) => a == 0 || b == 0,
            }
    }

    pub fn distance(self, a: usize, b: usize) -> usize {
        match self {
            Factor::Clique(_) => usize::from(a != b),
            Factor::Path(_) => a.abs_diff(b),
            Factor::Star(_) if a == b => 0,
            Factor::Star(_) if a == 0 || b == 0 => 1,
            Factor::Star(_) => 2,
        }
    }

    /// Distance counted in sector-walls.
    pub fn sector_wall_distance(self, a: usize, b: usize) -> usize {
        match self {
            Factor::Clique(n) if n >= 3 && a != b => 2,
            _ => self.distance(a, b),
        }
    }

    pub fn binary(self) -> bool {
        !matches!(self, Factor::Clique(n) if n >= 3)
    }
}

pub fn coords(factors: &[Factor], mut v: usize) -> Vec<usize> {
    let mut out = vec![0; factors.len()];
    for i in (0..factors.len()).rev() {
        out[i] = v % factors[i].len();
        v /= factors[i].len();
    }
    out
}

pub fn product_graph(factors: &[Factor]) -> FiniteGraph {
    let n: usize = factors.iter().map(|f| f.len()).product();
    let mut edges = Vec::new();
    for a in 0..n {
        let ca = coords(factors, a);
        for b in a + 1..n {
            let cb = coords(factors, b);
            let diff: Vec<usize> = (0..factors.len()).filter(|&i| ca[i] != cb[i]).collect();
            if diff.len() == 1 && factors[diff[0]].adjacent(ca[diff[0]], cb[diff[0]]) {
                edges.push((a, b));
            }
        }
    }
    FiniteGraph::new(n, &edges).unwrap()
}

pub fn product_distance(factors: &[Factor], a: usize, b: usize, sw: bool) -> usize {
    let (ca, cb) = (coords(factors, a), coords(factors, b));
    factors
        .iter()
        .enumerate()
        .map(|(i, f)| if sw { f.sector_wall_distance(ca[i], cb[i]) } else { f.distance(ca[i], cb[i]) })
        .sum()
}

pub fn to_petgraph(g: &FiniteGraph) -> petgraph::graph::UnGraph<(), ()> {
    let mut p = petgraph::graph::UnGraph::new_undirected();
    let nodes: Vec<_> = (0..g.len()).map(|_| p.add_node(())).collect();
    for (a, b) in g.edges() {
        p.add_edge(nodes[a], nodes[b], ());
    }
    p
}

/// Product in a vertex group, computed without the library's group code.
pub fn oracle_mul(d: &GroupDescriptor, a: i64, b: i64) -> i64 {
    match d {
        GroupDescriptor::Cyclic(n) => (a + b).rem_euclid(*n as i64),
        GroupDescriptor::Integers => a + b,
        GroupDescriptor::Table(t) => {
            assert_eq!(t.order(), 6, "oracle only knows S3");
            let p = s3_perms();
            let r = compose(&p[a as usize], &p[b as usize]);
            p.iter().position(|x| *x == r).unwrap() as i64
        }
    }
}

pub fn oracle_inv(d: &GroupDescriptor, a: i64) -> i64 {
    match d {
        GroupDescriptor::Cyclic(n) => (-a).rem_euclid(*n as i64),
        GroupDescriptor::Integers => -a,
        GroupDescriptor::Table(_) => (0..6).find(|&b| oracle_mul(d, a, b) == 0).unwrap(),
    }
}

pub fn random_element<R: Rng>(rng: &mut R, d: &GroupDescriptor, allow_identity: bool) -> i64 {
    loop {
        let x = match d {
            GroupDescriptor::Cyclic(n) => rng.gen_range(0..*n as i64),
            GroupDescriptor::Integers => rng.gen_range(-3..=3),
            GroupDescriptor::Table(t) => rng.gen_range(0..t.order() as i64),
        };
        if allow_identity || x != 0 {
            return x;
        }
    }
}

pub fn random_word<R: Rng>(rng: &mut R, spec: &GraphProductSpec, max_len: usize) -> Vec<gprod::Syllable> {
    let n = spec.graph().len();
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let v = rng.gen_range(0..n);
            gprod::Syllable::new(v, random_element(rng, spec.group(v), true))
        })
        .collect()
}

/// Applies cancellation and amalgamation moves in random order until none
/// applies.
pub fn random_rewrite<R: Rng>(rng: &mut R, spec: &GraphProductSpec, word: &[gprod::Syllable]) -> Vec<(usize, i64)> {
    let g = spec.graph();
    let mut w: Vec<(usize, i64)> = word.iter().map(|s| (s.vertex, s.value)).collect();
    loop {
        let mut moves: Vec<(usize, usize)> = Vec::new();
        for i in 0..w.len() {
            if w[i].1 == 0 {
                moves.push((i, i));
            }
            for j in i + 1..w.len() {
                if w[j].0 == w[i].0 {
                    moves.push((i, j));
                    break;
                }
                if !g.adjacent(w[j].0, w[i].0) {
                    break;
                }
            }
        }
        let Some(&(i, j)) = moves.choose(rng) else { break };
        if i == j {
            w.remove(i);
        } else {
            let v = w[i].0;
            w[i].1 = oracle_mul(spec.group(v), w[i].1, w[j].1);
            w.remove(j);
        }
    }
    w
}

/// Repeatedly moves the smallest-index vertex that can be shuffled to the
/// front.
pub fn oracle_canonical(spec: &GraphProductSpec, mut w: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    let g = spec.graph();
    let mut out = Vec::with_capacity(w.len());
    while !w.is_empty() {
        let i = (0..w.len())
            .filter(|&i| (0..i).all(|k| g.adjacent(w[k].0, w[i].0)))
            .min_by_key(|&i| w[i].0)
            .unwrap();
        out.push(w.remove(i));
    }
    out
}
