//! Isomorphism of small graphs: colour refinement seeded by degrees and
//! distance profiles, then backtracking over refined classes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::qmcheck::FiniteGraph;

pub const ISO_CAP: usize = 200;

fn refine(g: &FiniteGraph) -> Vec<u64> {
    let n = g.len();
    let dm = g.distances();
    let seed: Vec<(usize, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut row = dm.row(v).to_vec();
            row.sort_unstable();
            (g.degree(v), row)
        })
        .collect();
    let mut colour = relabel(&seed);
    loop {
        let sig: Vec<(u64, Vec<u64>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = g.neighbors(v).iter().map(|&w| colour[w as usize]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let next = relabel(&sig);
        if count_distinct(&next) == count_distinct(&colour) {
            return next;
        }
        colour = next;
    }
}

/// Replaces signatures by dense ids in sorted signature order, so that
/// isomorphic graphs get the same ids.
fn relabel<T: Ord + Clone + std::hash::Hash>(sig: &[T]) -> Vec<u64> {
    let mut distinct: Vec<T> = sig.to_vec();
    distinct.sort();
    distinct.dedup();
    let ids: HashMap<&T, u64> = distinct.iter().enumerate().map(|(i, s)| (s, i as u64)).collect();
    sig.iter().map(|s| ids[s]).collect()
}

fn count_distinct(c: &[u64]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// An isomorphism `g → h` as a vertex map, if one exists.
pub fn find_isomorphism(g: &FiniteGraph, h: &FiniteGraph) -> Result<Option<Vec<usize>>> {
    if g.len().max(h.len()) > ISO_CAP {
        return Err(Error::TooLarge {
            what: "isomorphism",
            size: g.len().max(h.len()),
            cap: ISO_CAP,
        });
    }
    if g.len() != h.len() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let n = g.len();
    // Refine both graphs together so colour ids are comparable.
    let joint = disjoint_union(g, h);
    let colour = refine(&joint);
    let (cg, ch) = colour.split_at(n);
    let mut a = cg.to_vec();
    let mut b = ch.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Ok(None);
    }
    // Map vertices in order of rarest colour class first, then BFS order.
    let mut freq: HashMap<u64, usize> = HashMap::new();
    for &c in cg {
        *freq.entry(c).or_default() += 1;
    }
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let start = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (freq[&cg[v]], v))
            .expect("unplaced vertex");
        placed[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| w as usize).filter(|&w| !placed[w]).collect();
            nb.sort_by_key(|&w| (freq[&cg[w]], w));
            for w in nb {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(g, h, cg, ch, &order, 0, &mut map, &mut used) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

pub fn are_isomorphic(g: &FiniteGraph, h: &FiniteGraph) -> Result<bool> {
    Ok(find_isomorphism(g, h)?.is_some())
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &FiniteGraph,
    h: &FiniteGraph,
    cg: &[u64],
    ch: &[u64],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for w in 0..h.len() {
        if used[w] || ch[w] != cg[v] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&x| g.adjacent(v, x) == h.adjacent(w, map[x]));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend(g, h, cg, ch, order, depth + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}

fn disjoint_union(g: &FiniteGraph, h: &FiniteGraph) -> FiniteGraph {
    let n = g.len();
    let mut edges = g.edges();
    edges.extend(h.edges().into_iter().map(|(a, b)| (a + n, b + n)));
    FiniteGraph::new(n + h.len(), &edges).expect("valid union")
}

/// True iff `map` is an isomorphism `g → h`.
pub fn is_isomorphism(g: &FiniteGraph, h: &FiniteGraph, map: &[usize]) -> bool {
    if g.len() != h.len() || map.len() != g.len() {
        return false;
    }
    let mut seen = vec![false; h.len()];
    for &w in map {
        if w >= h.len() || std::mem::replace(&mut seen[w], true) {
            return false;
        }
    }
    g.edge_count() == h.edge_count() && g.edges().iter().all(|&(a, b)| h.adjacent(map[a], map[b]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmcheck::tests::{complete, cycle, path, product};

    #[test]
    fn basic() {
        let c6 = cycle(6);
        let relabelled = FiniteGraph::new(6, &[(0, 3), (3, 1), (1, 4), (4, 2), (2, 5), (5, 0)]).unwrap();
        let m = find_isomorphism(&c6, &relabelled).unwrap().unwrap();
        assert!(is_isomorphism(&c6, &relabelled, &m));
        assert!(!are_isomorphic(&cycle(6), &product(&complete(3), &complete(2))).unwrap());
        assert!(!are_isomorphic(&path(4), &FiniteGraph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()).unwrap());
        assert!(are_isomorphic(&product(&complete(2), &complete(3)), &product(&complete(3), &complete(2))).unwrap());
    }

    #[test]
    fn regular_non_isomorphic() {
        // two triangles versus a hexagon: same degree sequence
        let two = FiniteGraph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!are_isomorphic(&two, &cycle(6)).unwrap());
    }
}
