mod common;

use common::*;
use gprod::iso;
use gprod::qmcheck::{self, AxiomScope, FiniteGraph, QuasiMedianGraph};
use gprod::walls::{self, SpaceWithPartitions};
use proptest::prelude::*;

fn factor_strategy() -> impl Strategy<Value = Factor> {
    prop_oneof![
        (2usize..=4).prop_map(Factor::Clique),
        (2usize..=4).prop_map(Factor::Path),
        (2usize..=3).prop_map(Factor::Star),
    ]
}

fn factors_strategy() -> impl Strategy<Value = Vec<Factor>> {
    prop::collection::vec(factor_strategy(), 1..=3)
        .prop_filter("small", |fs| fs.iter().map(|f| f.len()).product::<usize>() <= 64)
}

fn hyperplanes_of(f: Factor) -> usize {
    match f {
        Factor::Clique(_) => 1,
        Factor::Path(n) => n - 1,
        Factor::Star(k) => k,
    }
}

fn permuted(g: &FiniteGraph, seed: u64) -> FiniteGraph {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..g.len()).collect();
    perm.shuffle(&mut rng(seed));
    let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    FiniteGraph::new(g.len(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_are_quasi_median(factors in factors_strategy()) {
        let g = QuasiMedianGraph::verify(product_graph(&factors)).unwrap();
        prop_assert_eq!(g.hyperplanes().len(), factors.iter().map(|&f| hyperplanes_of(f)).sum::<usize>());
        prop_assert_eq!(g.cubical_dimension(), factors.len());
        for x in 0..g.len() {
            for y in 0..g.len() {
                prop_assert_eq!(g.distance(x, y) as usize, product_distance(&factors, x, y, false));
                prop_assert_eq!(g.separating(x, y).len(), g.distance(x, y) as usize);
            }
        }
        let is_prism = factors.iter().all(|f| matches!(f, Factor::Clique(_) | Factor::Path(2)));
        prop_assert_eq!(qmcheck::is_prism(g.graph()).unwrap(), is_prism);
    }

    #[test]
    fn fibres_are_gated_with_coordinate_gates(factors in factors_strategy(), pick in any::<u64>()) {
        let g = QuasiMedianGraph::verify(product_graph(&factors)).unwrap();
        let k = (pick as usize) % factors.len();
        let base = coords(&factors, (pick as usize / 7) % g.len());
        let fibre: Vec<usize> = (0..g.len())
            .filter(|&v| {
                let c = coords(&factors, v);
                (0..factors.len()).all(|i| i == k || c[i] == base[i])
            })
            .collect();
        prop_assert!(g.is_gated(&fibre).unwrap());
        for x in 0..g.len() {
            let gate = g.gate(&fibre, x).unwrap();
            let (cx, cg) = (coords(&factors, x), coords(&factors, gate));
            prop_assert_eq!(cg[k], cx[k]);
            let rep = g.projection_checks(&fibre).unwrap();
            prop_assert!(rep.lipschitz_ok && rep.separation_ok);
        }
    }

    #[test]
    fn intervals_match_distance_sums(factors in factors_strategy(), x in any::<u64>(), y in any::<u64>()) {
        let g = QuasiMedianGraph::verify(product_graph(&factors)).unwrap();
        let (x, y) = (x as usize % g.len(), y as usize % g.len());
        let d = |a, b| product_distance(&factors, a, b, false);
        let expected: Vec<usize> = (0..g.len()).filter(|&z| d(x, z) + d(z, y) == d(x, y)).collect();
        let mut got = g.interval(x, y);
        got.sort_unstable();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn self_cubulation_and_exhaustive_cubulation_agree(factors in factors_strategy()) {
        let g = QuasiMedianGraph::verify(product_graph(&factors)).unwrap();
        let space = walls::hyperplane_partitions(&g).unwrap();
        let bfs = space.quasi_cubulate().unwrap();
        let all = space.quasi_cubulate_exhaustive(1 << 20).unwrap();
        prop_assert!(bfs.distances_match_walls());
        prop_assert!(iso::are_isomorphic(&bfs.graph, &all.graph).unwrap());
        prop_assert!(iso::are_isomorphic(&bfs.graph, g.graph()).unwrap());
        prop_assert!(walls::self_cubulation_check(&g).unwrap());
    }

    #[test]
    fn isomorphism_agrees_with_petgraph(n in 1usize..9, mask in any::<u64>(), other in any::<u64>(), seed in any::<u64>()) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let pick = |m: u64| -> Vec<(usize, usize)> {
            pairs.iter().enumerate().filter(|&(i, _)| m >> (i % 64) & 1 == 1).map(|(_, &p)| p).collect()
        };
        let g = FiniteGraph::new(n, &pick(mask)).unwrap();
        let h = FiniteGraph::new(n, &pick(other)).unwrap();
        let ours = iso::find_isomorphism(&g, &h).unwrap();
        let theirs = petgraph::algo::is_isomorphic(&to_petgraph(&g), &to_petgraph(&h));
        prop_assert_eq!(ours.is_some(), theirs);
        if let Some(map) = ours {
            prop_assert!(iso::is_isomorphism(&g, &h, &map));
        }
        let p = permuted(&g, seed);
        prop_assert!(iso::are_isomorphic(&g, &p).unwrap());
    }

    #[test]
    fn random_graphs_axioms_agree_with_definitions(n in 3usize..8, mask in any::<u64>()) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let edges: Vec<_> = pairs.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let g = FiniteGraph::new(n, &edges).unwrap();
        let report = qmcheck::check_axioms(&g, AxiomScope::Whole);
        prop_assert_eq!(report.k4minus_witness.is_some(), brute_k4minus(&g));
        if g.is_connected() && report.is_quasi_median() {
            prop_assert!(QuasiMedianGraph::verify(g.clone()).is_ok());
        } else {
            prop_assert!(QuasiMedianGraph::verify(g.clone()).is_err());
        }
    }
}

/// Four vertices spanning exactly five edges.
fn brute_k4minus(g: &FiniteGraph) -> bool {
    let n = g.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let q = [a, b, c, d];
                    let e = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| g.adjacent(q[i], q[j])).count();
                    if e == 5 {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn non_quasi_median_graphs_are_rejected() {
    let cycle = |n: usize| FiniteGraph::new(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap();
    for n in [5, 6, 7] {
        assert!(QuasiMedianGraph::verify(cycle(n)).is_err(), "C{n}");
    }
    let k4minus = FiniteGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    assert!(qmcheck::find_k4minus(&k4minus).is_some());
    let k32 = FiniteGraph::new(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
    assert!(qmcheck::find_k32(&k32).is_some());
    assert!(QuasiMedianGraph::verify(k32).is_err());
    assert!(QuasiMedianGraph::verify(cycle(4)).is_ok());
}

#[test]
fn sector_walls_of_cliques_make_stars() {
    for n in 3..7 {
        let g = QuasiMedianGraph::verify(product_graph(&[Factor::Clique(n)])).unwrap();
        let sw = walls::cubulate_sector_walls(&g).unwrap();
        let star = product_graph(&[Factor::Star(n)]);
        assert!(iso::are_isomorphic(&sw.cubulation.graph, &star).unwrap());
        assert!(!sw.isometric);
    }
}

#[test]
fn invalid_wall_systems_are_rejected() {
    let points: Vec<String> = (0..3).map(|i| i.to_string()).collect();
    assert!(SpaceWithPartitions::new(points.clone(), vec![vec![vec![0, 1], vec![1, 2]]]).is_err());
    assert!(SpaceWithPartitions::new(points.clone(), vec![vec![vec![0, 1]]]).is_err());
    assert!(SpaceWithPartitions::new(points, vec![vec![vec![0], vec![1, 2]]]).is_ok());
}
