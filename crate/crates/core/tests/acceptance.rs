//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use common::*;
use gprod::cayley::{self, Ball};
use gprod::classify::{self, JOptions};
use gprod::qmcheck::{self, AxiomScope, QuasiMedianGraph};
use gprod::walls;
use gprod::{GraphProductSpec, NormalWord, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

/// Prefix marking a failure that is expected: a one-vertex graph has no joins,
/// so `j_final = {Γ}` even when its group is hyperbolic.
const KNOWN: &str = "known: ";

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn ball_specs() -> Vec<GraphProductSpec> {
    let mut r = rng(0xA11CE);
    (0..20).map(|_| random_spec(&mut r, 4, &[c(2), c(3), z()])).collect()
}

fn describe(spec: &GraphProductSpec) -> String {
    let groups: Vec<String> = spec.groups().iter().map(|g| g.to_string()).collect();
    format!("groups {:?} edges {:?}", groups, spec.graph().edges())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut vertices = 0;
    for spec in ball_specs() {
        let ball = Ball::new(&spec, 3, 2).map_err(|e| e.to_string())?;
        vertices += ball.len();
        let report = ball.check_axioms();
        ensure(report.is_quasi_median(), || {
            format!("{}: {:?}", describe(&spec), report.failures())
        })?;
    }
    within(start, Duration::from_secs(30), "axiom checks")?;
    Ok(format!("20 balls, {vertices} vertices, {:.1?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut pairs = 0;
    for spec in ball_specs() {
        let ball = Ball::new(&spec, 3, 2).map_err(|e| e.to_string())?;
        let interior = ball.interior(1);
        let mut keys: Vec<cayley::HyperplaneKey> = ball
            .edges()
            .iter()
            .map(|e| cayley::clique_key(&spec, ball.word(e.from), e.vertex))
            .collect();
        keys.sort();
        keys.dedup();
        let sectors: Vec<Vec<i64>> = (0..ball.len())
            .map(|i| keys.iter().map(|k| cayley::sector_of(&spec, k, ball.word(i)).unwrap()).collect())
            .collect();
        for _ in 0..100 {
            let (a, b) = (*interior.choose(&mut r).unwrap(), *interior.choose(&mut r).unwrap());
            let (g, h) = (ball.word(a), ball.word(b));
            let word_len = spec.multiply(&spec.inverse(g).unwrap(), h).unwrap().len();
            let bfs = ball.graph().bfs(a)[b] as usize;
            let sep = cayley::separating_hyperplanes(&spec, g, h).unwrap().len();
            let by_sector = (0..keys.len()).filter(|&k| sectors[a][k] != sectors[b][k]).count();
            ensure(word_len == bfs && bfs == sep && sep == by_sector, || {
                format!(
                    "{}: {} to {}: word {word_len}, bfs {bfs}, separating {sep}, sectors {by_sector}",
                    describe(&spec),
                    spec.format(g),
                    spec.format(h)
                )
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let menu = [c(2), c(3), z(), s3()];
    for w in 0..200 {
        let spec = random_spec(&mut r, 5, &menu);
        let word = random_word(&mut r, &spec, 14);
        let lib: Vec<(usize, i64)> = spec
            .reduce(&word)
            .map_err(|e| e.to_string())?
            .syllables()
            .iter()
            .map(|s| (s.vertex, s.value))
            .collect();
        for order in 0..10 {
            let mut rr = rng(1000 * w + order);
            let forms = oracle_canonical(&spec, random_rewrite(&mut rr, &spec, &word));
            ensure(forms == lib, || {
                format!("{}: word {:?}: rewriting gave {forms:?}, reduce gave {lib:?}", describe(&spec), word)
            })?;
        }
    }
    // Γ complete with finite groups: a direct product, evaluated coordinatewise.
    let finite = [c(2), c(3), c(4), s3()];
    let mut groups_checked = 0;
    let mut tries = 0;
    while groups_checked < 12 {
        tries += 1;
        ensure(tries < 10_000, || "could not sample small finite specs".into())?;
        let n = r.gen_range(1..=3);
        let groups: Vec<_> = (0..n).map(|_| finite.choose(&mut r).unwrap().clone()).collect();
        let order: u64 = groups.iter().map(|g| g.order().unwrap()).product();
        if order > 200 {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let spec = spec(n, &edges, groups);
        let eval = |w: &[gprod::Syllable]| -> Vec<i64> {
            let mut x = vec![0i64; n];
            for s in w {
                x[s.vertex] = oracle_mul(spec.group(s.vertex), x[s.vertex], s.value);
            }
            x
        };
        let mut seen: HashMap<NormalWord, Vec<i64>> = HashMap::from([(NormalWord::identity(), vec![0; n])]);
        let mut frontier = vec![NormalWord::identity()];
        while let Some(w) = frontier.pop() {
            for v in 0..n {
                for k in 1..spec.group(v).order().unwrap() as i64 {
                    let next = spec.right_multiply(&w, gprod::Syllable::new(v, k)).unwrap();
                    if !seen.contains_key(&next) {
                        seen.insert(next.clone(), eval(next.syllables()));
                        frontier.push(next);
                    }
                }
            }
        }
        let values: HashSet<&Vec<i64>> = seen.values().collect();
        ensure(seen.len() as u64 == order && values.len() as u64 == order, || {
            format!("{}: {} normal forms, {} values, order {order}", describe(&spec), seen.len(), values.len())
        })?;
        let elems: Vec<(&NormalWord, &Vec<i64>)> = seen.iter().collect();
        for (a, va) in &elems {
            for (b, vb) in &elems {
                ensure(spec.equal(a.syllables(), b.syllables()).unwrap() == (va == vb), || {
                    format!("{}: equal() disagrees on {} and {}", describe(&spec), spec.format(a), spec.format(b))
                })?;
            }
        }
        for _ in 0..200 {
            let a = random_word(&mut r, &spec, 10);
            let b = if r.gen_bool(0.5) {
                let mut b = a.clone();
                b.shuffle(&mut r);
                let v = r.gen_range(0..n);
                let x = random_element(&mut r, spec.group(v), true);
                let at = r.gen_range(0..=b.len());
                b.insert(at, gprod::Syllable::new(v, oracle_inv(spec.group(v), x)));
                b.insert(at, gprod::Syllable::new(v, x));
                b
            } else {
                random_word(&mut r, &spec, 10)
            };
            ensure(spec.equal(&a, &b).unwrap() == (eval(&a) == eval(&b)), || {
                format!("{}: equal() wrong on {a:?} vs {b:?}", describe(&spec))
            })?;
        }
        groups_checked += 1;
    }
    Ok(format!("2000 rewritings, {groups_checked} finite groups"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut done = 0;
    let mut by_clique = [0usize; 4];
    while done < 12 {
        let spec = random_spec(&mut r, 4, &[c(2), c(3), z()]);
        let clique = clique_number(spec.graph());
        if clique > 3 || by_clique[clique] >= 4 {
            continue;
        }
        by_clique[clique] += 1;
        let ball = Ball::new(&spec, clique as u32 + 1, 1).map_err(|e| e.to_string())?;
        let interior = ball.interior(1);
        let sub = ball.graph().induced(&interior);
        let classes = qmcheck::edge_classes(&sub);
        let family = qmcheck::max_transverse_family(&classes).len();
        // Same count from hyperplane keys and algebraic transversality.
        let mut keys: Vec<cayley::HyperplaneKey> = sub
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (g, h) = (ball.word(interior[a]), ball.word(interior[b]));
                let s = spec.quotient(g, h).unwrap().syllables()[0];
                cayley::clique_key(&spec, g, s.vertex)
            })
            .collect();
        keys.sort();
        keys.dedup();
        let nbrs: Vec<BTreeSet<usize>> = (0..keys.len())
            .map(|i| {
                (0..keys.len())
                    .filter(|&j| j != i && cayley::transverse(&spec, &keys[i], &keys[j]).unwrap())
                    .collect()
            })
            .collect();
        let algebraic = qmcheck::maximal_cliques(&nbrs).iter().map(Vec::len).max().unwrap_or(0);
        ensure(family == clique && algebraic == clique, || {
            format!("{}: clique {clique}, edge classes {family}, keys {algebraic}", describe(&spec))
        })?;
        done += 1;
    }
    Ok(format!("{done} specs, clique sizes {:?}", by_clique))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut triples = 0;
    let mut balls: HashMap<u32, Ball> = HashMap::new();
    for _ in 0..10 {
        let spec = random_spec(&mut r, 4, &[c(2), c(3)]);
        balls.clear();
        let near = Ball::new(&spec, 2, 1).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let pick = |r: &mut rand_chacha::ChaCha8Rng| near.word(r.gen_range(0..near.len())).clone();
            let (x, y, z) = (pick(&mut r), pick(&mut r), pick(&mut r));
            let hull = cayley::gated_hull_words(&spec, &[x.clone(), y.clone(), z.clone()], 1 << 16)
                .map_err(|e| e.to_string())?;
            let radius = hull.iter().map(|w| w.len() as u32).max().unwrap_or(0).max(1);
            let ball = match balls.get(&radius) {
                Some(b) => b,
                None => {
                    let b = Ball::new(&spec, radius, 1).map_err(|e| e.to_string())?;
                    balls.entry(radius).or_insert(b)
                }
            };
            let (ix, iy, iz) = (ball.require(&x).unwrap(), ball.require(&y).unwrap(), ball.require(&z).unwrap());
            let qm = ball.quasi_median(ix, iy, iz).map_err(|e| {
                format!("{}: {} {} {}: {e}", describe(&spec), spec.format(&x), spec.format(&y), spec.format(&z))
            })?;
            let expected = cayley::separating_all(&spec, &x, &y, &z).unwrap();
            ensure(qm.size == expected, || {
                format!("{}: size {} but {expected} hyperplanes separate all three", describe(&spec), qm.size)
            })?;
            let idx = ball.gated_hull(&qm.points).unwrap();
            ensure(qmcheck::is_prism(&ball.graph().induced(&idx)).unwrap(), || {
                format!("{}: hull of the median triangle is not a prism", describe(&spec))
            })?;
            triples += 1;
        }
    }
    Ok(format!("{triples} triples"))
}

fn qm_family() -> Vec<(&'static str, Vec<Factor>)> {
    use Factor::*;
    vec![
        ("K3", vec![Clique(3)]),
        ("C4", vec![Clique(2), Clique(2)]),
        ("K3xK2", vec![Clique(3), Clique(2)]),
        ("K3xK3", vec![Clique(3), Clique(3)]),
        ("P5", vec![Path(5)]),
        ("star3xK2", vec![Star(3), Clique(2)]),
        ("Q3", vec![Clique(2), Clique(2), Clique(2)]),
        ("K4xP3", vec![Clique(4), Path(3)]),
        ("K3xK3xK2", vec![Clique(3), Clique(3), Clique(2)]),
        ("K4xK3xP3xK2", vec![Clique(4), Clique(3), Path(3), Clique(2)]),
    ]
}

fn criterion_6() -> Outcome {
    let mut binary = 0;
    for (name, factors) in qm_family() {
        let g = QuasiMedianGraph::verify(product_graph(&factors)).map_err(|e| format!("{name}: {e}"))?;
        let sw = walls::cubulate_sector_walls(&g).map_err(|e| format!("{name}: {e}"))?;
        let out = &sw.cubulation.graph;
        let axioms = qmcheck::check_axioms(out, AxiomScope::Whole);
        ensure(axioms.is_quasi_median() && out.is_triangle_free(), || format!("{name}: output not median"))?;
        let emb = &sw.cubulation.embedding;
        for x in 0..g.len() {
            let d = out.bfs(emb[x]);
            for y in 0..g.len() {
                let (dg, dsw) = (g.distance(x, y) as usize, d[emb[y]] as usize);
                ensure(dg == product_distance(&factors, x, y, false), || format!("{name}: graph distance"))?;
                ensure(dsw == product_distance(&factors, x, y, true), || {
                    format!("{name}: d_SW({x},{y}) = {dsw}")
                })?;
                ensure(dg <= dsw && dsw <= 2 * dg, || format!("{name}: sandwich fails at ({x},{y})"))?;
            }
        }
        let all_binary = factors.iter().all(|f| f.binary());
        ensure(sw.all_binary == all_binary && sw.isometric == all_binary, || {
            format!("{name}: isometric {} all_binary {}", sw.isometric, sw.all_binary)
        })?;
        binary += usize::from(all_binary);
    }
    Ok(format!("10 graphs, {binary} with only binary hyperplanes"))
}

fn criterion_7() -> Outcome {
    let mut slowest = Duration::ZERO;
    for (name, factors) in qm_family() {
        let start = Instant::now();
        let g = QuasiMedianGraph::verify(product_graph(&factors)).map_err(|e| format!("{name}: {e}"))?;
        let space = walls::hyperplane_partitions(&g).map_err(|e| format!("{name}: {e}"))?;
        let cub = space.quasi_cubulate().map_err(|e| format!("{name}: {e}"))?;
        let ours = gprod::iso::are_isomorphic(&cub.graph, g.graph()).map_err(|e| e.to_string())?;
        let theirs = petgraph::algo::is_isomorphic(&to_petgraph(&cub.graph), &to_petgraph(g.graph()));
        ensure(ours && theirs, || format!("{name}: not isomorphic (ours {ours}, petgraph {theirs})"))?;
        within(start, Duration::from_secs(10), name)?;
        slowest = slowest.max(start.elapsed());
    }
    Ok(format!("10 graphs, slowest {slowest:.1?}"))
}

fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    for (name, n, edges) in [
        ("C5", 5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
        ("P4", 4, vec![(0, 1), (1, 2), (2, 3)]),
    ] {
        let spec = spec(n, &edges, vec![c(2); n]);
        let (chi, colouring) = chromatic(spec.graph());
        let ball = Ball::new(&spec, 4, 1).map_err(|e| e.to_string())?;
        let emb = walls::tree_embedding(&ball, &colouring).map_err(|e| format!("{name}: {e}"))?;
        ensure(emb.factors.len() == chi, || format!("{name}: {} factors, χ = {chi}", emb.factors.len()))?;
        for (k, f) in emb.factors.iter().enumerate() {
            let g = &f.graph;
            ensure(g.is_connected() && g.edge_count() + 1 == g.len(), || format!("{name}: factor {k} is not a tree"))?;
        }
        let interior = ball.interior(1);
        for &x in &interior {
            let d = ball.graph().bfs(x);
            let sigma = emb.distances_from(x);
            for &y in &interior {
                ensure(sigma[y] == d[y] as usize, || {
                    format!("{name}: Σ-distance {} vs {} at ({x},{y})", sigma[y], d[y])
                })?;
            }
        }
        lines.push(format!("{name}: {chi} trees"));
    }
    Ok(lines.join(", "))
}

fn criterion_9() -> Outcome {
    let c4 = spec(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![c(2); 4]);
    let m = classify::meier(&c4);
    ensure(!m.verdict && m.failed_condition.as_deref() == Some("square-free"), || format!("C4: {m:?}"))?;
    let zz = spec(2, &[(0, 1)], vec![z(), z()]);
    let m = classify::meier(&zz);
    ensure(
        !m.verdict && m.failed_condition.as_deref() == Some("no two infinite vertex-groups are adjacent"),
        || format!("Z-Z: {m:?}"),
    )?;
    let free = spec(2, &[], vec![z(), z()]);
    let rel = classify::j_sequence(&free, JOptions::default()).map_err(|e| e.to_string())?;
    let singles: BTreeSet<u64> = [1, 2].into();
    ensure(rel.j_final == singles && rel.is_relatively_hyperbolic, || format!("Z*Z: {rel:?}"))?;
    let rel = classify::j_sequence(&c4, JOptions::default()).map_err(|e| e.to_string())?;
    let whole: BTreeSet<u64> = [0b1111].into();
    ensure(rel.j_final == whole && !rel.is_relatively_hyperbolic, || format!("C4: {rel:?}"))?;
    Ok("4 cases".into())
}

/// One representative of every graph on `n` vertices up to isomorphism.
fn graphs_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
    for k in 1..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.retain(|&x| x != k);
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let canon = perms
            .iter()
            .map(|p| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &(a, b))| 1u32 << index[&(p[a].min(p[b]), p[a].max(p[b]))])
                    .sum::<u32>()
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(pairs.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect());
        }
    }
    out
}

fn maximal_unions(joins: &[(VertexSet, VertexSet)]) -> BTreeSet<u64> {
    let unions: BTreeSet<u64> = joins.iter().map(|&(a, b)| a.union(b).bits()).collect();
    unions
        .iter()
        .copied()
        .filter(|&u| !unions.iter().any(|&w| w != u && w & u == u))
        .collect()
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (mut graphs, mut cases, mut meier_vast) = (0, 0, 0);
    let mut counterexamples = Vec::new();
    for n in 1..=6 {
        for edges in graphs_up_to_iso(n) {
            graphs += 1;
            for assign in 0u32..1 << n {
                let groups = (0..n).map(|v| if assign >> v & 1 == 1 { z() } else { c(2) }).collect();
                let spec = spec(n, &edges, groups);
                let full = classify::large_joins(&spec, false).map_err(|e| e.to_string())?;
                let max = classify::large_joins(&spec, true).map_err(|e| e.to_string())?;
                let (mf, mm) = (maximal_unions(&full), maximal_unions(&max));
                let found: BTreeSet<u64> = max.iter().map(|&(a, b)| a.union(b).bits()).collect();
                ensure(mf == mm && mm == found, || {
                    format!("{}: full {mf:?} maximal {found:?}", describe(&spec))
                })?;
                let jf = classify::j_sequence(&spec, JOptions::default()).map_err(|e| e.to_string())?;
                let jm = classify::j_sequence(&spec, JOptions { maximal_only: true, ..Default::default() })
                    .map_err(|e| e.to_string())?;
                ensure(jf.j_final == jm.j_final, || {
                    format!("{}: j_final {:?} vs {:?}", describe(&spec), jf.j_final, jm.j_final)
                })?;
                let all = spec.graph().all();
                if classify::meier(&spec).verdict && classify::is_vast(&spec, all) {
                    meier_vast += 1;
                    let whole: BTreeSet<u64> = [all.bits()].into();
                    if jf.j_final == whole {
                        counterexamples.push((n, describe(&spec)));
                    }
                }
                cases += 1;
            }
        }
    }
    within(start, Duration::from_secs(300), "classifier sweep")?;
    if !counterexamples.is_empty() {
        let known = counterexamples.iter().all(|(n, _)| *n == 1);
        let list: Vec<&str> = counterexamples.iter().map(|(_, d)| d.as_str()).collect();
        let msg = format!(
            "full and maximal joins agree on all {cases} cases; {} hyperbolic vast cases have j_final = {{Γ}}: {}",
            list.len(),
            list.join("; ")
        );
        return Err(if known { format!("{KNOWN}{msg} (one-vertex graphs only)") } else { msg });
    }
    Ok(format!("{graphs} graphs, {cases} labelled cases, {meier_vast} hyperbolic and vast, {:.1?}", start.elapsed()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("quasi-median axioms on random balls", criterion_1),
        ("word length = BFS distance = separating hyperplanes", criterion_2),
        ("rewriting confluence and finite word problem", criterion_3),
        ("cubical dimension equals clique number", criterion_4),
        ("quasi-median uniqueness", criterion_5),
        ("sector-wall cubulation", criterion_6),
        ("self-cubulation fixed point", criterion_7),
        ("tree embedding", criterion_8),
        ("classifier ground truth", criterion_9),
        ("classifier cross-checks", criterion_10),
    ];
    let (mut failed, mut unexpected) = (0, 0);
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                unexpected += usize::from(!why.starts_with(KNOWN));
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({} known)",
        criteria.len() - failed,
        failed - unexpected
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
