//! Finite spaces with partitions and their quasi-cubulations, sector-walls
//! of quasi-median graphs, and the embedding of `X(Γ,𝒢)` into a product of
//! trees.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::cayley::{self, Ball, HyperplaneKey};
use crate::error::{Error, Result};
use crate::iso;
use crate::par;
use crate::qmcheck::{self, AxiomScope, FiniteGraph, QuasiMedianGraph};

/// Default cap on the number of orientations visited.
pub const ORIENTATION_CAP: usize = 1_000_000;

/// A finite set with a list of partitions ("walls") into nonempty sectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceWithPartitions {
    points: Vec<String>,
    walls: Vec<Vec<FixedBitSet>>,
    /// `implies[w]`: pairs `(s, w2, s2)` meaning "choosing sector `s` of wall
    /// `w` forces sector `s2` of wall `w2`", plus the contrapositive
    /// constraints indexed by `w2`.
    implies: Vec<Vec<Implication>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Implication {
    wall: usize,
    sector: u16,
    other_wall: usize,
    other_sector: u16,
}

/// One sector per wall.
pub type Orientation = Vec<u16>;

fn is_subset(a: &FixedBitSet, b: &FixedBitSet) -> bool {
    a.is_subset(b)
}

impl SpaceWithPartitions {
    /// `walls[i]` lists the sectors of wall `i` as point indices.
    pub fn new(points: Vec<String>, walls: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let n = points.len();
        let mut sets = Vec::with_capacity(walls.len());
        for (i, wall) in walls.iter().enumerate() {
            if wall.len() < 2 {
                return Err(Error::InvalidWalls(format!("wall {i} has fewer than two sectors")));
            }
            if wall.len() > u16::MAX as usize {
                return Err(Error::InvalidWalls(format!("wall {i} has too many sectors")));
            }
            let mut covered = FixedBitSet::with_capacity(n);
            let mut sectors = Vec::with_capacity(wall.len());
            for sector in wall {
                if sector.is_empty() {
                    return Err(Error::InvalidWalls(format!("wall {i} has an empty sector")));
                }
                let mut s = FixedBitSet::with_capacity(n);
                for &p in sector {
                    if p >= n {
                        return Err(Error::InvalidWalls(format!("wall {i} mentions unknown point {p}")));
                    }
                    if covered.contains(p) {
                        return Err(Error::InvalidWalls(format!("wall {i}: point {} lies in two sectors", points[p])));
                    }
                    covered.insert(p);
                    s.insert(p);
                }
                sectors.push(s);
            }
            if covered.count_ones(..) != n {
                return Err(Error::InvalidWalls(format!("wall {i} does not cover every point")));
            }
            sectors.sort_by_key(|s| s.ones().next());
            sets.push(sectors);
        }
        let mut space = SpaceWithPartitions {
            points,
            walls: sets,
            implies: Vec::new(),
        };
        space.implies = space.build_implications()?;
        Ok(space)
    }

    fn build_implications(&self) -> Result<Vec<Vec<Implication>>> {
        let m = self.walls.len();
        let found: Vec<Result<Vec<Implication>>> = par::map_range(m, |w1| {
            let mut out = Vec::new();
            for w2 in 0..m {
                if w1 == w2 || !self.distinguishable(w1, w2) {
                    continue;
                }
                let mut any = false;
                for (s1, a1) in self.walls[w1].iter().enumerate() {
                    for (s2, a2) in self.walls[w2].iter().enumerate() {
                        if is_subset(a1, a2) {
                            any = true;
                            out.push(Implication {
                                wall: w1,
                                sector: s1 as u16,
                                other_wall: w2,
                                other_sector: s2 as u16,
                            });
                        }
                    }
                }
                if any && !self.nested(w1, w2) {
                    return Err(Error::InvalidWalls(format!(
                        "walls {w1} and {w2} have included sectors but are not nested"
                    )));
                }
            }
            Ok(out)
        });
        let mut by_wall = vec![Vec::new(); m];
        for list in found {
            for imp in list? {
                by_wall[imp.wall].push(imp);
                by_wall[imp.other_wall].push(imp);
            }
        }
        Ok(by_wall)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn sector_count(&self, w: usize) -> usize {
        self.walls[w].len()
    }

    /// Sectors of wall `w` as sorted point lists.
    pub fn sectors(&self, w: usize) -> Vec<Vec<usize>> {
        self.walls[w].iter().map(|s| s.ones().collect()).collect()
    }

    pub fn sector_of_point(&self, w: usize, p: usize) -> u16 {
        self.walls[w].iter().position(|s| s.contains(p)).expect("walls cover the points") as u16
    }

    pub fn distinguishable(&self, a: usize, b: usize) -> bool {
        let (wa, wb) = (&self.walls[a], &self.walls[b]);
        if wa.len() != wb.len() {
            return true;
        }
        !wa.iter().all(|s| wb.contains(s))
    }

    /// Some `A₁ ∈ P₁`, `A₂ ∈ P₂` with every other sector of `P₂` inside `A₁`
    /// and every other sector of `P₁` inside `A₂`.
    pub fn nested(&self, a: usize, b: usize) -> bool {
        let (wa, wb) = (&self.walls[a], &self.walls[b]);
        wa.iter().enumerate().any(|(i, a1)| {
            wb.iter().enumerate().any(|(j, a2)| {
                wb.iter().enumerate().all(|(k, d)| k == j || is_subset(d, a1))
                    && wa.iter().enumerate().all(|(k, d)| k == i || is_subset(d, a2))
            })
        })
    }

    /// Number of walls separating two points.
    pub fn wall_distance(&self, p: usize, q: usize) -> usize {
        self.walls.iter().filter(|w| w.iter().any(|s| s.contains(p) != s.contains(q))).count()
    }

    pub fn principal_orientation(&self, p: usize) -> Orientation {
        (0..self.walls.len()).map(|w| self.sector_of_point(w, p)).collect()
    }

    pub fn is_valid(&self, o: &[u16]) -> bool {
        self.implies
            .iter()
            .flatten()
            .all(|i| o[i.wall] != i.sector || o[i.other_wall] == i.other_sector)
    }

    fn valid_at(&self, o: &[u16], w: usize) -> bool {
        self.implies[w]
            .iter()
            .all(|i| o[i.wall] != i.sector || o[i.other_wall] == i.other_sector)
    }

    /// The component of the orientation graph containing the principal
    /// orientations, explored by flipping one wall at a time.
    pub fn quasi_cubulate(&self) -> Result<QuasiCubulation> {
        self.quasi_cubulate_capped(ORIENTATION_CAP)
    }

    pub fn quasi_cubulate_capped(&self, cap: usize) -> Result<QuasiCubulation> {
        if self.points.is_empty() {
            return Err(Error::InvalidWalls("no points".into()));
        }
        let mut index: HashMap<Orientation, usize> = HashMap::new();
        let mut orientations: Vec<Orientation> = Vec::new();
        let start = self.principal_orientation(0);
        index.insert(start.clone(), 0);
        orientations.push(start);
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut o = orientations[i].clone();
            for w in 0..self.walls.len() {
                let orig = o[w];
                for s in 0..self.walls[w].len() as u16 {
                    if s == orig {
                        continue;
                    }
                    o[w] = s;
                    if self.valid_at(&o, w) {
                        let j = match index.get(&o) {
                            Some(&j) => j,
                            None => {
                                if orientations.len() >= cap {
                                    return Err(Error::CapExceeded {
                                        what: "orientation count",
                                        cap,
                                    });
                                }
                                let j = orientations.len();
                                index.insert(o.clone(), j);
                                orientations.push(o.clone());
                                queue.push_back(j);
                                j
                            }
                        };
                        if i < j {
                            edges.push((i, j));
                        }
                    }
                }
                o[w] = orig;
            }
        }
        let embedding = (0..self.points.len())
            .map(|p| {
                index
                    .get(&self.principal_orientation(p))
                    .copied()
                    .ok_or_else(|| Error::Invariant("principal orientations lie in different components".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = (0..orientations.len()).map(|i| format!("o{i}")).collect();
        let graph = FiniteGraph::with_labels(labels, &edges)?;
        Ok(QuasiCubulation {
            graph,
            orientations,
            embedding,
        })
    }

    /// Oracle: every element of the product of sector choices, filtered for
    /// validity, then the component of the first principal orientation.
    pub fn quasi_cubulate_exhaustive(&self, cap: usize) -> Result<QuasiCubulation> {
        let total = self
            .walls
            .iter()
            .try_fold(1usize, |acc, w| acc.checked_mul(w.len()))
            .filter(|&t| t <= cap)
            .ok_or(Error::CapExceeded {
                what: "orientation product",
                cap,
            })?;
        let mut valid = Vec::new();
        let mut o = vec![0u16; self.walls.len()];
        for _ in 0..total {
            if self.is_valid(&o) {
                valid.push(o.clone());
            }
            for w in 0..o.len() {
                o[w] += 1;
                if (o[w] as usize) < self.walls[w].len() {
                    break;
                }
                o[w] = 0;
            }
        }
        let index: HashMap<&Orientation, usize> = valid.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let mut edges = Vec::new();
        for (i, o) in valid.iter().enumerate() {
            let mut x = o.clone();
            for w in 0..x.len() {
                let orig = x[w];
                for s in 0..self.walls[w].len() as u16 {
                    if s != orig {
                        x[w] = s;
                        if let Some(&j) = index.get(&x) {
                            if i < j {
                                edges.push((i, j));
                            }
                        }
                    }
                }
                x[w] = orig;
            }
        }
        let all = FiniteGraph::new(valid.len(), &edges)?;
        let root = index[&self.principal_orientation(0)];
        let dist = all.bfs(root);
        let keep: Vec<usize> = (0..valid.len()).filter(|&i| dist[i] != qmcheck::UNREACHABLE).collect();
        let mut graph = all.induced(&keep);
        let orientations: Vec<Orientation> = keep.iter().map(|&i| valid[i].clone()).collect();
        let pos: HashMap<&Orientation, usize> = orientations.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let embedding = (0..self.points.len())
            .map(|p| pos.get(&self.principal_orientation(p)).copied().ok_or_else(|| Error::Invariant("principal orientation missing".into())))
            .collect::<Result<Vec<_>>>()?;
        let labels = (0..orientations.len()).map(|i| format!("o{i}")).collect();
        graph = FiniteGraph::with_labels(labels, &graph.edges())?;
        Ok(QuasiCubulation {
            graph,
            orientations,
            embedding,
        })
    }
}

/// Orientation graph with the embedding `p ↦ σ_p`.
#[derive(Clone, Debug)]
pub struct QuasiCubulation {
    pub graph: FiniteGraph,
    pub orientations: Vec<Orientation>,
    /// Vertex of the principal orientation of each point.
    pub embedding: Vec<usize>,
}

impl QuasiCubulation {
    /// Graph distance between orientations equals the number of walls on
    /// which they differ, for every pair.
    pub fn distances_match_walls(&self) -> bool {
        let n = self.graph.len();
        par::all_range(n, |a| {
            let d = self.graph.bfs(a);
            (0..n).all(|b| {
                let diff = self.orientations[a]
                    .iter()
                    .zip(&self.orientations[b])
                    .filter(|(x, y)| x != y)
                    .count();
                d[b] as usize == diff
            })
        })
    }
}

/// Binary walls `{D, Dᶜ}` for every sector `D`; a hyperplane with two sectors
/// gives a single wall.
pub fn sector_walls(g: &QuasiMedianGraph) -> Result<SpaceWithPartitions> {
    let n = g.len();
    let mut walls = Vec::new();
    for h in g.hyperplanes() {
        if h.sectors.len() == 2 {
            walls.push(h.sectors.clone());
        } else {
            for d in &h.sectors {
                let inside = g.graph().mask(d);
                let rest: Vec<usize> = (0..n).filter(|&v| !inside[v]).collect();
                walls.push(vec![d.clone(), rest]);
            }
        }
    }
    SpaceWithPartitions::new(g.graph().labels().to_vec(), walls)
}

/// One wall per hyperplane, with all its sectors as parts.
pub fn hyperplane_partitions(g: &QuasiMedianGraph) -> Result<SpaceWithPartitions> {
    let walls = g.hyperplanes().iter().map(|h| h.sectors.clone()).collect();
    SpaceWithPartitions::new(g.graph().labels().to_vec(), walls)
}

#[derive(Clone, Debug)]
pub struct SectorWallCubulation {
    pub cubulation: QuasiCubulation,
    /// `d_SW = d` for every pair of points.
    pub isometric: bool,
    /// Every hyperplane has exactly two sectors.
    pub all_binary: bool,
}

/// Cubulates the sector-walls and checks that the result is median and that
/// `d ≤ d_SW ≤ 2d` on the embedded points.
pub fn cubulate_sector_walls(g: &QuasiMedianGraph) -> Result<SectorWallCubulation> {
    let space = sector_walls(g)?;
    let cubulation = space.quasi_cubulate()?;
    let report = qmcheck::check_axioms(&cubulation.graph, AxiomScope::Whole);
    if !report.is_quasi_median() || !cubulation.graph.is_triangle_free() {
        return Err(Error::Invariant("sector-wall cubulation is not median".into()));
    }
    let n = g.len();
    let emb = &cubulation.embedding;
    let rows = par::map_range(n, |x| cubulation.graph.bfs(emb[x]));
    let mut isometric = true;
    for x in 0..n {
        for y in 0..n {
            let (d, dsw) = (g.distance(x, y), rows[x][emb[y]]);
            if dsw < d || dsw > 2 * d {
                return Err(Error::Invariant(format!("d_SW({x},{y}) = {dsw} outside [{d}, {}]", 2 * d)));
            }
            isometric &= dsw == d;
        }
    }
    let all_binary = g.hyperplanes().iter().all(|h| h.sectors.len() == 2);
    if all_binary != isometric {
        return Err(Error::Invariant("d_SW = d must hold exactly when all hyperplanes are binary".into()));
    }
    Ok(SectorWallCubulation {
        cubulation,
        isometric,
        all_binary,
    })
}

/// Quasi-cubulating the hyperplane partitions of `g` gives back `g`.
pub fn self_cubulation_check(g: &QuasiMedianGraph) -> Result<bool> {
    if g.len() > iso::ISO_CAP {
        return Err(Error::TooLarge {
            what: "self-cubulation check",
            size: g.len(),
            cap: iso::ISO_CAP,
        });
    }
    let c = hyperplane_partitions(g)?.quasi_cubulate()?;
    iso::are_isomorphic(&c.graph, g.graph())
}

/// The product-of-trees embedding of a ball: one factor per colour.
#[derive(Clone, Debug)]
pub struct TreeEmbedding {
    pub factors: Vec<QuasiCubulation>,
    /// Every factor is a tree.
    pub acyclic: bool,
}

impl TreeEmbedding {
    /// `Σ_k d_{T_k}(φ_k(x), φ_k(y))`.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        self.factors
            .iter()
            .map(|f| f.graph.bfs(f.embedding[x])[f.embedding[y]] as usize)
            .sum()
    }

    /// All distances from `x`.
    pub fn distances_from(&self, x: usize) -> Vec<usize> {
        let n = self.factors.first().map_or(0, |f| f.embedding.len());
        let mut out = vec![0usize; n];
        for f in &self.factors {
            let d = f.graph.bfs(f.embedding[x]);
            for (y, o) in out.iter_mut().enumerate() {
                *o += d[f.embedding[y]] as usize;
            }
        }
        out
    }
}

/// Sector-walls of the hyperplanes meeting `ball`, restricted to the ball.
/// Returns the key and the binary walls for each hyperplane.
pub fn ball_sector_walls(ball: &Ball) -> Result<Vec<(HyperplaneKey, Vec<Vec<Vec<usize>>>)>> {
    let spec = ball.spec();
    let mut keys: Vec<HyperplaneKey> = ball
        .edges()
        .iter()
        .map(|e| cayley::clique_key(spec, ball.word(e.from), e.vertex))
        .collect();
    keys.sort();
    keys.dedup();
    let out = par::map_slice(&keys, |k| -> Result<(HyperplaneKey, Vec<Vec<Vec<usize>>>)> {
        let mut by_sector: HashMap<i64, Vec<usize>> = HashMap::new();
        for i in 0..ball.len() {
            by_sector.entry(cayley::sector_of(spec, k, ball.word(i))?).or_default().push(i);
        }
        let mut sectors: Vec<Vec<usize>> = by_sector.into_values().collect();
        sectors.sort();
        let walls = if sectors.len() == 2 {
            vec![sectors]
        } else {
            sectors
                .iter()
                .map(|d| {
                    let inside = ball.graph().mask(d);
                    vec![d.clone(), (0..ball.len()).filter(|&v| !inside[v]).collect()]
                })
                .collect()
        };
        Ok((k.clone(), walls))
    });
    out.into_iter().collect()
}

/// Cubulates, per colour, the sector-walls of hyperplanes whose label has
/// that colour. Each factor should be a tree.
pub fn tree_embedding(ball: &Ball, colouring: &[usize]) -> Result<TreeEmbedding> {
    let graph = ball.spec().graph();
    if !graph.is_proper_colouring(colouring) {
        return Err(Error::ImproperColoring(format!("{colouring:?}")));
    }
    let colours = colouring.iter().copied().max().map_or(0, |m| m + 1);
    let walls = ball_sector_walls(ball)?;
    let points: Vec<String> = ball.graph().labels().to_vec();
    let mut factors = Vec::with_capacity(colours);
    for k in 0..colours {
        let ws: Vec<Vec<Vec<usize>>> = walls
            .iter()
            .filter(|(key, _)| colouring[key.label] == k)
            .flat_map(|(_, w)| w.iter().cloned())
            .collect();
        let space = SpaceWithPartitions::new(points.clone(), ws)?;
        factors.push(space.quasi_cubulate()?);
    }
    let acyclic = factors.iter().all(|f| f.graph.is_tree());
    Ok(TreeEmbedding { factors, acyclic })
}

#[derive(Clone, Debug, Serialize)]
pub struct CubulationSummary {
    pub points: usize,
    pub walls: usize,
    pub vertices: usize,
    pub edges: usize,
}

impl QuasiCubulation {
    pub fn summary(&self, space: &SpaceWithPartitions) -> CubulationSummary {
        CubulationSummary {
            points: space.points().len(),
            walls: space.wall_count(),
            vertices: self.graph.len(),
            edges: self.graph.edge_count(),
        }
    }
}

/// Sector-wall cubulation of a ball, with the distance comparison done on
/// every pair of ball vertices.
#[derive(Clone, Debug, Serialize)]
pub struct BallCubulationReport {
    pub summary: CubulationSummary,
    pub median: bool,
    /// `d ≤ d_SW ≤ 2d` for every pair.
    pub sandwich_ok: bool,
    pub isometric: bool,
    /// Every hyperplane meeting the ball shows exactly two sectors in it.
    pub all_binary: bool,
}

pub fn cubulate_ball(ball: &Ball) -> Result<BallCubulationReport> {
    let walls = ball_sector_walls(ball)?;
    let all_binary = walls.iter().all(|(_, w)| w.len() == 1);
    let space = SpaceWithPartitions::new(
        ball.graph().labels().to_vec(),
        walls.into_iter().flat_map(|(_, w)| w).collect(),
    )?;
    let cub = space.quasi_cubulate()?;
    let axioms = qmcheck::check_axioms(&cub.graph, AxiomScope::Whole);
    let median = axioms.is_quasi_median() && cub.graph.is_triangle_free();
    let n = ball.len();
    let rows = par::map_range(n, |x| (ball.graph().bfs(x), cub.graph.bfs(cub.embedding[x])));
    let (mut sandwich_ok, mut isometric) = (true, true);
    for (d, dsw) in &rows {
        for y in 0..n {
            let (d, dsw) = (d[y], dsw[cub.embedding[y]]);
            sandwich_ok &= d <= dsw && dsw <= 2 * d;
            isometric &= d == dsw;
        }
    }
    Ok(BallCubulationReport {
        summary: cub.summary(&space),
        median,
        sandwich_ok,
        isometric,
        all_binary,
    })
}
