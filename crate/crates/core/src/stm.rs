//! Spanning-tree matching.
//!
//! Two ghosted spanning trees are built from the defect graph, each is
//! reduced to a perfect matching by peeling leaves, and the better of the two
//! matchings is chosen by weight and column metric.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::graph::{
    build_complete_graph, DefectGraph, DistanceProvider, GhostMode, Vertex, WeightedGraph,
};
use crate::lattice::{CodeLayout, Side, Syndrome};
use crate::matching::{apply_pairs, ordered_bits, weight_and_metric, MatchSolution, MatchedPair};
use crate::pauli::{ErrorType, PauliError};

/// How ghosts enter the two trees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TreeConstruction {
    /// Spanning tree over the ghosted graph.
    #[default]
    Mst,
    /// Spanning tree of the defects, with each ghost hung as a leaf on its
    /// nearest defect.
    Graft,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StmConfig {
    pub construction: TreeConstruction,
}

/// A spanning tree over the vertices of a (possibly ghosted) defect graph.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree {
    pub graph: DefectGraph,
    pub edges: Vec<(usize, usize, f64)>,
}

impl SpanningTree {
    pub fn from_edges(graph: DefectGraph, edges: Vec<(usize, usize, f64)>) -> Self {
        Self { graph, edges }
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for &(u, v, _) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Connected, acyclic and spanning.
    pub fn is_spanning_tree(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return self.edges.is_empty();
        }
        if self.edges.len() != n - 1 {
            return false;
        }
        let mut uf = UnionFind::new(n);
        self.edges.iter().all(|&(u, v, _)| uf.union(u, v))
    }

    /// Edge list, one `u v weight` line per edge, with vertex labels.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for &(u, v, w) in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                label(self.graph.vertex(u)),
                label(self.graph.vertex(v)),
                w
            ));
        }
        out
    }
}

fn label(v: Vertex) -> String {
    match v {
        Vertex::Defect(a) => format!("a{a}"),
        Vertex::Ghost(Side::Low) => "gL".into(),
        Vertex::Ghost(Side::High) => "gR".into(),
        Vertex::PairedGhost { owner, .. } => format!("g{owner}"),
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Strict order on edges: weight, then defect edges before ghost edges.
/// Defect edges break ties by endpoint ids; ghost edges prefer the defect
/// farthest from the other defects, then the lowest id. Defects precede all
/// ghosts in vertex order.
#[derive(Default)]
struct EdgeOrder {
    k: usize,
    min_dist: Vec<f64>,
    /// Number of distinct `min_dist` values above each defect's own.
    rank: Vec<u16>,
}

impl EdgeOrder {
    fn new(graph: &DefectGraph) -> Self {
        let mut order = Self::default();
        order.fill(graph);
        order
    }

    fn fill(&mut self, graph: &DefectGraph) {
        let k = graph.defect_count();
        assert!(graph.len() < 1 << 16, "vertex ids fit in 16 bits");
        self.k = k;
        self.min_dist.clear();
        self.min_dist
            .extend((0..k).map(|v| graph.min_defect_distance(v)));
        let md = &self.min_dist;
        self.rank.clear();
        self.rank.extend((0..k).map(|v| {
            (0..k)
                .filter(|&u| md[u] > md[v] && (0..u).all(|x| md[x] != md[u]))
                .count() as u16
        }));
    }

    /// Integer key whose order is the edge order.
    #[inline]
    fn key(&self, u: usize, v: usize, w: f64) -> u128 {
        let (u, v) = (u.min(v), u.max(v));
        let (ghost, a, mid, b) = match (v < self.k, u < self.k) {
            (true, _) => (0, u, 0, v),
            (false, true) => (1, v, self.rank[u] as usize, u),
            (false, false) => (1, v, 0, u),
        };
        (ordered_bits(w) as u128) << 49
            | (ghost as u128) << 48
            | (a as u128) << 32
            | (mid as u128) << 16
            | b as u128
    }
}

type Edge = (usize, usize, f64);

/// Buffers reused across calls on one thread.
#[derive(Default)]
struct Scratch {
    order: EdgeOrder,
    prim: PrimBuf,
    edges: Vec<Edge>,
    peel: PeelBuf,
}

#[derive(Default)]
struct PrimBuf {
    in_tree: Vec<bool>,
    /// Key of the cheapest known edge into each outside vertex, and its
    /// inside end.
    link: Vec<(u128, usize)>,
}

#[derive(Default)]
struct PeelBuf {
    adj: Vec<Slots>,
    alive: Vec<bool>,
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

/// Minimum spanning forest over the finite edges, ghost-to-ghost edges
/// excluded, written to `edges`. Under the strict [`EdgeOrder`] the forest is
/// unique, so Prim's algorithm returns the same edges as Kruskal's.
fn spanning_edges<G: WeightedGraph + ?Sized>(
    g: &G,
    order: &EdgeOrder,
    buf: &mut PrimBuf,
    edges: &mut Vec<Edge>,
) {
    let n = g.len();
    let k = order.k;
    edges.clear();
    let PrimBuf { in_tree, link } = buf;
    in_tree.clear();
    in_tree.resize(n, false);
    link.clear();
    link.resize(n, (u128::MAX, usize::MAX));
    for start in 0..n {
        if in_tree[start] {
            continue;
        }
        let mut v = start;
        loop {
            in_tree[v] = true;
            let mut next = (u128::MAX, usize::MAX);
            for x in 0..n {
                if in_tree[x] {
                    continue;
                }
                if v < k || x < k {
                    let w = g.weight(v, x);
                    if w.is_finite() {
                        let key = order.key(v, x, w);
                        if key < link[x].0 {
                            link[x] = (key, v);
                        }
                    }
                }
                if link[x].0 < next.0 {
                    next = (link[x].0, x);
                }
            }
            if next.1 == usize::MAX {
                break;
            }
            let (x, p) = (next.1, link[next.1].1);
            edges.push((p.min(x), p.max(x), g.weight(p, x)));
            v = x;
        }
    }
}

/// Minimum spanning tree of the finite edges of `graph`, ghost-to-ghost edges
/// excluded, listed in ascending edge order. Vertices left unreachable (only
/// possible for disconnected input) simply stay isolated.
pub fn build_mst(graph: DefectGraph) -> SpanningTree {
    let order = EdgeOrder::new(&graph);
    let mut edges = Vec::new();
    spanning_edges(&graph, &order, &mut PrimBuf::default(), &mut edges);
    edges.sort_by_key(|&(u, v, w)| order.key(u, v, w));
    SpanningTree { graph, edges }
}

/// Nearest defect to boundary `side`; ties go to the defect with the highest
/// minimum distance to the other defects, then to the lowest id.
pub fn nearest_defect(graph: &DefectGraph, side: Side) -> Option<usize> {
    nearest_with(graph, side, &EdgeOrder::new(graph).min_dist)
}

fn nearest_with(graph: &DefectGraph, side: Side, min_dist: &[f64]) -> Option<usize> {
    (0..graph.defect_count()).min_by(|&a, &b| {
        graph
            .boundary_distance(a, side)
            .total_cmp(&graph.boundary_distance(b, side))
            .then(min_dist[b].total_cmp(&min_dist[a]))
            .then(a.cmp(&b))
    })
}

fn ghost_modes(n_d: usize) -> (Option<GhostMode>, GhostMode) {
    if n_d.is_multiple_of(2) {
        (None, GhostMode::Both)
    } else {
        (Some(GhostMode::Left), GhostMode::Right)
    }
}

/// Edges of the tree over `graph` with ghosts added by `mode`, written to
/// `edges`.
fn tree_edges(
    graph: &DefectGraph,
    mode: Option<GhostMode>,
    construction: TreeConstruction,
    order: &EdgeOrder,
    buf: &mut PrimBuf,
    edges: &mut Vec<Edge>,
) {
    let view = graph.ghosted(mode);
    match construction {
        TreeConstruction::Mst => spanning_edges(&view, order, buf, edges),
        TreeConstruction::Graft => {
            spanning_edges(graph, order, buf, edges);
            for g in graph.defect_count()..view.len() {
                if let Vertex::Ghost(side) = view.vertex(g) {
                    if let Some(a) = nearest_with(graph, side, &order.min_dist) {
                        edges.push((a, g, view.weight(a, g)));
                    }
                }
            }
        }
    }
}

fn ghosted_tree(
    graph: &DefectGraph,
    mode: Option<GhostMode>,
    construction: TreeConstruction,
) -> SpanningTree {
    let order = EdgeOrder::new(graph);
    let mut edges = Vec::new();
    tree_edges(
        graph,
        mode,
        construction,
        &order,
        &mut PrimBuf::default(),
        &mut edges,
    );
    edges.sort_by_key(|&(u, v, w)| order.key(u, v, w));
    let ghosted = match mode {
        Some(m) => graph.add_ghosts(m),
        None => graph.clone(),
    };
    SpanningTree::from_edges(ghosted, edges)
}

/// The two ghosted trees for a ghost-free defect graph.
///
/// With an even number of defects the first tree has no ghosts and the second
/// has one on each side; with an odd number the first has a left ghost and
/// the second a right ghost.
pub fn make_ghosted_trees(
    graph: &DefectGraph,
    construction: TreeConstruction,
) -> (SpanningTree, SpanningTree) {
    let (m1, m2) = ghost_modes(graph.defect_count());
    (
        ghosted_tree(graph, m1, construction),
        ghosted_tree(graph, Some(m2), construction),
    )
}

/// Neighbours of one tree vertex; degrees never exceed four.
#[derive(Clone, Copy)]
struct Slots {
    nb: [(usize, f64); 4],
    deg: usize,
}

impl Slots {
    fn push(&mut self, x: usize, w: f64) {
        self.nb[self.deg] = (x, w);
        self.deg += 1;
    }

    fn remove(&mut self, x: usize) {
        if let Some(i) = self.nb[..self.deg].iter().position(|e| e.0 == x) {
            self.deg -= 1;
            self.nb[i] = self.nb[self.deg];
        }
    }
}

fn unlink(adj: &mut [Slots], a: usize, b: usize) {
    adj[a].remove(b);
    adj[b].remove(a);
}

/// Leaf-peeling reduction of a tree on `n` vertices to a perfect matching.
fn match_tree(n: usize, edges: &[Edge], buf: &mut PeelBuf) -> Result<Vec<MatchedPair>> {
    if n % 2 == 1 {
        return Err(Error::OddVertexCount(n));
    }
    let PeelBuf { adj, alive } = buf;
    let empty = Slots {
        nb: [(0, 0.0); 4],
        deg: 0,
    };
    adj.clear();
    adj.resize(n, empty);
    for &(u, v, w) in edges {
        for x in [u, v] {
            if adj[x].deg == 4 {
                let deg = edges.iter().filter(|e| e.0 == x || e.1 == x).count();
                return Err(Error::Structural(format!(
                    "vertex {x} has tree degree {deg}"
                )));
            }
        }
        adj[u].push(v, w);
        adj[v].push(u, w);
    }
    alive.clear();
    alive.resize(n, true);
    let mut remaining = n;
    let mut pairs = Vec::with_capacity(n / 2);
    while remaining > 0 {
        let mut pair = None;
        let mut merge = None;
        let mut cut = None;
        for b in 0..n {
            if !alive[b] {
                continue;
            }
            match adj[b].deg {
                0 => return Err(Error::Structural(format!("vertex {b} left unmatched"))),
                1 => {}
                _ => continue,
            }
            let (a, w) = adj[b].nb[0];
            match adj[a].deg {
                1 | 2 => {
                    pair = Some((a, b, w));
                    break;
                }
                3 if merge.is_none() => merge = Some((a, b, w)),
                4 if cut.is_none() => {
                    let mut inner = adj[a]
                        .nb
                        .iter()
                        .map(|e| e.0)
                        .filter(|&o| o != b && adj[o].deg > 1);
                    if let (Some(x), None) = (inner.next(), inner.next()) {
                        cut = Some((a, x));
                    }
                }
                _ => {}
            }
        }
        let (a, b, w) = match (pair, merge, cut) {
            (Some(p), _, _) => {
                while adj[p.0].deg > 0 {
                    let o = adj[p.0].nb[0].0;
                    unlink(adj, p.0, o);
                }
                p
            }
            (None, Some((a, b, w)), _) => {
                unlink(adj, a, b);
                let [(v1, w2), (v2, w3)] = [adj[a].nb[0], adj[a].nb[1]];
                unlink(adj, a, v1);
                unlink(adj, a, v2);
                adj[v1].push(v2, w2 + w3);
                adj[v2].push(v1, w2 + w3);
                (a, b, w)
            }
            (None, None, Some((a, x))) => {
                unlink(adj, a, x);
                continue;
            }
            (None, None, None) => {
                return Err(Error::Structural(format!(
                    "no applicable reduction with {remaining} vertices left"
                )))
            }
        };
        alive[a] = false;
        alive[b] = false;
        remaining -= 2;
        pairs.push(MatchedPair::new(a, b, w));
    }
    Ok(pairs)
}

/// Reduces a spanning tree with an even vertex count to a perfect matching.
///
/// Each round peels one leaf, lowest id first. A leaf whose neighbour has
/// degree 1 or 2 is matched with it. Failing that, a leaf whose neighbour has
/// degree 3 is matched with it and the neighbour's two other neighbours are
/// joined by an edge carrying the sum of their weights. Failing that, a
/// degree-4 neighbour of a leaf drops its edge to its only non-leaf neighbour.
pub fn tree_match(tree: &SpanningTree) -> Result<MatchSolution> {
    let pairs = match_tree(tree.len(), &tree.edges, &mut PeelBuf::default())?;
    Ok(MatchSolution::new(&tree.graph, pairs))
}

/// Which of the two candidate matchings was kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    First,
    Second,
}

/// Weight and column metric, the two quantities the selection rule reads.
pub trait Scored {
    fn weight(&self) -> f64;
    fn metric(&self) -> u32;
}

impl Scored for MatchSolution {
    fn weight(&self) -> f64 {
        self.total_weight
    }

    fn metric(&self) -> u32 {
        self.f_metric
    }
}

/// A perfect matching with its weight and column metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub pairs: Vec<MatchedPair>,
    pub total_weight: f64,
    pub f_metric: u32,
}

impl Candidate {
    pub fn new<G: WeightedGraph + ?Sized>(graph: &G, pairs: Vec<MatchedPair>) -> Self {
        let (total_weight, f_metric) = weight_and_metric(graph, &pairs);
        Self {
            pairs,
            total_weight,
            f_metric,
        }
    }
}

impl Scored for Candidate {
    fn weight(&self) -> f64 {
        self.total_weight
    }

    fn metric(&self) -> u32 {
        self.f_metric
    }
}

/// Picks between two candidate matchings.
///
/// A first solution of weight at most `t` is taken without building the
/// second. Otherwise a solution of weight at most `t + 1` is preferred; if both
/// or neither qualify, the smaller weight wins among qualifiers and the smaller
/// column metric wins among non-qualifiers, the other quantity breaking ties,
/// and the first solution breaking any remaining tie.
pub fn select_solution<S, F>(first: S, second: F, t: u32) -> Result<(S, Choice)>
where
    S: Scored,
    F: FnOnce() -> Result<S>,
{
    let t = t as f64;
    if first.weight() <= t {
        return Ok((first, Choice::First));
    }
    let second = second()?;
    let (w1, f1, w2, f2) = (
        first.weight(),
        first.metric(),
        second.weight(),
        second.metric(),
    );
    let take_second = match (w1 <= t + 1.0, w2 <= t + 1.0) {
        (true, false) => false,
        (false, true) => true,
        (true, true) => (w2, f2) < (w1, f1),
        (false, false) => (f2, w2) < (f1, w1),
    };
    Ok(if take_second {
        (second, Choice::Second)
    } else {
        (first, Choice::First)
    })
}

/// Outcome of one decoding pass. The pairs index the pass graph with the
/// ghosts of `ghosts` appended.
#[derive(Clone, Debug, PartialEq)]
pub struct PassResult {
    pub ghosts: Option<GhostMode>,
    pub matching: Candidate,
    pub choice: Choice,
}

impl PassResult {
    pub(crate) fn empty() -> Self {
        Self {
            ghosts: None,
            matching: Candidate {
                pairs: Vec::new(),
                total_weight: 0.0,
                f_metric: 0,
            },
            choice: Choice::First,
        }
    }

    /// Full solution, with per-column statistics, against the pass graph.
    pub fn solution(&self, graph: &DefectGraph) -> MatchSolution {
        MatchSolution::new(&graph.ghosted(self.ghosts), self.matching.pairs.clone())
    }
}

/// Runs the tree pipeline on a ghost-free defect graph.
pub fn stm_match(graph: &DefectGraph, t: u32, config: &StmConfig) -> Result<PassResult> {
    let k = graph.defect_count();
    if k == 0 {
        return Ok(PassResult::empty());
    }
    let (m1, m2) = ghost_modes(k);
    let (matching, choice) = SCRATCH.with(|cell| {
        let mut scratch = cell.borrow_mut();
        let Scratch {
            order,
            prim,
            edges,
            peel,
        } = &mut *scratch;
        order.fill(graph);
        let mut run = |mode: Option<GhostMode>| -> Result<Candidate> {
            let view = graph.ghosted(mode);
            tree_edges(graph, mode, config.construction, order, prim, edges);
            Ok(Candidate::new(&view, match_tree(view.len(), edges, peel)?))
        };
        let first = run(m1)?;
        select_solution(first, || run(Some(m2)), t)
    })?;
    Ok(PassResult {
        ghosts: if choice == Choice::First {
            m1
        } else {
            Some(m2)
        },
        matching,
        choice,
    })
}

/// Decodes both passes of a syndrome with spanning-tree matching.
pub fn stm_decode(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    config: &StmConfig,
) -> Result<PauliError> {
    decode_passes(layout, syndrome, |g| stm_match(g, layout.t(), config))
}

pub(crate) fn decode_passes<F>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    mut run: F,
) -> Result<PauliError>
where
    F: FnMut(&DefectGraph) -> Result<PassResult>,
{
    let mut correction = PauliError::identity(layout.n());
    for kind in [ErrorType::Z, ErrorType::X] {
        let defects = syndrome.defects(kind);
        if defects.is_empty() {
            continue;
        }
        let graph = build_complete_graph(layout, kind, &DistanceProvider::Manhattan, defects);
        let pass = run(&graph)?;
        apply_pairs(
            layout,
            &graph.ghosted(pass.ghosts),
            &pass.matching.pairs,
            correction.part_mut(kind),
        );
    }
    Ok(correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Family, ResidualClass};
    use crate::matching::all_perfect_matchings;
    use crate::noise::{enumerate_errors, sample_error, stream_rng, NoiseModel};
    use itertools::Itertools;
    use proptest::prelude::*;

    fn weights(n: usize, list: &[(usize, usize, f64)]) -> DefectGraph {
        let mut w = vec![f64::INFINITY; n * n];
        for i in 0..n {
            w[i * n + i] = 0.0;
        }
        for &(a, b, x) in list {
            w[a * n + b] = x;
            w[b * n + a] = x;
        }
        DefectGraph::from_weights(w)
    }

    /// Minimum spanning tree weight by trying every (n-1)-edge subset.
    fn brute_force_mst_weight(g: &DefectGraph) -> f64 {
        let edges: Vec<_> = g.edges().collect();
        let mut best = f64::INFINITY;
        for subset in edges.iter().copied().combinations(g.len() - 1) {
            let t = SpanningTree::from_edges(g.clone(), subset);
            if t.is_spanning_tree() {
                best = best.min(t.total_weight());
            }
        }
        best
    }

    #[test]
    fn mst_examples() {
        let g = weights(2, &[(0, 1, 3.0)]);
        assert_eq!(build_mst(g).edges, vec![(0, 1, 3.0)]);
        let g = weights(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]);
        assert_eq!(build_mst(g).edges, vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert!(build_mst(DefectGraph::from_weights(vec![]))
            .edges
            .is_empty());
    }

    /// Kruskal over all allowed edges sorted by the edge order.
    fn kruskal(g: &DefectGraph, order: &EdgeOrder) -> Vec<(usize, usize, f64)> {
        let k = g.defect_count();
        let mut edges: Vec<_> = g.edges().filter(|&(u, v, _)| u < k || v < k).collect();
        edges.sort_by_key(|&(u, v, w)| order.key(u, v, w));
        let mut uf = UnionFind::new(g.len());
        edges
            .into_iter()
            .filter(|&(u, v, _)| uf.union(u, v))
            .collect()
    }

    #[test]
    fn prim_and_kruskal_pick_the_same_tree() {
        let layout = CodeLayout::new(Family::Standard, 7).unwrap();
        let m = layout.lattice(ErrorType::Z).num_ancillas();
        let mut rng = stream_rng(31, 0);
        for trial in 0..500 {
            let defects = rand::seq::index::sample(&mut rng, m, 1 + trial % 12).into_vec();
            let g = build_complete_graph(
                &layout,
                ErrorType::Z,
                &DistanceProvider::Manhattan,
                &defects,
            );
            let order = EdgeOrder::new(&g);
            for mode in [
                None,
                Some(GhostMode::Left),
                Some(GhostMode::Right),
                Some(GhostMode::Both),
            ] {
                let gg = match mode {
                    Some(m) => g.add_ghosts(m),
                    None => g.clone(),
                };
                let mut prim = Vec::new();
                spanning_edges(&g.ghosted(mode), &order, &mut PrimBuf::default(), &mut prim);
                prim.sort_by_key(|&(u, v, w)| order.key(u, v, w));
                assert_eq!(prim, kruskal(&gg, &order));
            }
        }
    }

    #[test]
    fn four_vertices_have_sixteen_spanning_trees() {
        let g = DefectGraph::from_weights(vec![1.0; 16]);
        let count = g
            .edges()
            .combinations(3)
            .filter(|s| SpanningTree::from_edges(g.clone(), s.clone()).is_spanning_tree())
            .count();
        assert_eq!(count, 16);
    }

    #[test]
    fn mst_matches_exhaustive_on_random_defects() {
        let layout = CodeLayout::new(Family::Standard, 7).unwrap();
        let m = layout.lattice(ErrorType::Z).num_ancillas();
        let mut rng = stream_rng(11, 0);
        for _ in 0..200 {
            let defects: Vec<usize> = rand::seq::index::sample(&mut rng, m, 4).into_vec();
            let g = build_complete_graph(
                &layout,
                ErrorType::Z,
                &DistanceProvider::Manhattan,
                &defects,
            );
            let mst = build_mst(g.clone());
            assert!(mst.is_spanning_tree());
            assert_eq!(mst.total_weight(), brute_force_mst_weight(&g));
            for mode in [GhostMode::Left, GhostMode::Both] {
                let gg = g.add_ghosts(mode);
                let t = build_mst(gg.clone());
                assert!(t.is_spanning_tree());
            }
        }
    }

    #[test]
    fn ghosted_trees_by_parity() {
        let layout = CodeLayout::new(Family::Standard, 7).unwrap();
        let lat = layout.lattice(ErrorType::Z);
        // a site at horizontal position 2
        let a = (0..lat.num_ancillas())
            .find(|&a| lat.hpos(crate::lattice::End::Ancilla(a)) == 2)
            .unwrap();
        let g = build_complete_graph(&layout, ErrorType::Z, &DistanceProvider::Manhattan, &[a]);
        for c in [TreeConstruction::Mst, TreeConstruction::Graft] {
            let (t1, t2) = make_ghosted_trees(&g, c);
            assert_eq!(t1.edges, vec![(0, 1, 2.0)]);
            assert_eq!(t1.graph.vertex(1), Vertex::Ghost(Side::Low));
            assert_eq!(t2.edges, vec![(0, 1, 5.0)]);
            assert_eq!(t2.graph.vertex(1), Vertex::Ghost(Side::High));
        }

        let g = build_complete_graph(
            &layout,
            ErrorType::Z,
            &DistanceProvider::Manhattan,
            &[a, a + 1],
        );
        for c in [TreeConstruction::Mst, TreeConstruction::Graft] {
            let (t1, t2) = make_ghosted_trees(&g, c);
            assert_eq!((t1.len(), t1.edges.len()), (2, 1));
            assert_eq!((t2.len(), t2.edges.len()), (4, 3));
            assert!(t2.is_spanning_tree());
        }
    }

    #[test]
    fn nearest_defect_tie_prefers_isolated_defect() {
        // defects 0 and 1 both at boundary distance 1; defect 1 is farther
        // from the rest
        let g = DefectGraph::from_parts(
            ErrorType::Z,
            5,
            (0..3).map(Vertex::Defect).collect(),
            vec![0.0, 1.0, 4.0, 1.0, 0.0, 3.0, 4.0, 3.0, 0.0],
            vec![1, 1, 3],
            vec![[1.0, 4.0], [1.0, 4.0], [3.0, 2.0]],
        );
        assert_eq!(g.min_defect_distance(0), 1.0);
        assert_eq!(g.min_defect_distance(1), 1.0);
        assert_eq!(nearest_defect(&g, Side::Low), Some(0));
        assert_eq!(nearest_defect(&g, Side::High), Some(2));
        let g = DefectGraph::from_parts(
            ErrorType::Z,
            5,
            (0..3).map(Vertex::Defect).collect(),
            vec![0.0, 1.0, 4.0, 1.0, 0.0, 3.0, 4.0, 3.0, 0.0],
            vec![1, 1, 3],
            vec![[2.0, 3.0], [1.0, 4.0], [1.0, 2.0]],
        );
        // defects 1 and 2 tie on the left; 2 is farther from the others
        assert_eq!(nearest_defect(&g, Side::Low), Some(2));
    }

    #[test]
    fn tree_match_path() {
        let g = DefectGraph::from_weights(vec![1.0; 16]);
        let t = SpanningTree::from_edges(g, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]);
        let sol = tree_match(&t).unwrap();
        assert_eq!(
            sol.pairs,
            vec![MatchedPair::new(0, 1, 1.0), MatchedPair::new(2, 3, 1.0)]
        );
        assert_eq!(sol.total_weight, 2.0);
    }

    #[test]
    fn tree_match_star_merges_weights() {
        // centre 0 with leaves 1 (b), 2 (v1) and 3 (v2)
        let g = DefectGraph::from_weights(vec![1.0; 16]);
        let t = SpanningTree::from_edges(g, vec![(0, 1, 1.0), (0, 2, 2.0), (0, 3, 5.0)]);
        let sol = tree_match(&t).unwrap();
        assert_eq!(
            sol.pairs,
            vec![MatchedPair::new(0, 1, 1.0), MatchedPair::new(2, 3, 7.0)]
        );
        assert_eq!(sol.total_weight, 8.0);
    }

    #[test]
    fn tree_match_degree_four() {
        // centre 0 with leaves 1, 2, 3 and inner neighbour 4, which has leaf 5
        let g = DefectGraph::from_weights(vec![1.0; 36]);
        let edges = vec![
            (0, 1, 1.0),
            (0, 2, 1.0),
            (0, 3, 1.0),
            (0, 4, 1.0),
            (4, 5, 1.0),
        ];
        let t = SpanningTree::from_edges(g, edges);
        let sol = tree_match(&t).unwrap();
        assert!(sol.is_perfect_on(&t.graph));
        assert!(sol.pairs.contains(&MatchedPair::new(4, 5, 1.0)));
    }

    #[test]
    fn tree_match_rejects_bad_shapes() {
        let g = DefectGraph::from_weights(vec![1.0; 9]);
        let t = SpanningTree::from_edges(g, vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(tree_match(&t), Err(Error::OddVertexCount(3)));
        let g = DefectGraph::from_weights(vec![1.0; 36]);
        let star = (1..6).map(|v| (0, v, 1.0)).collect();
        let t = SpanningTree::from_edges(g, star);
        assert!(matches!(tree_match(&t), Err(Error::Structural(_))));
    }

    fn sol(w: f64, f: u32) -> MatchSolution {
        MatchSolution {
            pairs: vec![],
            total_weight: w,
            f_metric: f,
            column_parities: vec![],
            column_counts: vec![],
        }
    }

    #[test]
    fn selection_rules() {
        let t = 3;
        let (_, c) =
            select_solution(sol(3.0, 1), || panic!("second matching evaluated"), t).unwrap();
        assert_eq!(c, Choice::First);
        let (_, c) = select_solution(sol(6.0, 4), || Ok(sol(6.0, 3)), t).unwrap();
        assert_eq!(c, Choice::Second);
        let (_, c) = select_solution(sol(4.0, 4), || Ok(sol(7.0, 0)), t).unwrap();
        assert_eq!(c, Choice::First);
        let (_, c) = select_solution(sol(7.0, 0), || Ok(sol(4.0, 4)), t).unwrap();
        assert_eq!(c, Choice::Second);
        let (_, c) = select_solution(sol(4.0, 1), || Ok(sol(4.0, 1)), t).unwrap();
        assert_eq!(c, Choice::First);
        let (_, c) = select_solution(sol(6.0, 2), || Ok(sol(5.0, 2)), t).unwrap();
        assert_eq!(c, Choice::Second);
    }

    #[test]
    fn empty_syndrome_gives_identity() {
        let layout = CodeLayout::new(Family::Standard, 5).unwrap();
        let c = stm_decode(&layout, &Syndrome::default(), &StmConfig::default()).unwrap();
        assert!(c.is_identity());
    }

    #[test]
    fn corrects_every_error_up_to_t() {
        for (family, d) in [
            (Family::Standard, 3),
            (Family::Standard, 5),
            (Family::Rotated, 3),
            (Family::Rotated, 5),
        ] {
            let layout = CodeLayout::new(family, d).unwrap();
            for c in [TreeConstruction::Mst, TreeConstruction::Graft] {
                let config = StmConfig { construction: c };
                for w in 1..=layout.t() as usize {
                    for e in enumerate_errors(&layout, w) {
                        let s = layout.extract_syndrome(&e);
                        let corr = stm_decode(&layout, &s, &config).unwrap();
                        assert_eq!(
                            layout.residual_class(&e, &corr),
                            ResidualClass::Identity,
                            "{family}:{d} {c:?} error {e}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn correction_clears_random_syndromes() {
        let model = NoiseModel::depolarizing(0.05).unwrap();
        for family in [Family::Standard, Family::Rotated] {
            let layout = CodeLayout::new(family, 7).unwrap();
            let mut rng = stream_rng(5, family as u64);
            for _ in 0..2000 {
                let e = sample_error(&layout, &model, &mut rng);
                let s = layout.extract_syndrome(&e);
                let corr = stm_decode(&layout, &s, &StmConfig::default()).unwrap();
                assert!(layout.extract_syndrome(&corr) == s);
            }
        }
    }

    /// Random ghosted graphs of up to 10 vertices from real syndromes.
    fn random_ghosted_graphs(seed: u64, count: usize) -> Vec<DefectGraph> {
        let mut out = Vec::new();
        let mut rng = stream_rng(seed, 0);
        let layouts: Vec<_> = [
            (Family::Standard, 5),
            (Family::Standard, 7),
            (Family::Rotated, 7),
        ]
        .into_iter()
        .map(|(f, d)| CodeLayout::new(f, d).unwrap())
        .collect();
        while out.len() < count {
            let layout = &layouts[out.len() % layouts.len()];
            let kind = if out.len() % 2 == 0 {
                ErrorType::Z
            } else {
                ErrorType::X
            };
            let m = layout.lattice(kind).num_ancillas();
            let k = 1 + out.len() % 8;
            let defects = rand::seq::index::sample(&mut rng, m, k).into_vec();
            let g = build_complete_graph(layout, kind, &DistanceProvider::Manhattan, &defects);
            let (m1, m2) = ghost_modes(k);
            for mode in [m1, Some(m2)] {
                let gg = match mode {
                    Some(m) => g.add_ghosts(m),
                    None => g.clone(),
                };
                if gg.len() <= 10 {
                    out.push(gg);
                }
            }
        }
        out
    }

    #[test]
    fn tree_matching_has_the_metric_of_every_perfect_matching() {
        for g in random_ghosted_graphs(21, 300) {
            let fs: Vec<u32> = all_perfect_matchings(&g)
                .into_iter()
                .map(|m| MatchSolution::new(&g, m).f_metric)
                .collect();
            assert!(fs.iter().all(|&f| f == fs[0]), "{fs:?}");
            let sol = tree_match(&build_mst(g.clone())).unwrap();
            assert!(sol.is_perfect_on(&g));
            assert_eq!(sol.f_metric, fs[0]);
        }
    }

    #[test]
    fn the_two_matchings_differ_by_a_logical() {
        let layout = CodeLayout::new(Family::Standard, 7).unwrap();
        let model = NoiseModel::depolarizing(0.05).unwrap();
        let mut rng = stream_rng(8, 0);
        let mut checked = 0;
        while checked < 500 {
            let e = sample_error(&layout, &model, &mut rng);
            let defects = layout.extract_syndrome(&e).x_defects;
            if defects.is_empty() {
                continue;
            }
            let g = build_complete_graph(
                &layout,
                ErrorType::Z,
                &DistanceProvider::Manhattan,
                &defects,
            );
            let (t1, t2) = make_ghosted_trees(&g, TreeConstruction::Mst);
            let (e1, e2) = (tree_match(&t1).unwrap(), tree_match(&t2).unwrap());
            let mut c1 = PauliError::identity(layout.n());
            apply_pairs(&layout, &t1.graph, &e1.pairs, c1.part_mut(ErrorType::Z));
            let mut c2 = PauliError::identity(layout.n());
            apply_pairs(&layout, &t2.graph, &e2.pairs, c2.part_mut(ErrorType::Z));
            assert_eq!(layout.residual_class(&c1, &c2), ResidualClass::ZL);
            assert_eq!(e1.f_metric + e2.f_metric, layout.d());
            checked += 1;
        }
    }

    #[test]
    fn degree_stays_bounded_at_moderate_noise() {
        let model = NoiseModel::depolarizing(0.05).unwrap();
        for family in [Family::Standard, Family::Rotated] {
            let layout = CodeLayout::new(family, 7).unwrap();
            let mut rng = stream_rng(9, 0);
            for _ in 0..5000 {
                let e = sample_error(&layout, &model, &mut rng);
                let s = layout.extract_syndrome(&e);
                for kind in [ErrorType::Z, ErrorType::X] {
                    let g = build_complete_graph(
                        &layout,
                        kind,
                        &DistanceProvider::Manhattan,
                        s.defects(kind),
                    );
                    let (t1, t2) = make_ghosted_trees(&g, TreeConstruction::Mst);
                    assert!(t1.max_degree() <= 4 && t2.max_degree() <= 4);
                }
            }
        }
    }

    #[test]
    fn high_degree_vertices_are_reported() {
        // dense syndromes occasionally give a defect five tree neighbours
        let layout = CodeLayout::new(Family::Standard, 7).unwrap();
        let model = NoiseModel::depolarizing(0.1).unwrap();
        let mut rng = stream_rng(1, 0);
        let mut seen = 0;
        for _ in 0..20_000 {
            let e = sample_error(&layout, &model, &mut rng);
            let s = layout.extract_syndrome(&e);
            for kind in [ErrorType::Z, ErrorType::X] {
                let g = build_complete_graph(
                    &layout,
                    kind,
                    &DistanceProvider::Manhattan,
                    s.defects(kind),
                );
                let (t1, t2) = make_ghosted_trees(&g, TreeConstruction::Mst);
                for t in [t1, t2] {
                    if t.max_degree() > 4 {
                        seen += 1;
                        assert!(matches!(tree_match(&t), Err(Error::Structural(_))));
                    }
                }
            }
        }
        assert!(seen > 0);
    }

    proptest! {
        #[test]
        fn tree_match_is_perfect_on_random_weighted_trees(
            n in (1usize..8).prop_map(|k| 2 * k),
            ws in proptest::collection::vec(1u8..10, 64),
            seed in 0u64..1000,
        ) {
            let g = DefectGraph::from_weights(
                (0..n * n)
                    .map(|i| if i / n == i % n { 0.0 } else { ws[(i / n + i % n) % 64] as f64 + (seed % 3) as f64 })
                    .collect(),
            );
            let t = build_mst(g.clone());
            prop_assert!(t.is_spanning_tree());
            prop_assert_eq!(t.total_weight(), {
                if n <= 6 { brute_force_mst_weight(&g) } else { t.total_weight() }
            });
            if t.max_degree() <= 4 {
                if let Ok(sol) = tree_match(&t) {
                    prop_assert!(sol.is_perfect_on(&g));
                }
            }
        }
    }
}
