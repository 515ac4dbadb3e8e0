//! Complete weighted graphs over syndrome defects, with optional ghosts.
//!
//! Weights count data qubits (uniform noise) or sum log-likelihood costs
//! (Dijkstra mode). Vertices are ordered defects first, by ascending
//! ancilla id, then ghosts; every tie-break downstream relies on that
//! order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{CodeLayout, End, GeneratorType, MatchingLattice, Side};
use crate::pauli::ErrorType;

/// Weight of a missing edge.
pub const NO_EDGE: f64 = f64::INFINITY;

#[derive(Clone, Debug, PartialEq)]
pub enum DistanceProvider {
    /// Grid shortcut; rotated layouts fall back to BFS.
    Manhattan,
    Bfs,
    /// Shortest paths under per-qubit costs.
    Dijkstra(Vec<f64>),
}

impl DistanceProvider {
    /// Log-likelihood costs `-ln(p / (1 - p))` for per-qubit error rates.
    pub fn from_probabilities(p: &[f64]) -> Self {
        DistanceProvider::Dijkstra(p.iter().map(|&p| -(p / (1.0 - p)).ln()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ancilla {
    pub kind: GeneratorType,
    pub index: usize,
}

impl Ancilla {
    pub fn x(index: usize) -> Self {
        Self {
            kind: GeneratorType::X,
            index,
        }
    }

    pub fn z(index: usize) -> Self {
        Self {
            kind: GeneratorType::Z,
            index,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry(f64, End);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths from an ancilla; boundaries are sinks.
fn dijkstra(lat: &MatchingLattice, costs: &[f64], src: usize) -> (Vec<f64>, [f64; 2]) {
    let mut dist = vec![f64::INFINITY; lat.num_ancillas()];
    let mut boundary = [f64::INFINITY; 2];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(HeapEntry(0.0, End::Ancilla(src)));
    while let Some(HeapEntry(du, u)) = heap.pop() {
        let u = match u {
            End::Ancilla(u) => u,
            End::Boundary(_) => continue,
        };
        if du > dist[u] {
            continue;
        }
        for &(q, e) in lat.neighbors(u) {
            let nd = du + costs[q];
            match e {
                End::Ancilla(v) if nd < dist[v] => {
                    dist[v] = nd;
                    heap.push(HeapEntry(nd, e));
                }
                End::Boundary(s) if nd < boundary[s.index()] => boundary[s.index()] = nd,
                _ => {}
            }
        }
    }
    (dist, boundary)
}

fn check_ancilla(layout: &CodeLayout, a: Ancilla) -> Result<&MatchingLattice> {
    let lat = layout.lattice(a.kind.detects());
    if a.index >= lat.num_ancillas() {
        return Err(Error::AncillaOutOfRange {
            index: a.index,
            count: lat.num_ancillas(),
        });
    }
    Ok(lat)
}

/// Length (or cost) of the cheapest bulk chain whose syndrome is `{a, b}`.
pub fn ancilla_distance(
    layout: &CodeLayout,
    provider: &DistanceProvider,
    a: Ancilla,
    b: Ancilla,
) -> Result<f64> {
    if a.kind != b.kind {
        return Err(Error::MixedGeneratorTypes);
    }
    let lat = check_ancilla(layout, a)?;
    check_ancilla(layout, b)?;
    Ok(lattice_distance(lat, provider, a.index, b.index))
}

fn lattice_distance(lat: &MatchingLattice, provider: &DistanceProvider, a: usize, b: usize) -> f64 {
    match provider {
        DistanceProvider::Manhattan => {
            lat.manhattan_distance(a, b)
                .unwrap_or_else(|| lat.bulk_distance(a, b)) as f64
        }
        DistanceProvider::Bfs => lat.bulk_distance(a, b) as f64,
        DistanceProvider::Dijkstra(costs) => dijkstra(lat, costs, a).0[b],
    }
}

/// Length (or cost) of the cheapest chain from `a` to the given boundary.
pub fn boundary_distance(
    layout: &CodeLayout,
    provider: &DistanceProvider,
    a: Ancilla,
    side: Side,
) -> Result<f64> {
    let lat = check_ancilla(layout, a)?;
    Ok(lattice_boundary_distance(lat, provider, a.index)[side.index()])
}

fn lattice_boundary_distance(
    lat: &MatchingLattice,
    provider: &DistanceProvider,
    a: usize,
) -> [f64; 2] {
    match provider {
        DistanceProvider::Manhattan if lat.grid(a).is_some() => {
            let h = lat.hpos(End::Ancilla(a));
            [h as f64, (lat.distance() - h) as f64]
        }
        DistanceProvider::Manhattan | DistanceProvider::Bfs => [
            lat.boundary_distance(a, Side::Low) as f64,
            lat.boundary_distance(a, Side::High) as f64,
        ],
        DistanceProvider::Dijkstra(costs) => dijkstra(lat, costs, a).1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    /// A defect, by ancilla index within its generator type.
    Defect(usize),
    /// A ghost on one boundary, shared by all defects.
    Ghost(Side),
    /// The private ghost of defect vertex `owner`, placed on its nearer boundary.
    PairedGhost { owner: usize, side: Side },
}

impl Vertex {
    pub fn is_ghost(self) -> bool {
        !matches!(self, Vertex::Defect(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhostMode {
    Left,
    Right,
    /// Ghosts on both sides, joined to each other at zero weight.
    Both,
    /// One private ghost per defect; ghosts joined to each other at zero weight.
    PerDefect,
}

/// Dense weighted graph over defects and ghosts.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectGraph {
    error_type: ErrorType,
    d: u32,
    vertices: Vec<Vertex>,
    weights: Vec<f64>,
    hpos: Vec<u32>,
    defect_count: usize,
    boundary: Vec<[f64; 2]>,
}

impl DefectGraph {
    /// Builds a graph from explicit parts; `weights` is row-major `N x N`.
    ///
    /// Mostly useful for tests and for feeding matchers hand-made instances.
    pub fn from_parts(
        error_type: ErrorType,
        d: u32,
        vertices: Vec<Vertex>,
        weights: Vec<f64>,
        hpos: Vec<u32>,
        boundary: Vec<[f64; 2]>,
    ) -> Self {
        let n = vertices.len();
        assert_eq!(weights.len(), n * n);
        assert_eq!(hpos.len(), n);
        let defect_count = vertices.iter().filter(|v| !v.is_ghost()).count();
        assert!(
            vertices[defect_count..].iter().all(|v| v.is_ghost()),
            "ghosts follow the defects"
        );
        assert_eq!(boundary.len(), defect_count);
        Self {
            error_type,
            d,
            vertices,
            weights,
            hpos,
            defect_count,
            boundary,
        }
    }

    /// Complete graph on an arbitrary symmetric weight matrix, with all
    /// vertices treated as defects at horizontal position 0.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let n = (weights.len() as f64).sqrt() as usize;
        assert_eq!(n * n, weights.len());
        Self::from_parts(
            ErrorType::Z,
            1,
            (0..n).map(Vertex::Defect).collect(),
            weights,
            vec![0; n],
            vec![[0.0; 2]; n],
        )
    }

    pub fn error_type(&self) -> ErrorType {
        self.error_type
    }

    pub fn distance(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn defect_count(&self) -> usize {
        self.defect_count
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vertex {
        self.vertices[v]
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[u * self.vertices.len() + v]
    }

    pub fn hpos(&self, v: usize) -> u32 {
        self.hpos[v]
    }

    /// Boundary distance of defect vertex `v` (defects come first).
    pub fn boundary_distance(&self, v: usize, side: Side) -> f64 {
        self.boundary[v][side.index()]
    }

    /// Finite edges `(u, v, w)` with `u < v`, in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |u| {
            (u + 1..n).filter_map(move |v| {
                let w = self.weight(u, v);
                w.is_finite().then_some((u, v, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Smallest weight from defect `v` to any other defect.
    pub fn min_defect_distance(&self, v: usize) -> f64 {
        (0..self.defect_count)
            .filter(|&u| u != v)
            .map(|u| self.weight(u, v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Borrowed view of this graph with ghosts appended.
    ///
    /// Ghosts are only ever added to a ghost-free graph.
    pub fn ghosted(&self, mode: Option<GhostMode>) -> GhostedView<'_> {
        assert_eq!(
            self.defect_count,
            self.len(),
            "ghosts are added to a ghost-free graph"
        );
        GhostedView { base: self, mode }
    }

    /// Copy of this graph with ghost vertices appended.
    pub fn add_ghosts(&self, mode: GhostMode) -> DefectGraph {
        self.ghosted(Some(mode)).materialize()
    }

    /// Side of the nearer boundary of defect `v`, ties going low.
    pub fn nearer_side(&self, v: usize) -> Side {
        let [lo, hi] = self.boundary[v];
        if hi < lo {
            Side::High
        } else {
            Side::Low
        }
    }

    /// Edge list, one `u v weight` line per finite edge.
    pub fn dump_edges(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        out
    }
}

/// Read access shared by materialised graphs and ghosted views.
pub trait WeightedGraph {
    fn len(&self) -> usize;
    fn vertex(&self, v: usize) -> Vertex;
    fn weight(&self, u: usize, v: usize) -> f64;
    fn hpos(&self, v: usize) -> u32;
    fn distance(&self) -> u32;
    fn error_type(&self) -> ErrorType;
    /// Number of defect vertices; they precede all ghosts.
    fn defect_count(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl WeightedGraph for DefectGraph {
    fn len(&self) -> usize {
        self.vertices.len()
    }

    fn vertex(&self, v: usize) -> Vertex {
        self.vertices[v]
    }

    #[inline]
    fn weight(&self, u: usize, v: usize) -> f64 {
        DefectGraph::weight(self, u, v)
    }

    fn hpos(&self, v: usize) -> u32 {
        self.hpos[v]
    }

    fn distance(&self) -> u32 {
        self.d
    }

    fn error_type(&self) -> ErrorType {
        self.error_type
    }

    fn defect_count(&self) -> usize {
        self.defect_count
    }
}

/// A ghost-free graph with ghosts appended, weights computed on demand.
///
/// Vertex numbering matches [`DefectGraph::add_ghosts`].
#[derive(Clone, Copy, Debug)]
pub struct GhostedView<'a> {
    base: &'a DefectGraph,
    mode: Option<GhostMode>,
}

impl<'a> GhostedView<'a> {
    pub fn base(&self) -> &'a DefectGraph {
        self.base
    }

    pub fn mode(&self) -> Option<GhostMode> {
        self.mode
    }

    fn ghost_count(&self) -> usize {
        match self.mode {
            None => 0,
            Some(GhostMode::Left | GhostMode::Right) => 1,
            Some(GhostMode::Both) => 2,
            Some(GhostMode::PerDefect) => self.base.defect_count,
        }
    }

    /// Side of the `i`-th ghost, with its owner for private ghosts.
    #[inline]
    fn ghost(&self, i: usize) -> (Side, Option<usize>) {
        match self.mode {
            Some(GhostMode::Left) => (Side::Low, None),
            Some(GhostMode::Right) => (Side::High, None),
            Some(GhostMode::Both) => (if i == 0 { Side::Low } else { Side::High }, None),
            Some(GhostMode::PerDefect) => (self.base.nearer_side(i), Some(i)),
            None => unreachable!("ghost index on a ghost-free view"),
        }
    }

    pub fn materialize(&self) -> DefectGraph {
        let n = WeightedGraph::len(self);
        let mut weights = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                weights.push(WeightedGraph::weight(self, u, v));
            }
        }
        DefectGraph {
            error_type: self.base.error_type,
            d: self.base.d,
            vertices: (0..n).map(|v| WeightedGraph::vertex(self, v)).collect(),
            weights,
            hpos: (0..n).map(|v| WeightedGraph::hpos(self, v)).collect(),
            defect_count: self.base.defect_count,
            boundary: self.base.boundary.clone(),
        }
    }
}

impl WeightedGraph for GhostedView<'_> {
    fn len(&self) -> usize {
        self.base.defect_count + self.ghost_count()
    }

    fn vertex(&self, v: usize) -> Vertex {
        let k = self.base.defect_count;
        if v < k {
            return self.base.vertices[v];
        }
        match self.ghost(v - k) {
            (side, None) => Vertex::Ghost(side),
            (side, Some(owner)) => Vertex::PairedGhost { owner, side },
        }
    }

    #[inline]
    fn weight(&self, u: usize, v: usize) -> f64 {
        let k = self.base.defect_count;
        match (u < k, v < k) {
            (true, true) => self.base.weight(u, v),
            (false, false) => 0.0,
            (du, _) => {
                let (x, g) = if du { (u, v - k) } else { (v, u - k) };
                match self.ghost(g) {
                    (side, None) => self.base.boundary[x][side.index()],
                    (side, Some(owner)) if owner == x => self.base.boundary[x][side.index()],
                    _ => NO_EDGE,
                }
            }
        }
    }

    fn hpos(&self, v: usize) -> u32 {
        let k = self.base.defect_count;
        if v < k {
            return self.base.hpos[v];
        }
        match self.ghost(v - k).0 {
            Side::Low => 0,
            Side::High => self.base.d,
        }
    }

    fn distance(&self) -> u32 {
        self.base.d
    }

    fn error_type(&self) -> ErrorType {
        self.base.error_type
    }

    fn defect_count(&self) -> usize {
        self.base.defect_count
    }
}

/// Complete ghost-free graph over the defects of one pass.
///
/// `defects` are ancilla indices of the generator type detecting
/// `error_type`; they are sorted before use.
pub fn build_complete_graph(
    layout: &CodeLayout,
    error_type: ErrorType,
    provider: &DistanceProvider,
    defects: &[usize],
) -> DefectGraph {
    let lat = layout.lattice(error_type);
    let mut defects = defects.to_vec();
    defects.sort_unstable();
    let k = defects.len();
    let mut weights = vec![0.0; k * k];
    let mut boundary = Vec::with_capacity(k);
    match provider {
        DistanceProvider::Dijkstra(costs) => {
            for (i, &a) in defects.iter().enumerate() {
                let (dist, b) = dijkstra(lat, costs, a);
                for (j, &bj) in defects.iter().enumerate() {
                    weights[i * k + j] = if i == j { 0.0 } else { dist[bj] };
                }
                boundary.push(b);
            }
        }
        _ => {
            for (i, &a) in defects.iter().enumerate() {
                for (j, &b) in defects.iter().enumerate().skip(i + 1) {
                    let w = lattice_distance(lat, provider, a, b);
                    weights[i * k + j] = w;
                    weights[j * k + i] = w;
                }
                boundary.push(lattice_boundary_distance(lat, provider, a));
            }
        }
    }
    DefectGraph {
        error_type,
        d: layout.d(),
        vertices: defects.iter().map(|&a| Vertex::Defect(a)).collect(),
        weights,
        hpos: defects.iter().map(|&a| lat.hpos(End::Ancilla(a))).collect(),
        defect_count: k,
        boundary,
    }
}
