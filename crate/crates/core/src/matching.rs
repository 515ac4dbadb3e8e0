//! Perfect-matching solutions, the column metric and correction expansion.

use crate::graph::{Vertex, WeightedGraph};
use crate::lattice::{CodeLayout, Side};
use crate::pauli::{ErrorType, PauliError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchedPair {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl MatchedPair {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        Self {
            u: u.min(v),
            v: u.max(v),
            weight,
        }
    }
}

/// A perfect matching with its weight and column statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchSolution {
    pub pairs: Vec<MatchedPair>,
    pub total_weight: f64,
    pub f_metric: u32,
    /// `u_j = c_j mod 2`.
    pub column_parities: Vec<u8>,
    /// `c_j`: number of matched chains crossing column `j` (0-based here).
    pub column_counts: Vec<u32>,
}

impl MatchSolution {
    pub fn new<G: WeightedGraph + ?Sized>(graph: &G, pairs: Vec<MatchedPair>) -> Self {
        let total_weight = pairs.iter().map(|p| p.weight).sum();
        let spans: Vec<(u32, u32)> = pairs.iter().filter_map(|p| pair_span(graph, p)).collect();
        let (column_counts, column_parities, f_metric) = column_metric(graph.distance(), &spans);
        Self {
            pairs,
            total_weight,
            f_metric,
            column_parities,
            column_counts,
        }
    }

    pub fn empty(d: u32) -> Self {
        Self {
            pairs: Vec::new(),
            total_weight: 0.0,
            f_metric: 0,
            column_parities: vec![0; d as usize],
            column_counts: vec![0; d as usize],
        }
    }

    /// True when every vertex of `graph` appears in exactly one pair.
    pub fn is_perfect_on<G: WeightedGraph + ?Sized>(&self, graph: &G) -> bool {
        let mut seen = vec![false; graph.len()];
        for p in &self.pairs {
            for x in [p.u, p.v] {
                if x >= seen.len() || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Horizontal extent `(low, high)` of the chain a pair stands for; pairs of
/// private ghosts stand for no chain.
fn pair_span<G: WeightedGraph + ?Sized>(graph: &G, p: &MatchedPair) -> Option<(u32, u32)> {
    if p.u.min(p.v) >= graph.defect_count()
        && matches!(graph.vertex(p.u), Vertex::PairedGhost { .. })
        && matches!(graph.vertex(p.v), Vertex::PairedGhost { .. })
    {
        return None;
    }
    let (ha, hb) = (graph.hpos(p.u), graph.hpos(p.v));
    Some((ha.min(hb), ha.max(hb)))
}

/// Column counts `c`, parities `u` and `f = sum(u)` for chains spanning
/// horizontal positions `(a, b]`.
pub fn column_metric(d: u32, spans: &[(u32, u32)]) -> (Vec<u32>, Vec<u8>, u32) {
    let mut c = vec![0u32; d as usize];
    for &(a, b) in spans {
        let (a, b) = (a.min(b), a.max(b));
        for j in a..b {
            c[j as usize] += 1;
        }
    }
    let u: Vec<u8> = c.iter().map(|&x| (x % 2) as u8).collect();
    let f = u.iter().map(|&x| x as u32).sum();
    (c, u, f)
}

/// Total weight and column metric `f` of a matching, without building the
/// per-column vectors.
pub fn weight_and_metric<G: WeightedGraph + ?Sized>(
    graph: &G,
    pairs: &[MatchedPair],
) -> (f64, u32) {
    let w = pairs.iter().map(|p| p.weight).sum();
    let d = graph.distance();
    if d > 128 {
        let spans: Vec<(u32, u32)> = pairs.iter().filter_map(|p| pair_span(graph, p)).collect();
        return (w, column_metric(d, &spans).2);
    }
    let mut parity = 0u128;
    for (a, b) in pairs.iter().filter_map(|p| pair_span(graph, p)) {
        parity ^= low_bits(b) ^ low_bits(a);
    }
    (w, parity.count_ones())
}

fn low_bits(n: u32) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Physical correction for a matching: each pair is routed along its own
/// canonical minimal chain.
pub fn expand_to_correction<G: WeightedGraph + ?Sized>(
    layout: &CodeLayout,
    graph: &G,
    pairs: &[MatchedPair],
) -> PauliError {
    let kind = graph.error_type();
    let mut correction = PauliError::identity(layout.n());
    apply_pairs(layout, graph, pairs, correction.part_mut(kind));
    correction
}

pub(crate) fn apply_pairs<G: WeightedGraph + ?Sized>(
    layout: &CodeLayout,
    graph: &G,
    pairs: &[MatchedPair],
    flips: &mut [bool],
) {
    let lat = layout.lattice(graph.error_type());
    let mut toggle = |qs: &[usize]| {
        for &q in qs {
            flips[q] ^= true;
        }
    };
    for p in pairs {
        let (a, b) = (graph.vertex(p.u), graph.vertex(p.v));
        match (a, b) {
            (Vertex::Defect(x), Vertex::Defect(y)) => toggle(&lat.path_between(x, y)),
            (Vertex::Defect(x), Vertex::Ghost(side) | Vertex::PairedGhost { side, .. })
            | (Vertex::Ghost(side) | Vertex::PairedGhost { side, .. }, Vertex::Defect(x)) => {
                toggle(&lat.path_to_boundary(x, side))
            }
            (Vertex::Ghost(s1), Vertex::Ghost(s2)) if s1 != s2 => toggle(lat.logical_chain()),
            _ => {}
        }
    }
}

/// Correction for one pass given as flips of that pass's error component.
pub fn correction_part<G: WeightedGraph + ?Sized>(
    layout: &CodeLayout,
    kind: ErrorType,
    graph: &G,
    pairs: &[MatchedPair],
) -> Vec<bool> {
    debug_assert_eq!(graph.error_type(), kind);
    let mut flips = vec![false; layout.n()];
    apply_pairs(layout, graph, pairs, &mut flips);
    flips
}

/// Every perfect matching of `graph` over its finite edges, by exhaustive
/// recursion on the lowest unmatched vertex.
pub fn all_perfect_matchings<G: WeightedGraph + ?Sized>(graph: &G) -> Vec<Vec<MatchedPair>> {
    fn rec<G: WeightedGraph + ?Sized>(
        graph: &G,
        free: &mut Vec<bool>,
        current: &mut Vec<MatchedPair>,
        out: &mut Vec<Vec<MatchedPair>>,
    ) {
        let Some(i) = free.iter().position(|&f| f) else {
            out.push(current.clone());
            return;
        };
        free[i] = false;
        for j in i + 1..free.len() {
            let w = graph.weight(i, j);
            if free[j] && w.is_finite() {
                free[j] = false;
                current.push(MatchedPair::new(i, j, w));
                rec(graph, free, current, out);
                current.pop();
                free[j] = true;
            }
        }
        free[i] = true;
    }
    let mut out = Vec::new();
    if graph.len().is_multiple_of(2) {
        rec(
            graph,
            &mut vec![true; graph.len()],
            &mut Vec::new(),
            &mut out,
        );
    }
    out
}

/// Bits of `w` as an unsigned integer with the same order as `total_cmp`.
pub(crate) fn ordered_bits(w: f64) -> u64 {
    let b = w.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | 1 << 63
    }
}

/// Horizontal position of a ghost side.
pub fn ghost_hpos(d: u32, side: Side) -> u32 {
    match side {
        Side::Low => 0,
        Side::High => d,
    }
}
