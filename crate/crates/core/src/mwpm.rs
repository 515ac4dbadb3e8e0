//! Exact minimum-weight perfect matching over vertex subsets.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{build_complete_graph, DefectGraph, DistanceProvider, GhostMode, Vertex};
use crate::lattice::{CodeLayout, Syndrome};
use crate::matching::{apply_pairs, MatchSolution, MatchedPair};
use crate::pauli::{ErrorType, PauliError};

pub const DEFAULT_CAP: usize = 24;

/// Above this many vertices the memo table is a hash map rather than a
/// dense array.
const DENSE_LIMIT: usize = 20;

/// Solved states: best cost and `partner + 1` of the lowest vertex, with a
/// zero partner marking an unsolved state.
enum Memo {
    Dense { cost: Vec<f64>, partner: Vec<u8> },
    Sparse(HashMap<u32, (f64, u8)>),
}

impl Memo {
    fn new(n: usize) -> Self {
        if n <= DENSE_LIMIT {
            Memo::Dense {
                cost: vec![0.0; 1 << n],
                partner: vec![0; 1 << n],
            }
        } else {
            Memo::Sparse(HashMap::new())
        }
    }

    fn get(&self, mask: u32) -> Option<(f64, u8)> {
        match self {
            Memo::Dense { cost, partner } => {
                let p = partner[mask as usize];
                (p != 0).then(|| (cost[mask as usize], p))
            }
            Memo::Sparse(m) => m.get(&mask).copied(),
        }
    }

    fn set(&mut self, mask: u32, value: (f64, u8)) {
        match self {
            Memo::Dense { cost, partner } => {
                cost[mask as usize] = value.0;
                partner[mask as usize] = value.1;
            }
            Memo::Sparse(m) => {
                m.insert(mask, value);
            }
        }
    }
}

/// Minimum-weight perfect matching of `graph` over its finite edges.
///
/// Among co-minimal matchings the lowest vertex takes its lowest-id partner,
/// recursively, so the result is deterministic.
pub fn exact_mwpm(graph: &DefectGraph, cap: usize) -> Result<MatchSolution> {
    let n = graph.len();
    if n % 2 == 1 {
        return Err(Error::OddVertexCount(n));
    }
    if n > cap || n > 32 {
        return Err(Error::Capacity { vertices: n, cap });
    }
    if n == 0 {
        return Ok(MatchSolution::new(graph, Vec::new()));
    }
    let mut memo = Memo::new(n);

    fn solve(graph: &DefectGraph, mask: u32, memo: &mut Memo) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some((c, _)) = memo.get(mask) {
            return c;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        // partner u8::MAX marks a state with no perfect matching
        let mut best = (f64::INFINITY, u8::MAX);
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let w = graph.weight(i, j);
            if w.is_finite() {
                let c = w + solve(graph, rest & !(1 << j), memo);
                if c < best.0 {
                    best = (c, j as u8 + 1);
                }
            }
        }
        memo.set(mask, best);
        best.0
    }

    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    if !solve(graph, full, &mut memo).is_finite() {
        return Err(Error::NoPerfectMatching);
    }
    let mut pairs = Vec::with_capacity(n / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let (_, j) = memo.get(mask).expect("solved state");
        let j = j as usize - 1;
        pairs.push(MatchedPair::new(i, j, graph.weight(i, j)));
        mask &= !(1 << i) & !(1 << j);
    }
    Ok(MatchSolution::new(graph, pairs))
}

/// Exact matching on the graph with one private boundary ghost per defect.
/// Ghost-to-ghost pairs are dropped from the returned matching.
pub fn mwpm_match(graph: &DefectGraph, cap: usize) -> Result<(DefectGraph, MatchSolution)> {
    let ghosted = graph.add_ghosts(GhostMode::PerDefect);
    let sol = exact_mwpm(&ghosted, cap)?;
    let pairs = sol
        .pairs
        .into_iter()
        .filter(|p| {
            !(matches!(ghosted.vertex(p.u), Vertex::PairedGhost { .. })
                && matches!(ghosted.vertex(p.v), Vertex::PairedGhost { .. }))
        })
        .collect();
    let sol = MatchSolution::new(&ghosted, pairs);
    Ok((ghosted, sol))
}

pub fn mwpm_decode(layout: &CodeLayout, syndrome: &Syndrome, cap: usize) -> Result<PauliError> {
    mwpm_decode_with(layout, syndrome, &DistanceProvider::Manhattan, cap)
}

pub fn mwpm_decode_with(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    provider: &DistanceProvider,
    cap: usize,
) -> Result<PauliError> {
    let mut correction = PauliError::identity(layout.n());
    for kind in [ErrorType::Z, ErrorType::X] {
        let defects = syndrome.defects(kind);
        if defects.is_empty() {
            continue;
        }
        let graph = build_complete_graph(layout, kind, provider, defects);
        let (ghosted, sol) = mwpm_match(&graph, cap)?;
        apply_pairs(layout, &ghosted, &sol.pairs, correction.part_mut(kind));
    }
    Ok(correction)
}
