//! Rapid-fire decoding: greedy matching on the two ghosted graphs.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::graph::{DefectGraph, GhostMode, WeightedGraph};
use crate::lattice::{CodeLayout, Syndrome};
use crate::matching::{ordered_bits, MatchSolution, MatchedPair};
use crate::pauli::PauliError;
use crate::stm::{decode_passes, select_solution, Candidate, Choice, PassResult};

/// Repeatedly takes the lightest edge between two unmatched vertices.
///
/// At equal weight a defect-to-ghost edge goes before a defect-to-defect edge,
/// then the lexicographically smaller vertex pair wins. The edge joining two
/// ghosts is only used once nothing else is left.
pub fn greedy_match<G: WeightedGraph + ?Sized>(graph: &G) -> Result<MatchSolution> {
    Ok(MatchSolution::new(graph, greedy_pairs(graph)?))
}

fn greedy_pairs<G: WeightedGraph + ?Sized>(graph: &G) -> Result<Vec<MatchedPair>> {
    let n = graph.len();
    if n % 2 == 1 {
        return Err(Error::Structural(format!(
            "greedy matching on {n} vertices"
        )));
    }
    GREEDY_BUF.with(|cell| greedy_with(graph, &mut cell.borrow_mut()))
}

thread_local! {
    static GREEDY_BUF: RefCell<(Vec<u128>, Vec<bool>)> = RefCell::default();
}

fn greedy_with<G: WeightedGraph + ?Sized>(
    graph: &G,
    buf: &mut (Vec<u128>, Vec<bool>),
) -> Result<Vec<MatchedPair>> {
    let n = graph.len();
    let k = graph.defect_count();
    let (keys, free) = buf;
    keys.clear();
    // ghost pair last, then weight, then edges to a ghost first, then ids
    for u in 0..n {
        for v in u + 1..n {
            let w = graph.weight(u, v);
            if w.is_finite() {
                keys.push(
                    ((u >= k) as u128) << 127
                        | (ordered_bits(w) as u128) << 63
                        | ((v < k) as u128) << 62
                        | (u as u128) << 31
                        | v as u128,
                );
            }
        }
    }
    free.clear();
    free.resize(n, true);
    let mut pairs = Vec::with_capacity(n / 2);
    // the lightest edge between free vertices, n / 2 times
    while 2 * pairs.len() < n {
        let mut best = u128::MAX;
        for &key in keys.iter() {
            if key < best
                && free[(key >> 31) as usize & 0x7fff_ffff]
                && free[key as usize & 0x7fff_ffff]
            {
                best = key;
            }
        }
        if best == u128::MAX {
            break;
        }
        let (u, v) = (
            (best >> 31) as usize & 0x7fff_ffff,
            best as usize & 0x7fff_ffff,
        );
        free[u] = false;
        free[v] = false;
        pairs.push(MatchedPair::new(u, v, graph.weight(u, v)));
    }
    if 2 * pairs.len() != n {
        return Err(Error::Structural(
            "greedy matching left vertices unpaired".into(),
        ));
    }
    Ok(pairs)
}

/// Greedy matching of both ghosted graphs, combined by the tree decoder's
/// selection rule.
pub fn rfire_match(graph: &DefectGraph, t: u32) -> Result<PassResult> {
    let k = graph.defect_count();
    if k == 0 {
        return Ok(PassResult::empty());
    }
    let (m1, m2) = if k.is_multiple_of(2) {
        (None, GhostMode::Both)
    } else {
        (Some(GhostMode::Left), GhostMode::Right)
    };
    let run = |mode: Option<GhostMode>| -> Result<Candidate> {
        let view = graph.ghosted(mode);
        Ok(Candidate::new(&view, greedy_pairs(&view)?))
    };
    let (matching, choice) = select_solution(run(m1)?, || run(Some(m2)), t)?;
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

pub fn rfire_decode(layout: &CodeLayout, syndrome: &Syndrome) -> Result<PauliError> {
    decode_passes(layout, syndrome, |g| rfire_match(g, layout.t()))
}
