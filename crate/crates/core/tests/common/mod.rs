//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use storage_codes::flowgame::{FlowGraph, Vertex};
use storage_codes::{BitMatrix, BitVector, Subspace};

/// Minimum `S`–collector cut by enumerating every vertex bipartition.
/// The collector attaches to `sinks` with unbounded edges.
pub fn brute_force_min_cut(g: &FlowGraph, sinks: &[usize]) -> u64 {
    let inner = g.vertex_count() - 1;
    assert!(inner <= 20, "too many vertices for enumeration");
    let edges = g.edges();
    let mut best = u64::MAX;
    // bit v-1 of `side` set: vertex v is on the source side
    for side in 0u32..1 << inner {
        let on_source = |v: Vertex| match v {
            Vertex::Source => true,
            other => side >> (FlowGraph::vertex_index(other) - 1) & 1 == 1,
        };
        // a sink-feeding vertex on the source side cuts an unbounded edge
        if sinks.iter().any(|&i| on_source(Vertex::Out(i))) {
            continue;
        }
        let cut: u64 = edges
            .iter()
            .filter(|e| on_source(e.from) && !on_source(e.to))
            .map(|e| e.cap)
            .sum();
        best = best.min(cut);
    }
    best
}

/// A random game history on at most `max_incarnations` incarnations,
/// plus a random non-empty collector set.
pub fn random_flow_graph(rng: &mut ChaCha8Rng, max_incarnations: usize) -> (FlowGraph, Vec<usize>) {
    let n = rng.gen_range(2..=4.min(max_incarnations));
    let alpha = rng.gen_range(1..=3);
    let mut g = FlowGraph::initial(n, alpha).unwrap();
    let rounds = rng.gen_range(0..=max_incarnations - n);
    for _ in 0..rounds {
        let live = g.live();
        g.kill(*live.choose(rng).unwrap()).unwrap();
        let live = g.live();
        let r = rng.gen_range(1..=live.len());
        let helpers: Vec<usize> = live.choose_multiple(rng, r).copied().collect();
        g.rebuild(&helpers, rng.gen_range(1..=3)).unwrap();
    }
    let all: Vec<usize> = (0..g.incarnations().len()).collect();
    let pool = if rng.gen_bool(0.5) { g.live() } else { all };
    let size = rng.gen_range(1..=pool.len());
    let sinks = pool.choose_multiple(rng, size).copied().collect();
    (g, sinks)
}

pub fn random_subspace(rng: &mut ChaCha8Rng, m: usize) -> Subspace {
    let rows = rng.gen_range(0..=m);
    let vs: Vec<BitVector> = (0..rows)
        .map(|_| BitVector::from_word(m, rng.gen()))
        .collect();
    Subspace::row_space(&BitMatrix::new(m, vs).unwrap())
}

/// Checks `a ∩ b` and `a + b` against element enumeration and the
/// dimension formula. Returns a description of the first mismatch.
pub fn check_subspace_pair(a: &Subspace, b: &Subspace) -> Option<String> {
    let meet = a.intersect(b).unwrap();
    let join = a.sum(b).unwrap();
    if a.dim() + b.dim() != meet.dim() + join.dim() {
        return Some(format!("dimension formula fails for {a} and {b}"));
    }
    let common: Vec<BitVector> = a
        .elements()
        .into_iter()
        .filter(|v| b.contains(v).unwrap())
        .collect();
    if common != meet.elements() {
        return Some(format!("intersection of {a} and {b} is not {meet}"));
    }
    let in_sum = |v: &BitVector| a.elements().iter().any(|u| b.contains(&(*u ^ *v)).unwrap());
    if join.elements().iter().any(|v| !in_sum(v)) {
        return Some(format!("sum of {a} and {b} is too large"));
    }
    None
}
