//! Cut functions of the live frontier.
//!
//! For a set `A` of live slots, `f(A)` is the max flow from the source to a
//! collector attached to the slots in `A`. Every future min-cut of the game
//! depends on the history only through `f`: rebuilding slot `i` from helper
//! set `H` maps `f` to
//!
//! ```text
//! f'(A) = f(A)                                               if i ∉ A
//! f'(A) = min( f(A∖i) + α, min_{B ⊆ H} f((A∖i) ∪ (H∖B)) + |B|·β )   otherwise
//! ```
//!
//! (the newcomer's `α`-edge is cut, or each helper edge is either cut or its
//! tail joins the sink side). Tables are indexed by bitmask over slots.

use itertools::Itertools;

use super::graph::FlowGraph;

/// Table of `f` over all `2^n` slot subsets.
pub type CutTable = Vec<u8>;

/// `f(A) = |A|·α`: every initial node is fed directly by the source.
pub fn initial(n: usize, alpha: u8) -> CutTable {
    (0..1u32 << n)
        .map(|a| a.count_ones() as u8 * alpha)
        .collect()
}

/// Tabulates `f` by max flow. A vacant slot contributes nothing.
pub fn from_graph(g: &FlowGraph) -> CutTable {
    let n = g.n();
    (0..1usize << n)
        .map(|mask| {
            let ids: Vec<usize> = (0..n)
                .filter(|&s| mask >> s & 1 == 1)
                .filter_map(|s| g.slots()[s])
                .collect();
            g.collector_value_on(&ids).expect("live ids are in range") as u8
        })
        .collect()
}

/// Drops slot `i`, renumbering the slots above it down by one.
pub fn restrict(f: &[u8], n: usize, i: usize) -> CutTable {
    let low = (1usize << i) - 1;
    (0..1usize << (n - 1))
        .map(|m| f[(m & low) | ((m & !low) << 1)])
        .collect()
}

/// Rebuilds slot `i` from the helper slots in `helpers`.
pub fn rebuild(f: &[u8], n: usize, i: usize, helpers: usize, alpha: u8, beta: u8) -> CutTable {
    let bit = 1usize << i;
    debug_assert!(helpers & bit == 0);
    let subsets: Vec<(usize, u8)> = subsets_of(helpers)
        .map(|b| (helpers & !b, b.count_ones() as u8 * beta))
        .collect();
    (0..1usize << n)
        .map(|a| {
            if a & bit == 0 {
                return f[a];
            }
            let rest = a & !bit;
            subsets
                .iter()
                .map(|&(kept, cost)| f[rest | kept] + cost)
                .fold(f[rest] + alpha, u8::min)
        })
        .collect()
}

/// Appends a newcomer as slot `n` of an `n`-slot table.
pub fn extend(g: &[u8], n: usize, helpers: usize, alpha: u8, beta: u8) -> CutTable {
    let mut f = g.to_vec();
    f.extend(std::iter::repeat_n(0, g.len()));
    rebuild(&f, n + 1, n, helpers, alpha, beta)
}

fn subsets_of(mask: usize) -> impl Iterator<Item = usize> {
    // walks all submasks, ending with the empty one
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = (cur != 0).then(|| (cur - 1) & mask);
        Some(cur)
    })
}

fn remap(f: &[u8], n: usize, new_pos: &[usize]) -> CutTable {
    let mut out = vec![0u8; f.len()];
    for (a, &v) in f.iter().enumerate() {
        let b = (0..n)
            .filter(|&s| a >> s & 1 == 1)
            .fold(0usize, |acc, s| acc | 1 << new_pos[s]);
        out[b] = v;
    }
    out
}

fn swaps_preserve(f: &[u8], n: usize, x: usize, y: usize) -> bool {
    let mut pos: Vec<usize> = (0..n).collect();
    pos.swap(x, y);
    remap(f, n, &pos) == f
}

/// Lexicographically smallest relabelling among those that sort slots by
/// an isomorphism-invariant signature. Equal tables under some slot
/// permutation map to the same canonical table.
pub fn canonical(f: &[u8], n: usize) -> CutTable {
    let full = (1usize << n) - 1;
    let sig = |s: usize| {
        let pairs: Vec<u8> = (0..n)
            .filter(|&t| t != s)
            .map(|t| f[1 << s | 1 << t])
            .sorted()
            .collect();
        let total: u32 = (0..=full)
            .filter(|a| a >> s & 1 == 1)
            .map(|a| f[a] as u32)
            .sum();
        (f[1 << s], f[full & !(1 << s)], pairs, total)
    };
    let sigs: Vec<_> = (0..n).map(sig).collect();
    let order: Vec<usize> = (0..n).sorted_by(|&a, &b| sigs[a].cmp(&sigs[b])).collect();
    let groups: Vec<Vec<usize>> = order
        .iter()
        .copied()
        .chunk_by(|&s| sigs[s].clone())
        .into_iter()
        .map(|(_, g)| g.collect())
        .collect();

    // a group whose adjacent transpositions all fix f is fully symmetric
    // and needs no permuting
    let choices: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .map(|g| {
            if g.len() == 1 || g.windows(2).all(|w| swaps_preserve(f, n, w[0], w[1])) {
                vec![g.clone()]
            } else {
                g.iter().copied().permutations(g.len()).collect()
            }
        })
        .collect();

    let mut best: Option<CutTable> = None;
    for pick in choices.iter().multi_cartesian_product() {
        let mut new_pos = vec![0usize; n];
        for (rank, &s) in pick.iter().flat_map(|g| g.iter()).enumerate() {
            new_pos[s] = rank;
        }
        let t = remap(f, n, &new_pos);
        if best.as_ref().is_none_or(|b| t < *b) {
            best = Some(t);
        }
    }
    best.unwrap_or_else(|| remap(f, n, &(0..n).collect::<Vec<_>>()))
}
