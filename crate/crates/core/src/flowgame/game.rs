//! The kill/rebuild game and its memoized minimax.

use std::collections::{HashMap, HashSet};
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::record::Record;

use super::cuts::{self, CutTable};
use super::graph::FlowGraph;

/// Memo entries allowed before a search gives up.
pub const DEFAULT_MEMO_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Killer,
    Builder,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    Kill { id: usize },
    Rebuild { id: usize, helpers: Vec<usize> },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Kill { id } => write!(f, "kill:{id}"),
            Move::Rebuild { id, helpers } => write!(f, "build:{id}<{}", helpers.iter().join("+")),
        }
    }
}

/// Fan-in and per-edge download of every rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameRules {
    pub n: usize,
    pub r: usize,
    pub alpha: u64,
    pub beta: u64,
}

impl GameRules {
    pub fn new(n: usize, r: usize, alpha: u64, beta: u64) -> Result<Self> {
        if n < 2 || r == 0 || r >= n || alpha == 0 || beta == 0 {
            return Err(Error::InvalidParams(format!(
                "game needs n >= 2, 1 <= r < n and positive alpha, beta; got n={n} r={r} alpha={alpha} beta={beta}"
            )));
        }
        Ok(Self { n, r, alpha, beta })
    }
}

/// A position in the game: the flow graph, whose turn it is and the
/// smallest collector value seen so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub rules: GameRules,
    pub graph: FlowGraph,
    pub to_move: Player,
    pub pending_failed: Option<usize>,
    pub history_min_cut: u64,
}

impl GameState {
    pub fn new(rules: GameRules) -> Result<Self> {
        let graph = FlowGraph::initial(rules.n, rules.alpha)?;
        let history_min_cut = graph.collector_value();
        Ok(Self {
            rules,
            graph,
            to_move: Player::Killer,
            pending_failed: None,
            history_min_cut,
        })
    }

    pub fn kill(&mut self, id: usize) -> Result<()> {
        if self.to_move != Player::Killer {
            return Err(Error::InvalidParams("it is the builder's turn".to_string()));
        }
        self.graph.kill(id)?;
        self.to_move = Player::Builder;
        self.pending_failed = Some(id);
        self.history_min_cut = self.history_min_cut.min(self.graph.collector_value());
        Ok(())
    }

    /// Returns the newcomer's id.
    pub fn rebuild(&mut self, helpers: &[usize]) -> Result<usize> {
        if self.to_move != Player::Builder {
            return Err(Error::InvalidParams("it is the killer's turn".to_string()));
        }
        if helpers.len() != self.rules.r {
            return Err(Error::InvalidParams(format!(
                "rebuild needs {} helpers, got {}",
                self.rules.r,
                helpers.len()
            )));
        }
        let id = self.graph.rebuild(helpers, self.rules.beta)?;
        self.to_move = Player::Killer;
        self.pending_failed = None;
        self.history_min_cut = self.history_min_cut.min(self.graph.collector_value());
        Ok(id)
    }

    pub fn apply(&mut self, mv: &Move) -> Result<()> {
        match mv {
            Move::Kill { id } => self.kill(*id),
            Move::Rebuild { id, helpers } => {
                let got = self.rebuild(helpers)?;
                if got != *id {
                    return Err(Error::InvalidParams(format!(
                        "rebuild created {got}, expected {id}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Result of a bounded-horizon search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameValue {
    /// Smallest collector value the killer can force within `horizon`
    /// rounds, counting the history.
    pub value: u64,
    /// Rounds actually searched; below the request if the memo cap hit.
    pub horizon: usize,
    pub requested_horizon: usize,
    pub capped: bool,
    pub principal_line: Vec<Move>,
    /// Running minimum obtained by replaying the line with max flow.
    pub line_value: u64,
    pub memo_entries: usize,
}

impl GameValue {
    pub fn to_record(&self) -> Record {
        Record::new()
            .with("value", self.value)
            .with("horizon", self.horizon as u64)
            .with("requested_horizon", self.requested_horizon as u64)
            .with("capped", self.capped)
            .with("line_value", self.line_value)
            .with("memo_entries", self.memo_entries as u64)
            .with(
                "principal_line",
                self.principal_line
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>(),
            )
    }
}

type Key = (Box<[u8]>, u8);

struct Search {
    n: usize,
    alpha: u8,
    beta: u8,
    cap: usize,
    enforce_cap: bool,
    /// Helper masks over `n − 1` slots.
    helper_sets: Vec<usize>,
    killer_memo: HashMap<Key, u8>,
    builder_memo: HashMap<Key, u8>,
}

impl Search {
    fn new(rules: &GameRules, cap: usize) -> Result<Self> {
        if rules.n > 8
            || rules.n as u64 * rules.alpha > u8::MAX as u64 - 1
            || rules.beta > u8::MAX as u64
        {
            return Err(Error::InvalidParams(format!(
                "game search supports n <= 8 and n*alpha < 255, got n={} alpha={}",
                rules.n, rules.alpha
            )));
        }
        let helper_sets = (0..rules.n - 1)
            .combinations(rules.r)
            .map(|c| c.iter().fold(0usize, |m, s| m | 1 << s))
            .collect();
        Ok(Self {
            n: rules.n,
            alpha: rules.alpha as u8,
            beta: rules.beta as u8,
            cap,
            enforce_cap: true,
            helper_sets,
            killer_memo: HashMap::new(),
            builder_memo: HashMap::new(),
        })
    }

    fn entries(&self) -> usize {
        self.killer_memo.len() + self.builder_memo.len()
    }

    fn check_cap(&self) -> Result<()> {
        if self.enforce_cap && self.entries() >= self.cap {
            return Err(Error::CapExceeded {
                count: self.entries() as u128,
                cap: self.cap as u128,
            });
        }
        Ok(())
    }

    /// Value with the killer to move and `h` rounds left.
    fn killer(&mut self, f: &[u8], h: usize) -> Result<u8> {
        let full = (1usize << self.n) - 1;
        if h == 0 {
            return Ok(f[full]);
        }
        let key: Key = (cuts::canonical(f, self.n).into(), h as u8);
        if let Some(&v) = self.killer_memo.get(&key) {
            return Ok(v);
        }
        let f = &key.0[..];
        let mut best = f[full];
        let mut seen = HashSet::new();
        let kills = (0..self.n).sorted_by_key(|&i| f[full & !(1 << i)]);
        for i in kills {
            // the builder can never lift the value above this cut
            if f[full & !(1 << i)] >= best {
                break;
            }
            let g = cuts::canonical(&cuts::restrict(f, self.n, i), self.n - 1);
            if !seen.insert(g.clone()) {
                continue;
            }
            best = best.min(self.builder_canonical(g, h)?);
        }
        self.check_cap()?;
        self.killer_memo.insert(key, best);
        Ok(best)
    }

    /// Value with the builder to move on the `n − 1` surviving slots; the
    /// rebuild completes round `h`.
    fn builder(&mut self, g: &[u8], h: usize) -> Result<u8> {
        self.builder_canonical(cuts::canonical(g, self.n - 1), h)
    }

    fn builder_canonical(&mut self, g: CutTable, h: usize) -> Result<u8> {
        let key: Key = (g.into(), h as u8);
        if let Some(&v) = self.builder_memo.get(&key) {
            return Ok(v);
        }
        let g = &key.0[..];
        let ceiling = g[(1usize << (self.n - 1)) - 1];
        if h == 0 {
            return Ok(ceiling);
        }
        let mut children: Vec<(CutTable, Option<u8>)> = Vec::new();
        let mut seen = HashSet::new();
        for &hs in &self.helper_sets {
            let c = cuts::canonical(
                &cuts::extend(g, self.n - 1, hs, self.alpha, self.beta),
                self.n,
            );
            if seen.insert(c.clone()) {
                // a shallower value bounds the deeper one from above
                let shallow = (h >= 2)
                    .then(|| {
                        self.killer_memo
                            .get(&(c.clone().into_boxed_slice(), (h - 2) as u8))
                            .copied()
                    })
                    .flatten();
                children.push((c, shallow));
            }
        }
        children.sort_by_key(|(_, s)| std::cmp::Reverse(s.unwrap_or(u8::MAX)));
        let mut best = 0u8;
        for (c, shallow) in children {
            if best >= ceiling {
                break;
            }
            if shallow.is_some_and(|s| s <= best) {
                continue;
            }
            best = best.max(self.killer(&c, h - 1)?);
        }
        let best = best.min(ceiling);
        self.check_cap()?;
        self.builder_memo.insert(key, best);
        Ok(best)
    }
}

/// Minimax with the default memo cap.
pub fn minimax(state: &GameState, horizon: usize) -> Result<GameValue> {
    minimax_capped(state, horizon, DEFAULT_MEMO_CAP)
}

/// Iteratively deepens up to `horizon` rounds. If the memo cap is hit the
/// last completed horizon is reported; a shallower search still bounds
/// the game value from above since the killer may simply stop early.
pub fn minimax_capped(state: &GameState, horizon: usize, cap: usize) -> Result<GameValue> {
    let mut search = Search::new(&state.rules, cap)?;
    let root = cuts::from_graph(&state.graph);
    let n = state.rules.n;
    let vacant = state.graph.vacant_slot();
    let eval = |s: &mut Search, h: usize| -> Result<u8> {
        match vacant {
            None => s.killer(&root, h),
            Some(i) => s.builder(&cuts::restrict(&root, n, i), h),
        }
    };

    let mut done = 0;
    let mut value = eval(&mut search, 0)?;
    let mut capped = false;
    for h in 1..=horizon {
        match eval(&mut search, h) {
            Ok(v) => {
                value = v;
                done = h;
            }
            Err(Error::CapExceeded { .. }) => {
                capped = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let value = (value as u64).min(state.history_min_cut);
    search.enforce_cap = false;
    let (principal_line, line_value) = principal_line(&mut search, state, done)?;
    Ok(GameValue {
        value,
        horizon: done,
        requested_horizon: horizon,
        capped,
        principal_line,
        line_value,
        memo_entries: search.entries(),
    })
}

/// Follows optimal moves for both sides until the running minimum can no
/// longer drop, then replays the line on the explicit graph.
fn principal_line(
    search: &mut Search,
    start: &GameState,
    horizon: usize,
) -> Result<(Vec<Move>, u64)> {
    let n = start.rules.n;
    let full = (1usize << n) - 1;
    let mut state = start.clone();
    let mut line = Vec::new();
    let mut f = cuts::from_graph(&state.graph);
    let mut rounds_left = horizon;

    if let Some(slot) = state.graph.vacant_slot().filter(|_| horizon > 0) {
        let g = cuts::restrict(&f, n, slot);
        let target = search.builder(&g, horizon)?;
        f = best_rebuild(search, &mut state, &f, slot, target, horizon, &mut line)?;
        rounds_left -= 1;
    }
    while rounds_left > 0 {
        let v = search.killer(&f, rounds_left)?;
        if v >= f[full] {
            break;
        }
        let slot = (0..n)
            .sorted_by_key(|&i| f[full & !(1 << i)])
            .find_map(|i| {
                let w = search.builder(&cuts::restrict(&f, n, i), rounds_left);
                match w {
                    Ok(w) if w == v => Some(Ok(i)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                }
            })
            .expect("some kill attains the value")?;
        let id = state.graph.slots()[slot].expect("killer state has no vacancy");
        state.kill(id)?;
        line.push(Move::Kill { id });
        f = best_rebuild(search, &mut state, &f, slot, v, rounds_left, &mut line)?;
        rounds_left -= 1;
    }
    Ok((line, state.history_min_cut))
}

fn best_rebuild(
    search: &mut Search,
    state: &mut GameState,
    f: &[u8],
    slot: usize,
    target: u8,
    h: usize,
    line: &mut Vec<Move>,
) -> Result<CutTable> {
    let n = state.rules.n;
    let others: Vec<usize> = (0..n).filter(|&s| s != slot).collect();
    for hs in others.iter().copied().combinations(state.rules.r) {
        let mask = hs.iter().fold(0usize, |m, s| m | 1 << s);
        let child = cuts::rebuild(f, n, slot, mask, search.alpha, search.beta);
        // the rebuild closes the round, so the child has h − 1 left
        if search.killer(&child, h - 1)? >= target {
            let helpers: Vec<usize> = hs
                .iter()
                .map(|&s| state.graph.slots()[s].expect("helper is live"))
                .collect();
            let id = state.rebuild(&helpers)?;
            line.push(Move::Rebuild { id, helpers });
            return Ok(child);
        }
    }
    unreachable!("some rebuild attains the builder's value")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(n: usize, r: usize, alpha: u64, beta: u64) -> GameState {
        GameState::new(GameRules::new(n, r, alpha, beta).unwrap()).unwrap()
    }

    #[test]
    fn one_round_is_one_ply_each() {
        let s = state(3, 2, 1, 1);
        let v = minimax(&s, 1).unwrap();
        // the best kill costs one α, and no rebuild can restore it
        assert_eq!(v.value, 2);
        assert_eq!(v.line_value, 2);
    }

    #[test]
    fn small_locality_two_game() {
        let s = state(3, 2, 1, 1);
        for h in 1..=6 {
            let v = minimax(&s, h).unwrap();
            assert_eq!(v.value, 2);
        }
    }

    #[test]
    fn deepening_is_monotone() {
        for (n, r, a, b) in [(4, 2, 1, 1), (4, 2, 2, 1), (3, 2, 2, 1), (4, 3, 3, 1)] {
            let s = state(n, r, a, b);
            let mut prev = u64::MAX;
            for h in 0..=2 * n {
                let v = minimax(&s, h).unwrap();
                assert!(v.value <= prev, "n={n} r={r} h={h}");
                assert_eq!(v.value, v.line_value);
                prev = v.value;
            }
        }
    }

    #[test]
    fn history_min_is_non_increasing() {
        let mut s = state(4, 2, 2, 1);
        let mut prev = s.history_min_cut;
        for round in 0..6 {
            let live = s.graph.live();
            s.kill(live[round % 4]).unwrap();
            assert!(s.history_min_cut <= prev);
            prev = s.history_min_cut;
            let live = s.graph.live();
            s.rebuild(&live[1..3]).unwrap();
            assert!(s.history_min_cut <= prev);
            prev = s.history_min_cut;
        }
    }

    #[test]
    fn builder_to_move_state() {
        let mut s = state(3, 2, 2, 1);
        s.kill(0).unwrap();
        let v = minimax(&s, 3).unwrap();
        assert!(matches!(
            v.principal_line.first(),
            Some(Move::Rebuild { .. })
        ));
        assert_eq!(v.value, v.line_value);
        assert_eq!(v.value, 3);
    }

    #[test]
    fn cap_reports_partial_horizon() {
        let s = state(5, 2, 1, 1);
        let v = minimax_capped(&s, 10, 50).unwrap();
        assert!(v.capped);
        assert!(v.horizon < 10);
        let full = minimax(&s, v.horizon).unwrap();
        assert_eq!(full.value, v.value);
    }

    #[test]
    fn move_rules_enforced() {
        let mut s = state(3, 2, 1, 1);
        assert!(s.rebuild(&[1, 2]).is_err());
        s.kill(0).unwrap();
        assert!(s.kill(1).is_err());
        assert!(s.rebuild(&[1]).is_err());
        assert!(GameRules::new(3, 3, 1, 1).is_err());
    }
}
