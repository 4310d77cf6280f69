//! Data-plane simulation: encode a message onto nodes, fail and repair
//! nodes, and decode from recovery sets, recording every event.
//!
//! The true message is carried out-of-band purely to assert that repairs
//! and decodes are correct. Nodes only ever compute from their own stored
//! symbols and the repair symbols they receive.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::{RepairPlan, StorageCode};
use crate::constructions::FunctionalSpec;
use crate::error::Error;
use crate::linalg::{enumerate_subspaces, solve, subspace_sum, BitMatrix, BitVector, Subspace};
use crate::record::Record;

pub type Message = BitVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Code(#[from] Error),
    #[error("node {0} is not live")]
    NotLive(usize),
    #[error("node {0} has already failed")]
    AlreadyFailed(usize),
    #[error("epoch {epoch}: node {failing} fails while node {down} is still down")]
    MultipleFailures {
        epoch: usize,
        down: usize,
        failing: usize,
    },
    #[error("epoch {epoch}: repair requested but no node is down")]
    NothingToRepair { epoch: usize },
    #[error("no repair plan for node {0}")]
    NoRepairPlan(usize),
    #[error("operation needs {0} mode")]
    WrongMode(&'static str),
    #[error("epoch {epoch}: no functional repair of node {node} satisfies the functional spec")]
    Stuck { epoch: usize, node: usize },
    #[error("epoch {epoch}: assertion failed: {what}")]
    Assertion { epoch: usize, what: String },
}

pub type SimResult<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Encode,
    Fail,
    RepairExact,
    RepairFunctional,
    Collect,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Encode => "encode",
            Self::Fail => "fail",
            Self::RepairExact => "repair-exact",
            Self::RepairFunctional => "repair-functional",
            Self::Collect => "collect",
        }
    }
}

/// One line of the event trace. Carries no message or symbol values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub epoch: usize,
    pub kind: EventKind,
    pub node: Option<usize>,
    /// Helpers of a repair, or the node set of a collect.
    pub helpers: Vec<usize>,
    /// Symbols sent by each helper, parallel to `helpers`.
    pub symbols_transferred: Vec<usize>,
    /// Basis strings of the repair space used by each helper.
    pub spaces: Vec<Vec<String>>,
    /// Basis strings of the newcomer's storage space (state dissemination).
    pub new_basis: Vec<String>,
    pub decoded: Option<bool>,
}

impl TraceEvent {
    fn new(epoch: usize, kind: EventKind, node: Option<usize>) -> Self {
        Self {
            epoch,
            kind,
            node,
            helpers: Vec::new(),
            symbols_transferred: Vec::new(),
            spaces: Vec::new(),
            new_basis: Vec::new(),
            decoded: None,
        }
    }

    pub fn total_symbols(&self) -> usize {
        self.symbols_transferred.iter().sum()
    }

    pub fn to_record(&self) -> Record {
        Record::new()
            .with("epoch", self.epoch)
            .with("kind", self.kind.name())
            .with("node", self.node)
            .with("helpers", self.helpers.clone())
            .with("symbols_transferred", self.symbols_transferred.clone())
            .with("spaces", self.spaces.clone())
            .with("new_basis", self.new_basis.clone())
            .with("decoded", self.decoded)
    }
}

/// What one helper sent during a repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub helper: usize,
    /// The message-space vectors whose inner products with `x` were sent.
    pub vectors: Vec<BitVector>,
    pub symbols: BitVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub node: usize,
    pub transfers: Vec<Transfer>,
    pub stored: BitVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Mode {
    Exact {
        code: StorageCode,
        plans: Option<Vec<RepairPlan>>,
    },
    Functional {
        spec: FunctionalSpec,
        bases: Vec<BitMatrix>,
    },
}

/// Per-node stored blocks for one concrete message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemState {
    mode: Mode,
    stored: Vec<Option<BitVector>>,
    epoch: usize,
    message: Message,
    trace: Vec<TraceEvent>,
}

fn check_message(m: usize, x: &Message) -> SimResult<()> {
    if x.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: x.dim(),
        }
        .into());
    }
    Ok(())
}

/// Exact-mode state with node `i` holding `B_i·x`.
pub fn encode(code: &StorageCode, x: &Message) -> SimResult<SystemState> {
    check_message(code.message_dim(), x)?;
    let bases = code.bases().to_vec();
    SystemState::build(
        Mode::Exact {
            code: code.clone(),
            plans: None,
        },
        &bases,
        x,
    )
}

/// Functional-mode state from an initial arrangement that satisfies `spec`.
pub fn encode_functional(
    spec: &FunctionalSpec,
    bases: Vec<BitMatrix>,
    x: &Message,
) -> SimResult<SystemState> {
    check_message(spec.ambient_dim, x)?;
    let spaces: Vec<Subspace> = bases.iter().map(Subspace::row_space).collect();
    let violations = spec.check(&spaces);
    if !violations.is_empty() || bases.iter().any(|b| b.row_count() != spec.node_dim) {
        return Err(Error::InvalidCode(violations).into());
    }
    SystemState::build(
        Mode::Functional {
            spec: spec.clone(),
            bases: bases.clone(),
        },
        &bases,
        x,
    )
}

/// Inner products of `x` with `vectors`, computed by a node that only
/// knows its basis and stored block: express each vector in the basis and
/// combine the stored symbols accordingly.
fn derive_symbols(
    basis: &BitMatrix,
    stored: &BitVector,
    vectors: &[BitVector],
) -> SimResult<BitVector> {
    let transposed = basis.transpose()?;
    let mut out = BitVector::zero(vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        let coeffs = solve(&transposed, v)?.ok_or_else(|| {
            SimError::Code(Error::InvalidPlan(vec![format!(
                "vector {v} is outside the node's span"
            )]))
        })?;
        out.set(j, coeffs.dot(stored)?);
    }
    Ok(out)
}

impl SystemState {
    fn build(mode: Mode, bases: &[BitMatrix], x: &Message) -> SimResult<Self> {
        let stored = bases
            .iter()
            .map(|b| b.mul_vec(x).map(Some))
            .collect::<Result<Vec<_>, _>>()?;
        let mut state = Self {
            mode,
            stored,
            epoch: 0,
            message: *x,
            trace: Vec::new(),
        };
        state
            .trace
            .push(TraceEvent::new(0, EventKind::Encode, None));
        Ok(state)
    }

    /// Attaches the plans used by scenario repairs in exact mode.
    pub fn with_repair_plans(mut self, plans: Vec<RepairPlan>) -> SimResult<Self> {
        match &mut self.mode {
            Mode::Exact { code, plans: slot } => {
                for p in &plans {
                    let problems = p.validate(code);
                    if !problems.is_empty() {
                        return Err(Error::InvalidPlan(problems).into());
                    }
                }
                *slot = Some(plans);
                Ok(self)
            }
            Mode::Functional { .. } => Err(SimError::WrongMode("exact")),
        }
    }

    pub fn n(&self) -> usize {
        self.stored.len()
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn is_functional(&self) -> bool {
        matches!(self.mode, Mode::Functional { .. })
    }

    pub fn message_dim(&self) -> usize {
        self.message.dim()
    }

    /// The out-of-band message, for verification only.
    pub fn message(&self) -> &Message {
        &self.message
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn stored(&self, i: usize) -> Option<&BitVector> {
        self.stored[i].as_ref()
    }

    pub fn is_live(&self, i: usize) -> bool {
        self.stored.get(i).is_some_and(Option::is_some)
    }

    pub fn live(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_live(i)).collect()
    }

    pub fn failed(&self) -> Option<usize> {
        (0..self.n()).find(|&i| !self.is_live(i))
    }

    pub fn basis(&self, i: usize) -> &BitMatrix {
        match &self.mode {
            Mode::Exact { code, .. } => code.basis(i),
            Mode::Functional { bases, .. } => &bases[i],
        }
    }

    pub fn spaces(&self) -> Vec<Subspace> {
        (0..self.n())
            .map(|i| Subspace::row_space(self.basis(i)))
            .collect()
    }

    pub fn spec(&self) -> Option<&FunctionalSpec> {
        match &self.mode {
            Mode::Functional { spec, .. } => Some(spec),
            Mode::Exact { .. } => None,
        }
    }

    fn check_index(&self, i: usize) -> SimResult<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n(),
            }
            .into());
        }
        Ok(())
    }

    fn expected_block(&self, i: usize) -> SimResult<BitVector> {
        Ok(self.basis(i).mul_vec(&self.message)?)
    }

    /// Marks node `i` failed and erases its block.
    pub fn fail(&mut self, i: usize) -> SimResult<()> {
        self.check_index(i)?;
        if !self.is_live(i) {
            return Err(SimError::AlreadyFailed(i));
        }
        self.stored[i] = None;
        self.trace
            .push(TraceEvent::new(self.epoch, EventKind::Fail, Some(i)));
        Ok(())
    }

    fn decode(&self, set: &[usize]) -> SimResult<Option<Message>> {
        for &i in set {
            self.check_index(i)?;
            if !self.is_live(i) {
                return Err(SimError::NotLive(i));
            }
        }
        let m = self.message_dim();
        let mut rows = Vec::new();
        let mut symbols = Vec::new();
        for &i in set {
            rows.extend_from_slice(self.basis(i).rows());
            let block = self.stored[i].unwrap();
            symbols.extend((0..block.dim()).map(|j| block.get(j)));
        }
        let stacked = BitMatrix::new(m, rows)?;
        if stacked.rank() < m {
            return Ok(None);
        }
        if symbols.len() > crate::linalg::MAX_DIM {
            // more equations than fit one word: keep a spanning subset
            let mut keep_rows = Vec::new();
            let mut keep_syms = Vec::new();
            let mut span = Subspace::zero(m);
            for (row, sym) in stacked.rows().iter().zip(&symbols) {
                if !span.contains(row)? {
                    span = span.sum(&Subspace::span(m, [*row])?)?;
                    keep_rows.push(*row);
                    keep_syms.push(*sym);
                }
            }
            let mat = BitMatrix::new(m, keep_rows)?;
            return Ok(solve(&mat, &BitVector::from_bools(&keep_syms))?);
        }
        Ok(solve(&stacked, &BitVector::from_bools(&symbols))?)
    }

    /// Decodes from the live nodes in `set`; `None` unless they form a
    /// recovery set. A wrong decode is reported as an assertion failure.
    pub fn collect(&mut self, set: &[usize]) -> SimResult<Option<Message>> {
        let decoded = self.decode(set)?;
        let mut ev = TraceEvent::new(self.epoch, EventKind::Collect, None);
        ev.helpers = set.to_vec();
        ev.decoded = Some(decoded.is_some());
        self.trace.push(ev);
        if let Some(x) = decoded {
            if x != self.message {
                return Err(SimError::Assertion {
                    epoch: self.epoch,
                    what: format!("collect from {set:?} decoded {x}, stored message differs"),
                });
            }
        }
        Ok(decoded)
    }

    fn prepare_repair(&mut self, node: usize) -> SimResult<()> {
        self.check_index(node)?;
        if self.is_live(node) {
            self.fail(node)?;
        }
        if let Some(other) = (0..self.n()).find(|&i| i != node && !self.is_live(i)) {
            return Err(SimError::MultipleFailures {
                epoch: self.epoch,
                down: other,
                failing: node,
            });
        }
        Ok(())
    }

    /// Repairs `plan.failed` bit-for-bit from the plan's helpers.
    pub fn exact_repair(&mut self, plan: &RepairPlan) -> SimResult<RepairOutcome> {
        let Mode::Exact { code, .. } = &self.mode else {
            return Err(SimError::WrongMode("exact"));
        };
        let problems = plan.validate(code);
        if !problems.is_empty() {
            return Err(Error::InvalidPlan(problems).into());
        }
        for &h in &plan.helpers {
            if !self.is_live(h) {
                return Err(SimError::NotLive(h));
            }
        }
        let node = plan.failed;
        self.prepare_repair(node)?;

        let mut transfers = Vec::with_capacity(plan.helpers.len());
        for (&h, w) in plan.helpers.iter().zip(&plan.repair_spaces) {
            let vectors = w.basis().rows().to_vec();
            let symbols =
                derive_symbols(self.basis(h), self.stored[h].as_ref().unwrap(), &vectors)?;
            transfers.push(Transfer {
                helper: h,
                vectors,
                symbols,
            });
        }

        let block = self.rebuild_block(node, self.basis(node).clone(), &transfers)?;
        let expected = self.expected_block(node)?;
        if block != expected {
            return Err(SimError::Assertion {
                epoch: self.epoch,
                what: format!("exact repair of node {node} produced {block}, expected {expected}"),
            });
        }
        self.stored[node] = Some(block);
        self.epoch += 1;

        let mut ev = TraceEvent::new(self.epoch, EventKind::RepairExact, Some(node));
        ev.helpers = plan.helpers.clone();
        ev.symbols_transferred = transfers.iter().map(|t| t.vectors.len()).collect();
        ev.spaces = plan
            .repair_spaces
            .iter()
            .map(|w| w.basis().to_strings())
            .collect();
        self.trace.push(ev);
        Ok(RepairOutcome {
            node,
            transfers,
            stored: block,
        })
    }

    /// The newcomer's side: express each target basis vector through the
    /// received vectors and combine the received symbols.
    fn rebuild_block(
        &self,
        node: usize,
        target: BitMatrix,
        transfers: &[Transfer],
    ) -> SimResult<BitVector> {
        let m = self.message_dim();
        let received: Vec<BitVector> = transfers.iter().flat_map(|t| t.vectors.clone()).collect();
        let symbols: Vec<bool> = transfers
            .iter()
            .flat_map(|t| {
                (0..t.symbols.dim())
                    .map(|j| t.symbols.get(j))
                    .collect::<Vec<_>>()
            })
            .collect();
        let received = BitMatrix::new(m, received)?;
        let symbols = BitVector::from_bools(&symbols);
        let transposed = received.transpose()?;
        let mut block = BitVector::zero(target.row_count());
        for (j, b) in target.rows().iter().enumerate() {
            let coeffs = solve(&transposed, b)?.ok_or_else(|| SimError::Assertion {
                epoch: self.epoch,
                what: format!("received data cannot rebuild basis vector {b} of node {node}"),
            })?;
            block.set(j, coeffs.dot(&symbols)?);
        }
        Ok(block)
    }

    /// Replaces the failed node's space by a fresh one drawn from one
    /// vector `a_i` per survivor, choosing the first `(a_i)` tuple in
    /// lexicographic order and then the first candidate subspace in
    /// canonical order that restores the functional spec.
    pub fn functional_repair(&mut self, node: usize) -> SimResult<RepairOutcome> {
        let Mode::Functional { spec, .. } = &self.mode else {
            return Err(SimError::WrongMode("functional"));
        };
        let spec = spec.clone();
        if spec.beta != 1 {
            return Err(Error::InvalidParams(
                "functional repair downloads one symbol per survivor".into(),
            )
            .into());
        }
        self.prepare_repair(node)?;
        let m = self.message_dim();
        let survivors = self.live();
        let mut spaces = self.spaces();

        let choices: Vec<Vec<BitVector>> = survivors
            .iter()
            .map(|&i| spaces[i].nonzero_elements())
            .collect();
        let mut picked = None;
        'search: for tuple in choices
            .iter()
            .map(|c| c.iter().copied())
            .multi_cartesian_product()
        {
            let span = Subspace::span(m, tuple.iter().copied())?;
            if span.dim() < spec.node_dim {
                continue;
            }
            let mut candidates = enumerate_subspaces(span.dim(), spec.node_dim)?
                .map(|c| Subspace::image_of(&c, span.basis()))
                .collect::<Result<Vec<_>, _>>()?;
            candidates.sort_by(|a, b| a.basis().rows().cmp(b.basis().rows()));
            for cand in candidates {
                spaces[node] = cand.clone();
                if spec.is_satisfied(&spaces) {
                    picked = Some((tuple, cand));
                    break 'search;
                }
            }
        }
        let Some((tuple, new_space)) = picked else {
            return Err(SimError::Stuck {
                epoch: self.epoch,
                node,
            });
        };

        let mut transfers = Vec::with_capacity(survivors.len());
        for (&h, a) in survivors.iter().zip(&tuple) {
            let symbols = derive_symbols(self.basis(h), self.stored[h].as_ref().unwrap(), &[*a])?;
            transfers.push(Transfer {
                helper: h,
                vectors: vec![*a],
                symbols,
            });
        }
        let new_basis = new_space.basis().clone();
        let block = self.rebuild_block(node, new_basis.clone(), &transfers)?;
        if let Mode::Functional { bases, .. } = &mut self.mode {
            bases[node] = new_basis.clone();
        }
        let expected = self.expected_block(node)?;
        if block != expected {
            return Err(SimError::Assertion {
                epoch: self.epoch,
                what: format!(
                    "functional repair of node {node} stored {block}, new basis gives {expected}"
                ),
            });
        }
        self.stored[node] = Some(block);
        self.epoch += 1;

        let mut ev = TraceEvent::new(self.epoch, EventKind::RepairFunctional, Some(node));
        ev.helpers = survivors;
        ev.symbols_transferred = vec![1; tuple.len()];
        ev.spaces = tuple.iter().map(|a| vec![a.to_string()]).collect();
        ev.new_basis = new_basis.to_strings();
        self.trace.push(ev);
        Ok(RepairOutcome {
            node,
            transfers,
            stored: block,
        })
    }

    /// Smallest recovery sets among the live nodes.
    pub fn minimal_live_recovery_sets(&self) -> Vec<Vec<usize>> {
        let live = self.live();
        let spaces = self.spaces();
        for size in 1..=live.len() {
            let sets: Vec<Vec<usize>> = live
                .iter()
                .copied()
                .combinations(size)
                .filter(|set| {
                    subspace_sum(set.iter().map(|&i| &spaces[i]))
                        .unwrap()
                        .is_full()
                })
                .collect();
            if !sets.is_empty() {
                return sets;
            }
        }
        Vec::new()
    }

    fn repair_next(&mut self) -> SimResult<RepairOutcome> {
        let node = self
            .failed()
            .ok_or(SimError::NothingToRepair { epoch: self.epoch })?;
        match &self.mode {
            Mode::Exact { plans, .. } => {
                let plan = plans
                    .as_ref()
                    .and_then(|p| p.iter().find(|p| p.failed == node))
                    .cloned()
                    .ok_or(SimError::NoRepairPlan(node))?;
                self.exact_repair(&plan)
            }
            Mode::Functional { .. } => self.functional_repair(node),
        }
    }
}

/// One scripted action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Fail(usize),
    /// Repair whichever node is down.
    Repair,
    Collect(Vec<usize>),
    /// Collect from a seeded random minimal recovery set of live nodes.
    CollectRandom,
}

/// Runs `script` against `state`, enforcing one failure at a time.
/// Every collect on a recovery set must decode the true message.
pub fn run_scenario(
    state: &mut SystemState,
    script: &[Step],
    seed: u64,
) -> SimResult<Vec<TraceEvent>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for step in script {
        match step {
            Step::Fail(i) => {
                if let Some(down) = state.failed() {
                    return Err(SimError::MultipleFailures {
                        epoch: state.epoch,
                        down,
                        failing: *i,
                    });
                }
                state.fail(*i)?;
            }
            Step::Repair => {
                state.repair_next()?;
                if let Some(spec) = state.spec() {
                    let problems = spec.check(&state.spaces());
                    if !problems.is_empty() {
                        return Err(SimError::Assertion {
                            epoch: state.epoch,
                            what: problems.join("; "),
                        });
                    }
                }
            }
            Step::Collect(set) => collect_checked(state, set)?,
            Step::CollectRandom => {
                let sets = state.minimal_live_recovery_sets();
                if let Some(set) = sets.choose(&mut rng) {
                    collect_checked(state, set)?;
                }
            }
        }
    }
    Ok(state.trace.clone())
}

fn collect_checked(state: &mut SystemState, set: &[usize]) -> SimResult<()> {
    let spaces = state.spaces();
    let is_recovery = subspace_sum(set.iter().map(|&i| &spaces[i]))
        .map(|s| s.is_full())
        .unwrap_or(false);
    if state.collect(set)?.is_none() && is_recovery {
        return Err(SimError::Assertion {
            epoch: state.epoch,
            what: format!("recovery set {set:?} failed to decode"),
        });
    }
    Ok(())
}

/// `rounds` rounds of: fail a uniformly random node, repair it, collect
/// from a random minimal recovery set.
pub fn random_script(n: usize, rounds: usize, seed: u64) -> Vec<Step> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .flat_map(|_| {
            [
                Step::Fail(rng.gen_range(0..n)),
                Step::Repair,
                Step::CollectRandom,
            ]
        })
        .collect()
}

/// A message drawn from `seed`, independent of any script randomness.
pub fn random_message(m: usize, seed: u64) -> Message {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x006d_6573_7361_6765);
    BitVector::from_word(m, rng.gen())
}

/// Tallies over a trace.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScenarioSummary {
    pub repairs: usize,
    pub symbols_transferred: usize,
    pub decode_checks: usize,
    pub decode_passes: usize,
}

impl ScenarioSummary {
    pub fn of(trace: &[TraceEvent]) -> Self {
        let mut s = Self::default();
        for ev in trace {
            match ev.kind {
                EventKind::RepairExact | EventKind::RepairFunctional => {
                    s.repairs += 1;
                    s.symbols_transferred += ev.total_symbols();
                }
                EventKind::Collect => {
                    s.decode_checks += 1;
                    s.decode_passes += usize::from(ev.decoded == Some(true));
                }
                _ => {}
            }
        }
        s
    }

    pub fn to_record(&self) -> Record {
        Record::new()
            .with("repairs", self.repairs)
            .with("symbols_transferred", self.symbols_transferred)
            .with("decode_checks", self.decode_checks)
            .with("decode_passes", self.decode_passes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example1, example3_initial, example3_spec, rbt_mbr};

    fn x(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn encode_stores_inner_products() {
        let e = example1();
        // x = (x0, x1, x2, x3) = (1, 0, 1, 0): node 0 holds (x0, x2 + x3)
        let st = encode(&e.code, &x("1010")).unwrap();
        assert_eq!(st.stored(0), Some(&x("11")));
        let zero = encode(&e.code, &BitVector::zero(4)).unwrap();
        assert!((0..4).all(|i| zero.stored(i).unwrap().is_zero()));
        assert!(encode(&e.code, &x("101")).is_err());
        assert_eq!(zero.trace().len(), 1);
    }

    #[test]
    fn exact_repair_restores_every_block_exhaustively() {
        let e = example1();
        let plans = e.repair_plans.clone().unwrap();
        for w in 0..16u64 {
            let msg = BitVector::from_word(4, w);
            for plan in &plans {
                let mut st = encode(&e.code, &msg).unwrap();
                let before = *st.stored(plan.failed).unwrap();
                st.fail(plan.failed).unwrap();
                let out = st.exact_repair(plan).unwrap();
                assert_eq!(out.stored, before);
                assert_eq!(
                    out.transfers.iter().map(|t| t.symbols.dim()).sum::<usize>(),
                    3
                );
                let ev = st.trace().last().unwrap();
                assert_eq!(ev.symbols_transferred, [1, 1, 1]);
            }
        }
    }

    #[test]
    fn repair_by_transfer_forwards_stored_symbols() {
        let c = rbt_mbr(5).unwrap();
        let plans = c.repair_plans.clone().unwrap();
        let msg = BitVector::from_word(10, 0b10_1100_1011);
        let mut st = encode(&c.code, &msg).unwrap();
        let out = st.exact_repair(&plans[2]).unwrap();
        for t in &out.transfers {
            // the helper's vector is one of its stored coordinates, sent unchanged
            let pos = c
                .code
                .basis(t.helper)
                .rows()
                .iter()
                .position(|r| *r == t.vectors[0])
                .unwrap();
            assert_eq!(t.symbols.get(0), st.stored(t.helper).unwrap().get(pos));
        }
    }

    #[test]
    fn repair_with_zero_message() {
        let e = example1();
        let mut st = encode(&e.code, &BitVector::zero(4)).unwrap();
        let out = st.exact_repair(&e.repair_plans.unwrap()[1]).unwrap();
        assert!(out.transfers.iter().all(|t| t.symbols.is_zero()));
        assert!(out.stored.is_zero());
    }

    #[test]
    fn collect_needs_a_recovery_set() {
        let e = example1();
        let msg = x("0111");
        let mut st = encode(&e.code, &msg).unwrap();
        assert_eq!(st.collect(&[2, 3]).unwrap(), Some(msg));
        assert_eq!(st.collect(&[1]).unwrap(), None);
        st.fail(0).unwrap();
        assert_eq!(st.collect(&[0, 1]), Err(SimError::NotLive(0)));
    }

    #[test]
    fn repair_errors() {
        let e = example1();
        let plans = e.repair_plans.clone().unwrap();
        let mut st = encode(&e.code, &x("1111")).unwrap();
        st.fail(1).unwrap();
        assert_eq!(st.exact_repair(&plans[0]), Err(SimError::NotLive(1)));
        assert!(matches!(
            st.exact_repair(&plans[2]),
            Err(SimError::NotLive(1))
        ));
        assert!(matches!(
            st.functional_repair(1),
            Err(SimError::WrongMode(_))
        ));
        assert_eq!(st.fail(1), Err(SimError::AlreadyFailed(1)));
    }

    #[test]
    fn functional_repair_keeps_the_spec() {
        let spec = example3_spec();
        let msg = x("10110");
        let mut st = encode_functional(&spec, example3_initial(), &msg).unwrap();
        let out = st.functional_repair(3).unwrap();
        assert_eq!(out.transfers.len(), 3);
        assert!(spec.is_satisfied(&st.spaces()));
        // the new space is {0, a1+a2, a1+a3, a2+a3}
        let a: Vec<BitVector> = out.transfers.iter().map(|t| t.vectors[0]).collect();
        let mut expected = vec![BitVector::zero(5), a[0] ^ a[1], a[0] ^ a[2], a[1] ^ a[2]];
        expected.sort();
        assert_eq!(Subspace::row_space(st.basis(3)).elements(), expected);
        for set in (0..4).combinations(3) {
            assert_eq!(st.collect(&set).unwrap(), Some(msg));
        }
    }

    #[test]
    fn scenario_discipline() {
        let e = example1();
        let mut st = encode(&e.code, &x("0110"))
            .unwrap()
            .with_repair_plans(e.repair_plans.clone().unwrap())
            .unwrap();
        let err = run_scenario(&mut st, &[Step::Fail(0), Step::Fail(1)], 1).unwrap_err();
        assert!(matches!(
            err,
            SimError::MultipleFailures {
                down: 0,
                failing: 1,
                ..
            }
        ));

        let mut st = encode(&e.code, &x("0110")).unwrap();
        assert_eq!(run_scenario(&mut st, &[], 1).unwrap().len(), 1);
        assert!(matches!(
            run_scenario(&mut st, &[Step::Repair], 1),
            Err(SimError::NothingToRepair { .. })
        ));
        assert_eq!(
            run_scenario(&mut st, &[Step::Fail(2), Step::Repair], 1),
            Err(SimError::NoRepairPlan(2))
        );
    }

    #[test]
    fn scenario_end_to_end() {
        let e = example1();
        let msg = x("1101");
        let mut st = encode(&e.code, &msg)
            .unwrap()
            .with_repair_plans(e.repair_plans.clone().unwrap())
            .unwrap();
        let script: Vec<Step> = (0..4)
            .flat_map(|i| [Step::Fail(i), Step::Repair])
            .chain([Step::Collect(vec![0, 1])])
            .collect();
        let trace = run_scenario(&mut st, &script, 5).unwrap();
        assert_eq!(trace.last().unwrap().decoded, Some(true));
        let summary = ScenarioSummary::of(&trace);
        assert_eq!(summary.repairs, 4);
        assert_eq!(summary.symbols_transferred, 12);
        for i in 0..4 {
            assert_eq!(
                *st.stored(i).unwrap(),
                e.code.basis(i).mul_vec(&msg).unwrap()
            );
        }
    }

    #[test]
    fn trace_records_have_fixed_field_order() {
        let e = example1();
        let mut st = encode(&e.code, &x("1000")).unwrap();
        st.exact_repair(&e.repair_plans.unwrap()[0]).unwrap();
        let line = st.trace().last().unwrap().to_record().to_json_line();
        assert_eq!(
            line,
            r#"{"epoch":1,"kind":"repair-exact","node":0,"helpers":[1,2,3],"symbols_transferred":[1,1,1],"spaces":[["1001"],["0010"],["0001"]],"new_basis":[],"decoded":null}"#
        );
        assert!(!line.contains("1000\""), "trace leaks the message");
    }
}
