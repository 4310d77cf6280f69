//! Information-flow graphs.

use std::fmt;

use crate::error::{Error, Result};

use super::maxflow::Network;

/// One incarnation of a storage node: a `v_in → v_out` edge of capacity
/// `α`, fed either by the source or by `β`-edges from helpers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Incarnation {
    pub id: usize,
    /// Slot (storage position) the incarnation occupies.
    pub slot: usize,
    /// Number of kill/rebuild rounds before it was created.
    pub generation: usize,
    /// Helpers and the capacity of each helper edge; empty for initial nodes.
    pub helpers: Vec<usize>,
    pub beta: u64,
}

impl Incarnation {
    pub fn is_initial(&self) -> bool {
        self.generation == 0
    }
}

/// A vertex of the flow graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Source,
    In(usize),
    Out(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Source => write!(f, "S"),
            Vertex::In(v) => write!(f, "{v}.in"),
            Vertex::Out(v) => write!(f, "{v}.out"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
    pub cap: u64,
}

/// Capacitated DAG of all incarnations ever created, with the live ones
/// indexed by slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    n: usize,
    alpha: u64,
    nodes: Vec<Incarnation>,
    slots: Vec<Option<usize>>,
    rounds: usize,
}

impl FlowGraph {
    /// `n` isolated incarnations, each fed by the source.
    pub fn initial(n: usize, alpha: u64) -> Result<Self> {
        if n < 2 || alpha == 0 {
            return Err(Error::InvalidParams(format!(
                "flow graph needs n >= 2 and alpha >= 1, got n={n} alpha={alpha}"
            )));
        }
        let nodes = (0..n)
            .map(|i| Incarnation {
                id: i,
                slot: i,
                generation: 0,
                helpers: Vec::new(),
                beta: 0,
            })
            .collect();
        Ok(Self {
            n,
            alpha,
            nodes,
            slots: (0..n).map(Some).collect(),
            rounds: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// Capacity standing in for the unbounded source edges.
    pub fn unbounded(&self) -> u64 {
        self.n as u64 * self.alpha + 1
    }

    pub fn incarnations(&self) -> &[Incarnation] {
        &self.nodes
    }

    pub fn incarnation(&self, id: usize) -> Option<&Incarnation> {
        self.nodes.get(id)
    }

    /// Live incarnation in each slot; `None` for a slot awaiting rebuild.
    pub fn slots(&self) -> &[Option<usize>] {
        &self.slots
    }

    /// Live incarnations in slot order.
    pub fn live(&self) -> Vec<usize> {
        self.slots.iter().flatten().copied().collect()
    }

    pub fn is_live(&self, id: usize) -> bool {
        self.nodes
            .get(id)
            .is_some_and(|v| self.slots[v.slot] == Some(id))
    }

    /// Slot emptied by the last kill, if not yet rebuilt.
    pub fn vacant_slot(&self) -> Option<usize> {
        self.slots.iter().position(Option::is_none)
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Removes `id` from the live set. Its vertices stay in the graph.
    pub fn kill(&mut self, id: usize) -> Result<()> {
        if !self.is_live(id) {
            return Err(Error::InvalidParams(format!(
                "incarnation {id} is not live"
            )));
        }
        if self.vacant_slot().is_some() {
            return Err(Error::InvalidParams(
                "a killed node is still awaiting rebuild".to_string(),
            ));
        }
        let slot = self.nodes[id].slot;
        self.slots[slot] = None;
        Ok(())
    }

    /// Creates a newcomer in the vacant slot with a `β`-edge from each
    /// helper. Returns the new incarnation's id.
    pub fn rebuild(&mut self, helpers: &[usize], beta: u64) -> Result<usize> {
        let slot = self
            .vacant_slot()
            .ok_or_else(|| Error::InvalidParams("no killed node to rebuild".to_string()))?;
        let mut hs = helpers.to_vec();
        hs.sort_unstable();
        hs.dedup();
        if hs.len() != helpers.len() || hs.is_empty() {
            return Err(Error::InvalidParams(format!("bad helper set {helpers:?}")));
        }
        if let Some(dead) = hs.iter().find(|&&h| !self.is_live(h)) {
            return Err(Error::InvalidParams(format!("helper {dead} is not live")));
        }
        if beta == 0 {
            return Err(Error::InvalidParams("beta must be positive".to_string()));
        }
        self.rounds += 1;
        let id = self.nodes.len();
        self.nodes.push(Incarnation {
            id,
            slot,
            generation: self.rounds,
            helpers: hs,
            beta,
        });
        self.slots[slot] = Some(id);
        Ok(id)
    }

    /// Every edge, in creation order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for v in &self.nodes {
            if v.is_initial() {
                out.push(Edge {
                    from: Vertex::Source,
                    to: Vertex::In(v.id),
                    cap: self.unbounded(),
                });
            }
            for &h in &v.helpers {
                out.push(Edge {
                    from: Vertex::Out(h),
                    to: Vertex::In(v.id),
                    cap: v.beta,
                });
            }
            out.push(Edge {
                from: Vertex::In(v.id),
                to: Vertex::Out(v.id),
                cap: self.alpha,
            });
        }
        out
    }

    /// Dense index of a vertex: source 0, then `in`/`out` per incarnation.
    pub fn vertex_index(v: Vertex) -> usize {
        match v {
            Vertex::Source => 0,
            Vertex::In(i) => 1 + 2 * i,
            Vertex::Out(i) => 2 + 2 * i,
        }
    }

    pub fn vertex_count(&self) -> usize {
        1 + 2 * self.nodes.len()
    }

    /// Max flow from the source to a collector attached to every live node.
    pub fn collector_value(&self) -> u64 {
        self.flow_to(&self.live())
    }

    /// Max flow to a collector attached to the given incarnations only.
    pub fn collector_value_on(&self, ids: &[usize]) -> Result<u64> {
        if let Some(&bad) = ids.iter().find(|&&i| i >= self.nodes.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                n: self.nodes.len(),
            });
        }
        Ok(self.flow_to(ids))
    }

    fn flow_to(&self, ids: &[usize]) -> u64 {
        let mut net = Network::new(self.vertex_count());
        for e in self.edges() {
            net.add_edge(Self::vertex_index(e.from), Self::vertex_index(e.to), e.cap);
        }
        let sink = net.add_vertex();
        for &i in ids {
            net.add_edge(Self::vertex_index(Vertex::Out(i)), sink, self.unbounded());
        }
        net.max_flow(0, sink)
    }
}
