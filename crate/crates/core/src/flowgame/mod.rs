//! Information-flow graphs and the adversarial kill/rebuild game.
//!
//! The explicit [`FlowGraph`] keeps every incarnation ever created and
//! answers collector queries by max flow. The game search works on the
//! cut function of the live frontier instead, which carries exactly the
//! information that future min-cuts depend on.

pub mod cuts;
pub mod game;
pub mod graph;
pub mod maxflow;
pub mod verify;

pub use game::{
    minimax, minimax_capped, GameRules, GameState, GameValue, Move, Player, DEFAULT_MEMO_CAP,
};
pub use graph::{Edge, FlowGraph, Incarnation, Vertex};
pub use verify::{
    scripted_cutset_check, scripted_cutset_value, verify_theorem, GameCase, TheoremReport,
};
