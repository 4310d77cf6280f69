//! Linear distributed-storage codes over GF(2).
//!
//! The crate models a storage code as a family of subspaces of the message
//! space, verifies recovery and repair properties, simulates encoding,
//! failures and repairs on concrete messages, evaluates the classical and
//! locality-aware storage bounds, and plays the adversarial kill/rebuild
//! game on information-flow graphs that certifies the locality–rate bounds.

pub mod bounds;
pub mod code;
pub mod constructions;
pub mod error;
pub mod flowgame;
pub mod linalg;
pub mod record;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{BitMatrix, BitVector, Subspace};
