//! Tools for k-uniform hypergraph quasirandomness: generating seeded random
//! constructions, checking layout discrepancy, certifying adaptedness of a
//! pattern hypergraph, counting constrained embeddings, and building perfect
//! packings with the absorbing method backed by an exact small-instance solver.

pub(crate) mod bits;

pub mod adapted;
pub mod constructions;
pub mod counting;
pub mod discrepancy;
pub mod hypercore;
pub mod layouts;
pub mod packing;
pub mod ratio;

pub use hypercore::{KGraph, VertexSet};
pub use layouts::{Antichain, Layout};
