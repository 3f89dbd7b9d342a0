//! Generic rigidity of graphs, decided by randomized rank computations over a
//! fixed Mersenne prime field.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, experiment
//! harnesses and the command line live in the `rigor` companion crate.
//!
//! Module map:
//!
//! * [`ffield`]: arithmetic modulo `2^61 - 1` and an incremental row-echelon basis.
//! * [`rng`]: counter-based splitmix streams with labelled substreams.
//! * [`graph`]: bitset graphs, the `G(n,p)` sampler and small combinatorial helpers.
//! * [`rigidity`]: rigidity-matrix rows, rank, closures and the maximum rigid dimension.
//! * [`constructions`]: Henneberg steps, the matching gadget and the clique bootstrap.
//! * [`thresholds`]: `phi_c`, `a(c)`, `C_*`, Chernoff bounds and regime predictions.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod constructions;
mod error;
pub mod ffield;
pub mod graph;
pub mod rigidity;
pub mod rng;
pub mod thresholds;

#[cfg(test)]
mod testing;

pub use crate::error::{Error, Result};
pub use crate::ffield::{Fp, Insertion, RowBasis, RowVector, MODULUS};
pub use crate::graph::{Graph, Rational, VertexSet};
pub use crate::rigidity::{ClosureReport, Embedding, Verdict};
pub use crate::rng::RngStream;
