//! Lower-tail machinery for triangle counts in the uniform random graph `G(n,m)`.
//!
//! The crate is `no_std` (it needs `alloc`) and carries only the algorithmic
//! pieces: bitset graphs and their samplers, synergy statistics and the
//! `F-`/`F+` split of the non-edges, Kolmogorov distance to the normal law,
//! the quasirandomness event `E0` and the conditioned second phase `E(alpha)`,
//! and the exact triangle-class accounting. File formats, configuration and
//! the experiment harness live in the `trilow` crate.
#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod accounting;
pub mod conditioning;
pub mod distribution;
mod error;
pub mod graph;
pub mod math;
pub mod params;
pub mod sample;
pub mod synergy;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, TriangleClassCounts, VertexSet};
pub use params::ProcessParams;
pub use synergy::FSplit;
