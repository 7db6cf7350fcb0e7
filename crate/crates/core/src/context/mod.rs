//! Streams and closed forms of (source, context) evidence.
//!
//! Every embedding method in this crate reduces to a recipe for producing
//! weighted (source, context) node pairs: windowed positions of random walks,
//! endpoints of restart-terminated walks, raw edges, or explicit proximity
//! matrices. This module houses those recipes — the sampled ones behind the
//! [`ContextSampler`] trait, the exact ones as [`ContextMatrix`] builders —
//! together with dense oracles that verify the samplers against their
//! expected distributions.

pub mod adjacency;
pub mod matrix;
pub mod oracle;
pub mod ppr;
pub mod stream;
pub mod walks;

pub use adjacency::AdjacencySampler;
pub use matrix::{estimate_spectral_radius, katz_matrix, netmf_matrix, ContextMatrix};
pub use ppr::{PprConfig, PprSampler};
pub use stream::{ContextPair, ContextSampler};
pub use walks::{DanglingPolicy, WalkConfig, WalkSampler};
