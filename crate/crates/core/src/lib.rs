//! ctxembed: node embeddings through a single lens.
//!
//! Every supported method — truncated random walks, biased second-order
//! walks, restart walks, raw adjacency, and closed-form proximity matrices —
//! is one recipe for turning a graph into weighted (source, context)
//! evidence. That evidence is then fitted either by stochastic updates with
//! negative sampling / hierarchical softmax, or by truncated matrix
//! factorization. Evaluation (link prediction with directional reversal
//! stress, multi-label node classification) and structural profiling live
//! alongside so the whole benchmark loop is reproducible from one binary.

pub mod alias;
/// Streams and closed forms of (source, context) evidence.
pub mod context;
pub mod error;
/// Link prediction and node classification protocols.
pub mod eval;
pub mod graph;
/// Truncated factorization of context matrices and operators.
pub mod mf;
/// Method catalogue: each method resolved to a sampler + optimizer recipe.
pub mod methods;
pub mod profile;
pub mod report;
pub mod rng;
/// Stochastic embedding training (negative sampling, hierarchical softmax).
pub mod sgns;
pub mod synth;

pub mod cli;

pub use error::{Error, Result};
pub use graph::Graph;
