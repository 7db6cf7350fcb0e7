//! Skip-gram training with negative sampling or hierarchical softmax.
//!
//! The trainer consumes any context-pair stream. `loss` holds the f64
//! reference objective the f32 update loop is pinned against; `embedding`
//! owns vector storage, pair scoring and the on-disk format.

pub mod embedding;
pub mod hsoftmax;
pub mod loss;
pub mod neg;
pub mod train;

pub use embedding::{
    context_path, init_phi, read_embeddings, score_pair, write_embeddings, EmbeddingSet, Matrix,
    ScoreMode,
};
pub use neg::NegativeSampler;
pub use train::{train, Objective, TrainConfig, TrainOutput};
