//! Direct edge sampling: pairs are arcs drawn proportional to weight.
//!
//! This is the one-hop special case of the context abstraction — the recipe
//! behind first- and second-order edge-sampling embeddings.

use crate::alias::AliasTable;
use crate::context::stream::{ContextPair, ContextSampler};
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::{Error, Result};

pub struct AdjacencySampler {
    src: Vec<u32>,
    dst: Vec<u32>,
    table: AliasTable,
    node_count: usize,
    samples: u64,
    seed: u64,
}

impl AdjacencySampler {
    /// Draws `samples` arcs per stream, each with probability proportional to
    /// its weight. Undirected edges are stored as both orientations, so both
    /// directions of an edge appear with equal frequency.
    pub fn new(g: &Graph, samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidConfig("sample count must be positive".into()));
        }
        let mut src = Vec::with_capacity(g.arc_count());
        let mut dst = Vec::with_capacity(g.arc_count());
        let mut weights = Vec::with_capacity(g.arc_count());
        for (u, v, w) in g.arcs() {
            src.push(u);
            dst.push(v);
            weights.push(w);
        }
        Ok(AdjacencySampler {
            src,
            dst,
            table: AliasTable::new(&weights),
            node_count: g.node_count(),
            samples,
            seed,
        })
    }
}

impl ContextSampler for AdjacencySampler {
    fn node_count(&self) -> usize {
        self.node_count
    }

    fn pairs_per_stream(&self) -> u64 {
        self.samples
    }

    fn stream(&self, stream_id: u64) -> Box<dyn Iterator<Item = ContextPair> + Send + '_> {
        let mut rng = stream_rng(self.seed, &[stream_id]);
        let mut remaining = self.samples;
        Box::new(std::iter::from_fn(move || {
            if remaining == 0 {
                return None;
            }
            remaining -= 1;
            let k = self.table.sample(&mut rng);
            Some(ContextPair::new(self.src[k], self.dst[k]))
        }))
    }
}
