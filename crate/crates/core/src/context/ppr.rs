//! Restart-terminated walk pairs: the sampling view of personalized PageRank.
//!
//! Each draw starts at a uniformly chosen node and walks until a restart coin
//! with rate `alpha` fires (or a hard length cap), then emits (start, stop).
//! The stop node is distributed as the personalized PageRank of the start, so
//! frequencies of these pairs converge to the closed form in
//! [`crate::context::oracle::expected_ppr_pairs`].

use rand::Rng;

use crate::alias::AliasTable;
use crate::context::stream::{ContextPair, ContextSampler};
use crate::context::walks::DanglingPolicy;
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct PprConfig {
    /// Restart probability checked before every step.
    pub alpha: f64,
    /// Hard cap on steps; the geometric tail mass collects here.
    pub max_len: u32,
    /// Pairs drawn per stream.
    pub samples: u64,
    pub seed: u64,
}

pub struct PprSampler<'g> {
    graph: &'g Graph,
    cfg: PprConfig,
    /// Weighted-step tables, only for weighted graphs.
    tables: Option<Vec<Option<AliasTable>>>,
}

impl<'g> PprSampler<'g> {
    pub fn new(g: &'g Graph, cfg: PprConfig, policy: DanglingPolicy) -> Result<Self> {
        if !(0.0 < cfg.alpha && cfg.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "restart probability must lie in (0, 1), got {}",
                cfg.alpha
            )));
        }
        if cfg.max_len == 0 || cfg.samples == 0 {
            return Err(Error::InvalidConfig(
                "walk cap and sample count must be positive".into(),
            ));
        }
        if policy == DanglingPolicy::Error {
            if let Some(node) = g.first_dangling() {
                return Err(Error::DanglingNode {
                    node: g.ids().original(node).to_string(),
                });
            }
        }
        let tables = if g.is_weighted() {
            Some(
                (0..g.node_count() as u32)
                    .map(|u| {
                        let ws = g.out_weights(u);
                        if ws.is_empty() {
                            None
                        } else {
                            Some(AliasTable::new(ws))
                        }
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(PprSampler { graph: g, cfg, tables })
    }

    pub fn config(&self) -> &PprConfig {
        &self.cfg
    }
}

impl ContextSampler for PprSampler<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn pairs_per_stream(&self) -> u64 {
        self.cfg.samples
    }

    fn stream(&self, stream_id: u64) -> Box<dyn Iterator<Item = ContextPair> + Send + '_> {
        let mut rng = stream_rng(self.cfg.seed, &[stream_id]);
        let n = self.graph.node_count();
        let mut remaining = self.cfg.samples;
        Box::new(std::iter::from_fn(move || {
            if remaining == 0 {
                return None;
            }
            remaining -= 1;
            let start = rng.gen_range(0..n) as u32;
            let mut cur = start;
            let mut len = 0;
            loop {
                if rng.gen::<f64>() < self.cfg.alpha {
                    break;
                }
                if len == self.cfg.max_len {
                    break;
                }
                let nbrs = self.graph.out_neighbors(cur);
                if nbrs.is_empty() {
                    // Truncate policy: a sink ends the walk early.
                    break;
                }
                cur = match &self.tables {
                    None => nbrs[rng.gen_range(0..nbrs.len())],
                    Some(tables) => {
                        nbrs[tables[cur as usize].as_ref().expect("non-dangling").sample(&mut rng)]
                    }
                };
                len += 1;
            }
            Some(ContextPair::new(start, cur))
        }))
    }
}
