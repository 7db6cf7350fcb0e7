//! Random-walk pair streams: plain stationary walks and second-order
//! (return/in-out biased) walks, with windowed pair extraction.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::alias::AliasTable;
use crate::context::stream::{ContextPair, ContextSampler};
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// What to do when a walk reaches a node with no outgoing arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DanglingPolicy {
    /// Refuse to build the sampler; the caller must repair the graph first.
    Error,
    /// Cut the walk short at the stuck node.
    Truncate,
}

/// Shared shape of a walk stream.
#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    /// How many walks start from every node per stream.
    pub walks_per_node: u32,
    /// Steps per walk, so a full walk visits `walk_len + 1` nodes.
    pub walk_len: u32,
    /// Co-occurrence radius: pairs span at most this many steps.
    pub window: u32,
    pub seed: u64,
}

enum StepRule {
    /// Next hop proportional to arc weight (uniform when unweighted).
    Stationary {
        /// Per-node weighted choice tables; `None` when the graph is
        /// unweighted, inner `None` for nodes with no outgoing arc.
        tables: Option<Vec<Option<AliasTable>>>,
    },
    /// Second-order hop: the bias on each candidate depends on where the walk
    /// came from (see [`second_order_biases`]).
    SecondOrder { p: f64, q: f64 },
}

/// A walk-based context sampler over a fixed graph.
pub struct WalkSampler<'g> {
    graph: &'g Graph,
    cfg: WalkConfig,
    rule: StepRule,
}

impl<'g> WalkSampler<'g> {
    /// Stationary walks: each step follows an outgoing arc with probability
    /// proportional to its weight.
    pub fn stationary(g: &'g Graph, cfg: WalkConfig, policy: DanglingPolicy) -> Result<Self> {
        Self::validate(g, &cfg, policy)?;
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
        Ok(WalkSampler { graph: g, cfg, rule: StepRule::Stationary { tables } })
    }

    /// Second-order walks with return parameter `p` and in-out parameter `q`.
    pub fn second_order(
        g: &'g Graph,
        cfg: WalkConfig,
        p: f64,
        q: f64,
        policy: DanglingPolicy,
    ) -> Result<Self> {
        Self::validate(g, &cfg, policy)?;
        if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "walk bias parameters must be positive and finite, got p={p} q={q}"
            )));
        }
        Ok(WalkSampler { graph: g, cfg, rule: StepRule::SecondOrder { p, q } })
    }

    fn validate(g: &Graph, cfg: &WalkConfig, policy: DanglingPolicy) -> Result<()> {
        if cfg.walks_per_node == 0 || cfg.walk_len == 0 {
            return Err(Error::InvalidConfig(
                "walks per node and walk length must be positive".into(),
            ));
        }
        if cfg.window == 0 || cfg.window > cfg.walk_len {
            return Err(Error::InvalidConfig(format!(
                "window must lie in 1..={}, got {}",
                cfg.walk_len, cfg.window
            )));
        }
        if policy == DanglingPolicy::Error {
            if let Some(node) = g.first_dangling() {
                return Err(Error::DanglingNode {
                    node: g.ids().original(node).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    /// One step from `cur`, given the node the walk occupied before it.
    fn step(
        &self,
        prev: Option<u32>,
        cur: u32,
        rng: &mut ChaCha8Rng,
        bias_buf: &mut Vec<f64>,
    ) -> u32 {
        let nbrs = self.graph.out_neighbors(cur);
        match (&self.rule, prev) {
            (StepRule::Stationary { tables: None }, _)
            | (StepRule::SecondOrder { .. }, None)
                if !self.graph.is_weighted() =>
            {
                nbrs[rng.gen_range(0..nbrs.len())]
            }
            (StepRule::Stationary { tables: Some(tables) }, _) => {
                nbrs[tables[cur as usize].as_ref().expect("non-dangling").sample(rng)]
            }
            (StepRule::SecondOrder { .. }, None) => {
                // First hop has no history: fall back to a weighted step.
                bias_buf.clear();
                bias_buf.extend_from_slice(self.graph.out_weights(cur));
                nbrs[sample_by_weight(bias_buf, rng)]
            }
            (StepRule::SecondOrder { p, q }, Some(prev)) => {
                second_order_biases(self.graph, *p, *q, prev, cur, bias_buf);
                nbrs[sample_by_weight(bias_buf, rng)]
            }
            (StepRule::Stationary { tables: None }, _) => unreachable!("weighted without tables"),
        }
    }

    fn generate(&self, start: u32, rng: &mut ChaCha8Rng, bias_buf: &mut Vec<f64>) -> Vec<u32> {
        let mut walk = Vec::with_capacity(self.cfg.walk_len as usize + 1);
        walk.push(start);
        let mut prev = None;
        let mut cur = start;
        for _ in 0..self.cfg.walk_len {
            if self.graph.out_neighbors(cur).is_empty() {
                break;
            }
            let next = self.step(prev, cur, rng, bias_buf);
            walk.push(next);
            prev = Some(cur);
            cur = next;
        }
        walk
    }

    /// The walks of one stream, in generation order: `walks_per_node` passes,
    /// each visiting every node once in a freshly shuffled order.
    pub fn walks(&self, stream_id: u64) -> Box<dyn Iterator<Item = Vec<u32>> + Send + '_> {
        let mut rng = stream_rng(self.cfg.seed, &[stream_id]);
        let n = self.graph.node_count();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut pass = 0u32;
        let mut idx = n;
        let mut bias_buf = Vec::new();
        Box::new(std::iter::from_fn(move || {
            if idx == order.len() {
                if pass == self.cfg.walks_per_node {
                    return None;
                }
                pass += 1;
                order.shuffle(&mut rng);
                idx = 0;
            }
            let start = order[idx];
            idx += 1;
            Some(self.generate(start, &mut rng, &mut bias_buf))
        }))
    }

    /// Writes one walk per line as space-separated dense node ids.
    pub fn write_walks<W: std::io::Write>(&self, stream_id: u64, out: &mut W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io { path: "<walk dump>".into(), source: e };
        for walk in self.walks(stream_id) {
            let mut line = String::with_capacity(walk.len() * 4);
            for (i, v) in walk.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io)?;
        }
        Ok(())
    }
}

impl ContextSampler for WalkSampler<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn pairs_per_stream(&self) -> u64 {
        // Pair count of a full-length walk; truncated walks emit fewer, so
        // this is an upper estimate, which is all the rate schedule needs.
        let v = self.cfg.walk_len as u64 + 1;
        let r = self.cfg.window as u64;
        let per_walk = 2 * (r * v - r * (r + 1) / 2);
        self.cfg.walks_per_node as u64 * self.graph.node_count() as u64 * per_walk
    }

    fn stream(&self, stream_id: u64) -> Box<dyn Iterator<Item = ContextPair> + Send + '_> {
        let window = self.cfg.window;
        Box::new(
            self.walks(stream_id)
                .flat_map(move |walk| window_pairs(&walk, window)),
        )
    }
}

/// All ordered pairs of walk positions at most `window` steps apart, centers
/// in walk order, each center's contexts left to right.
pub fn window_pairs(walk: &[u32], window: u32) -> Vec<ContextPair> {
    let r = window as usize;
    let mut out = Vec::new();
    for i in 0..walk.len() {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(walk.len() - 1);
        for j in lo..=hi {
            if j != i {
                out.push(ContextPair::new(walk[i], walk[j]));
            }
        }
    }
    out
}

/// Draws an index proportional to `weights` by linear scan.
fn sample_by_weight<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        draw -= w;
        if draw <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Unnormalized second-order step biases over the out-neighbors of `cur`,
/// for a walk that arrived from `prev`.
///
/// Each candidate's arc weight is scaled by 1/p when it returns to `prev`,
/// left alone when `prev` also points at it, and scaled by 1/q otherwise.
pub fn second_order_biases(
    g: &Graph,
    p: f64,
    q: f64,
    prev: u32,
    cur: u32,
    out: &mut Vec<f64>,
) {
    out.clear();
    for (&cand, &wt) in g.out_neighbors(cur).iter().zip(g.out_weights(cur)) {
        let factor = if cand == prev {
            1.0 / p
        } else if g.has_edge(prev, cand) {
            1.0
        } else {
            1.0 / q
        };
        out.push(wt * factor);
    }
}

/// First-order step distribution from `cur`: normalized arc weights.
pub fn first_order_distribution(g: &Graph, cur: u32) -> Vec<f64> {
    normalized(g.out_weights(cur))
}

/// Second-order step distribution from `cur` given predecessor `prev`.
pub fn second_order_distribution(g: &Graph, p: f64, q: f64, prev: u32, cur: u32) -> Vec<f64> {
    let mut biases = Vec::new();
    second_order_biases(g, p, q, prev, cur, &mut biases);
    normalized(&biases)
}

fn normalized(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|&w| w / total).collect()
}
