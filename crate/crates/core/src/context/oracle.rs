//! Closed-form pair distributions used to verify the samplers.
//!
//! Everything here recomputes expectations from the graph alone — dense
//! transition matrices, explicit series — sharing no machinery with the
//! production samplers it is meant to check. Sizes are capped accordingly.

use rand::Rng;

use crate::alias::AliasTable;
use crate::context::stream::{ContextPair, ContextSampler};
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Largest node count the dense closed forms accept.
pub const ORACLE_NODE_LIMIT: usize = 100;

fn check_size(g: &Graph, what: &'static str) -> Result<()> {
    if g.node_count() > ORACLE_NODE_LIMIT {
        return Err(Error::TooLarge {
            what,
            actual: g.node_count(),
            limit: ORACLE_NODE_LIMIT,
        });
    }
    if let Some(node) = g.first_dangling() {
        return Err(Error::DanglingNode {
            node: g.ids().original(node).to_string(),
        });
    }
    Ok(())
}

/// Dense row-stochastic transition matrix: step from a node along one of its
/// outgoing arcs with probability proportional to arc weight.
pub fn transition_matrix(g: &Graph) -> Result<Vec<f64>> {
    check_size(g, "dense transition matrix")?;
    let n = g.node_count();
    let mut p = vec![0.0; n * n];
    for u in 0..n {
        let total = g.weighted_out_degree(u as u32);
        for (&v, &w) in g.out_neighbors(u as u32).iter().zip(g.out_weights(u as u32)) {
            p[u * n + v as usize] += w / total;
        }
    }
    Ok(p)
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Start distribution of the stationary random walk: weighted out-degree over
/// total volume.
pub fn stationary_start(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let total: f64 = (0..n).map(|u| g.weighted_out_degree(u as u32)).sum();
    (0..n)
        .map(|u| g.weighted_out_degree(u as u32) / total)
        .collect()
}

/// Expected ordered-pair frequency of windowed co-occurrence along stationary
/// random walks.
///
/// Entry (a, b) averages, over hop distances `r = 1..=window`, the chance of
/// starting a walk at `a` (degree-proportional) and sitting at `b` after `r`
/// steps, plus the mirrored term, halved. The result is an exact distribution
/// over ordered pairs: it sums to one and is symmetric even when the graph is
/// directed.
pub fn expected_cooccurrence(g: &Graph, window: u32) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidConfig("window must be at least 1".into()));
    }
    let p = transition_matrix(g)?;
    let n = g.node_count();
    let pi = stationary_start(g);
    let scale = 1.0 / (2.0 * window as f64);
    let mut m = vec![0.0; n * n];
    let mut power = p.clone();
    for r in 1..=window {
        if r > 1 {
            power = mat_mul(&power, &p, n);
        }
        for a in 0..n {
            for b in 0..n {
                m[a * n + b] += scale * (pi[a] * power[a * n + b] + pi[b] * power[b * n + a]);
            }
        }
    }
    Ok(m)
}

/// Draws pairs from the exact law behind [`expected_cooccurrence`]: start at a
/// degree-weighted node, walk a uniformly chosen number of steps up to
/// `window`, then emit the endpoints in a fair random order.
///
/// Unlike the production walk streams, which reuse every position of a long
/// walk and therefore under-count near walk boundaries, each draw here follows
/// the definition directly, so empirical frequencies converge to the closed
/// form with no bias term.
pub struct ExactWindowSampler<'g> {
    graph: &'g Graph,
    window: u32,
    samples: u64,
    seed: u64,
    start: AliasTable,
}

impl<'g> ExactWindowSampler<'g> {
    pub fn new(g: &'g Graph, window: u32, samples: u64, seed: u64) -> Result<Self> {
        if window == 0 || samples == 0 {
            return Err(Error::InvalidConfig(
                "window and sample count must be positive".into(),
            ));
        }
        if let Some(node) = g.first_dangling() {
            return Err(Error::DanglingNode {
                node: g.ids().original(node).to_string(),
            });
        }
        let weights: Vec<f64> = (0..g.node_count())
            .map(|u| g.weighted_out_degree(u as u32))
            .collect();
        Ok(ExactWindowSampler {
            graph: g,
            window,
            samples,
            seed,
            start: AliasTable::new(&weights),
        })
    }
}

/// One weighted step along an outgoing arc, by linear scan of the arc weights.
fn step<R: Rng>(g: &Graph, u: u32, rng: &mut R) -> u32 {
    let nbrs = g.out_neighbors(u);
    debug_assert!(!nbrs.is_empty());
    if !g.is_weighted() {
        return nbrs[rng.gen_range(0..nbrs.len())];
    }
    let ws = g.out_weights(u);
    let total: f64 = ws.iter().sum();
    let mut draw = rng.gen::<f64>() * total;
    for (&v, &w) in nbrs.iter().zip(ws) {
        draw -= w;
        if draw <= 0.0 {
            return v;
        }
    }
    *nbrs.last().unwrap()
}

impl ContextSampler for ExactWindowSampler<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
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
            let a = self.start.sample(&mut rng) as u32;
            let hops = rng.gen_range(1..=self.window);
            let mut b = a;
            for _ in 0..hops {
                b = step(self.graph, b, &mut rng);
            }
            Some(if rng.gen::<bool>() {
                ContextPair::new(a, b)
            } else {
                ContextPair::new(b, a)
            })
        }))
    }
}

/// Distribution of the number of steps a restart-terminated walk takes before
/// emitting: geometric with success rate `alpha`, truncated at `max_len` where
/// the remaining tail mass piles up.
pub fn stop_length_distribution(alpha: f64, max_len: u32) -> Vec<f64> {
    let l = max_len as usize;
    let mut dist = vec![0.0; l + 1];
    for (h, slot) in dist.iter_mut().enumerate() {
        *slot = alpha * (1.0 - alpha).powi(h as i32);
    }
    dist[l] += (1.0 - alpha).powi(l as i32 + 1);
    dist
}

/// Expected ordered-pair frequency of restart-terminated walk endpoints:
/// uniform start, walk until a restart coin (rate `alpha`) or the `max_len`
/// cap fires, emit (start, end).
///
/// Entry (a, b) is `(1/n) * sum_h P(stop at h) * P^h[a, b]`.
pub fn expected_ppr_pairs(g: &Graph, alpha: f64, max_len: u32) -> Result<Vec<f64>> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "restart probability must lie in (0, 1), got {alpha}"
        )));
    }
    let p = transition_matrix(g)?;
    let n = g.node_count();
    let stop = stop_length_distribution(alpha, max_len);
    let mut m = vec![0.0; n * n];
    // h = 0 contributes on the diagonal: the walk stops where it starts.
    for a in 0..n {
        m[a * n + a] = stop[0] / n as f64;
    }
    let mut power = p.clone();
    for (h, &mass) in stop.iter().enumerate().skip(1) {
        if h > 1 {
            power = mat_mul(&power, &p, n);
        }
        for a in 0..n {
            for b in 0..n {
                m[a * n + b] += mass / n as f64 * power[a * n + b];
            }
        }
    }
    Ok(m)
}
