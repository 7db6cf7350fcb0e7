//! Deterministic synthetic graphs for tests, fixtures and self-checks.

use rand::Rng;

use crate::graph::{Graph, IdMap};
use crate::rng::stream_rng;

/// Seed for the standard 10-vertex undirected random fixture; chosen so the
/// graph is connected (checked by tests).
pub const ER10_SEED: u64 = 30;
/// Seed for the standard 10-vertex directed random fixture; chosen so every
/// vertex has an outgoing edge (checked by tests).
pub const ER10_DIRECTED_SEED: u64 = 8;

fn build(directed: bool, n: usize, edges: Vec<(u32, u32, f64)>) -> Graph {
    Graph::build(directed, IdMap::numeric(n), &edges).expect("synthetic graph is non-empty")
}

/// Complete undirected graph on `n >= 2` vertices.
pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push((u, v, 1.0));
        }
    }
    build(false, n, edges)
}

/// Undirected path 0 - 1 - ... - (n-1).
pub fn path(n: usize) -> Graph {
    let edges = (0..n as u32 - 1).map(|u| (u, u + 1, 1.0)).collect();
    build(false, n, edges)
}

/// Cycle 0 -> 1 -> ... -> (n-1) -> 0, directed or undirected.
pub fn cycle(n: usize, directed: bool) -> Graph {
    let edges = (0..n as u32).map(|u| (u, (u + 1) % n as u32, 1.0)).collect();
    build(directed, n, edges)
}

/// Undirected star: center 0 joined to `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    let edges = (1..=leaves as u32).map(|v| (0, v, 1.0)).collect();
    build(false, leaves + 1, edges)
}

/// Triangle 0-1-2 with a pendant vertex 3 attached to 0.
pub fn k3_with_pendant() -> Graph {
    build(false, 4, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
}

/// Two disjoint undirected cliques of `k` vertices each: {0..k-1} and
/// {k..2k-1}.
pub fn two_cliques(k: usize) -> Graph {
    let mut edges = Vec::new();
    for base in [0u32, k as u32] {
        for i in 0..k as u32 {
            for j in (i + 1)..k as u32 {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    build(false, 2 * k, edges)
}

/// Erdős–Rényi graph: every (ordered, when directed) vertex pair becomes an
/// edge independently with probability `p`. Vertices that end up isolated
/// are still kept (numeric id map covers all of `0..n`).
pub fn erdos_renyi(n: usize, p: f64, directed: bool, seed: u64) -> Graph {
    let mut rng = stream_rng(seed, &[n as u64, directed as u64]);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    build(directed, n, edges)
}

/// Layered digraph: `n` vertices split into `layers` contiguous blocks, each
/// non-final vertex pointing at `min_out..=max_out` distinct vertices of the
/// next block. No reciprocal arcs and no directed two-step shortcut can
/// exist, which the direction-sensitivity checks rely on.
pub fn layered(n: usize, layers: usize, min_out: usize, max_out: usize, seed: u64) -> Graph {
    assert!(layers >= 2 && n >= layers, "need at least two non-empty layers");
    let mut rng = stream_rng(seed, &[n as u64, layers as u64]);
    let bounds: Vec<usize> = (0..=layers).map(|l| l * n / layers).collect();
    let mut edges = Vec::new();
    for l in 0..layers - 1 {
        let (next_lo, next_hi) = (bounds[l + 1], bounds[l + 2]);
        let next_size = next_hi - next_lo;
        for u in bounds[l]..bounds[l + 1] {
            let k = rng.gen_range(min_out..=max_out).min(next_size);
            let mut picked = Vec::with_capacity(k);
            while picked.len() < k {
                let v = (next_lo + rng.gen_range(0..next_size)) as u32;
                if !picked.contains(&v) {
                    picked.push(v);
                }
            }
            for v in picked {
                edges.push((u as u32, v, 1.0));
            }
        }
    }
    build(true, n, edges)
}

/// Layered digraph with skip arcs: each non-final vertex points at `out`
/// distinct vertices drawn from the next `max_span` layers. Arcs still only
/// cross into strictly later layers, so reciprocity is zero by construction
/// — but unlike [`layered`], spans mix, so a removed arc usually keeps
/// redundant two-hop forward routes (a span-s arc can be rebuilt from any
/// s₁+s₂ = s pair), which path-counting link predictors need to score
/// held-out arcs above chance.
pub fn layered_dag(n: usize, layers: usize, out: usize, max_span: usize, seed: u64) -> Graph {
    assert!(layers >= 2 && n >= layers, "need at least two non-empty layers");
    assert!(max_span >= 2, "spans must mix for redundant routes to exist");
    let mut rng = stream_rng(seed, &[n as u64, layers as u64, 0xda6]);
    let bounds: Vec<usize> = (0..=layers).map(|l| l * n / layers).collect();
    let mut edges = Vec::new();
    for l in 0..layers - 1 {
        let (lo, hi) = (bounds[l + 1], bounds[(l + max_span + 1).min(layers)]);
        let window = hi - lo;
        for u in bounds[l]..bounds[l + 1] {
            let k = out.min(window);
            let mut picked: Vec<u32> = Vec::with_capacity(k);
            while picked.len() < k {
                let v = (lo + rng.gen_range(0..window)) as u32;
                if !picked.contains(&v) {
                    picked.push(v);
                }
            }
            for v in picked {
                edges.push((u as u32, v, 1.0));
            }
        }
    }
    build(true, n, edges)
}

/// Connectivity of the undirected view (used to sanity-check fixtures).
pub fn is_connected(g: &Graph) -> bool {
    let und = g.undirected_view();
    let n = und.node_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0u32];
    seen[0] = true;
    let mut count = 0;
    while let Some(u) = stack.pop() {
        count += 1;
        for &v in und.out_neighbors(u) {
            if !seen[v as usize] {
                seen[v as usize] = true;
                stack.push(v);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er10_fixture_is_connected() {
        let g = erdos_renyi(10, 0.35, false, ER10_SEED);
        assert_eq!(g.node_count(), 10);
        assert!(is_connected(&g), "pinned seed must give a connected fixture");
    }

    #[test]
    fn er10_directed_fixture_has_no_dangling_vertex() {
        let g = erdos_renyi(10, 0.35, true, ER10_DIRECTED_SEED);
        assert_eq!(g.node_count(), 10);
        assert_eq!(g.first_dangling(), None);
        assert!(is_connected(&g));
    }

    #[test]
    fn layered_graph_has_no_reciprocal_or_shortcut_arcs() {
        let g = layered(60, 3, 2, 4, 7);
        for (u, v, _) in g.arcs() {
            assert!(!g.has_edge(v, u), "reciprocal arc {u}->{v}");
            for &w in g.out_neighbors(v) {
                assert!(!g.has_edge(u, w), "shortcut {u}->{w} closes a 2-path");
            }
        }
    }

    #[test]
    fn layered_dag_arcs_only_cross_into_later_layers() {
        let (n, layers, max_span) = (60, 12, 4);
        let g = layered_dag(n, layers, 3, max_span, 3);
        let layer_of = |u: u32| (u as usize * layers) / n;
        let mut spans_two = false;
        for (u, v, _) in g.arcs() {
            let span = layer_of(v) as i64 - layer_of(u) as i64;
            assert!(span >= 1, "arc {u}->{v} does not move forward");
            assert!(span <= max_span as i64, "arc {u}->{v} overshoots the span window");
            assert!(!g.has_edge(v, u), "reciprocal arc {u}->{v}");
            spans_two |= span >= 2;
        }
        assert!(spans_two, "skip arcs must actually skip a layer");
        assert_eq!(
            g.arcs().count(),
            layered_dag(n, layers, 3, max_span, 3).arcs().count(),
            "same seed, same graph"
        );
    }

    #[test]
    fn basic_shapes() {
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(path(4).edge_count(), 3);
        assert_eq!(cycle(6, true).edge_count(), 6);
        assert_eq!(star(5).out_degree(0), 5);
        assert_eq!(k3_with_pendant().edge_count(), 4);
        assert_eq!(two_cliques(4).edge_count(), 12);
    }
}
