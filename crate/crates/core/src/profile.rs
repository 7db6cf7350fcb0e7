//! Structural measurements used to characterize benchmark graphs:
//! reciprocity, clustering, transitivity (plain and direction-aware),
//! diameter, and the separation between the two largest adjacency
//! eigenvalues.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::stream_rng;

/// Exact all-pairs BFS is used up to this many vertices in the largest
/// component; beyond it the diameter is lower-bounded by double sweeps.
pub const EXACT_DIAMETER_LIMIT: usize = 50_000;
/// Double-sweep repetitions in approximate diameter mode.
pub const DIAMETER_SWEEPS: usize = 100;
/// Relative tolerance for eigenvalue estimates.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Iteration cap for the power method.
pub const SPECTRAL_MAX_ITERS: usize = 10_000;

// Fixed internal seeds: these measurements take no seed parameter but use
// randomized starts, so the draws are pinned for reproducibility.
const DIAMETER_SEED: u64 = 0x00d1_a3e7;
const SPECTRAL_SEED: u64 = 0x05ec_7a1b;

/// Fraction of arcs whose reverse arc also exists. Directed graphs only.
pub fn reciprocity(g: &Graph) -> Result<f64> {
    if !g.is_directed() {
        return Err(Error::NotApplicable {
            what: "reciprocity",
            why: "undirected graphs",
        });
    }
    let mut reciprocal = 0usize;
    for (u, v, _) in g.arcs() {
        if g.has_edge(v, u) {
            reciprocal += 1;
        }
    }
    Ok(reciprocal as f64 / g.arc_count() as f64)
}

/// Per-vertex triangle counts on the undirected view. Entry `u` is the number
/// of unordered neighbor pairs of `u` that are themselves adjacent.
fn triangle_counts(und: &Graph) -> Vec<u64> {
    let n = und.node_count();
    let mut tri = vec![0u64; n];
    for u in 0..n as u32 {
        let nu = und.out_neighbors(u);
        for &v in nu {
            if v <= u {
                continue;
            }
            // Sorted-list intersection counts common neighbors w > v so each
            // triangle {u, v, w} is found exactly once.
            let nv = und.out_neighbors(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                let (a, b) = (nu[i], nv[j]);
                if a < b {
                    i += 1;
                } else if b < a {
                    j += 1;
                } else {
                    if a > v {
                        tri[u as usize] += 1;
                        tri[v as usize] += 1;
                        tri[a as usize] += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    tri
}

/// Mean local clustering coefficient over all vertices of the undirected
/// view; vertices of degree < 2 contribute 0.
pub fn clustering(g: &Graph) -> f64 {
    let und = g.undirected_view();
    let tri = triangle_counts(&und);
    let n = und.node_count();
    let mut acc = 0.0;
    for u in 0..n as u32 {
        let d = und.out_degree(u) as u64;
        if d >= 2 {
            acc += 2.0 * tri[u as usize] as f64 / (d * (d - 1)) as f64;
        }
    }
    acc / n as f64
}

/// Global transitivity of the undirected view: closed triplets over all
/// triplets (3 * triangles / paths of length two). 0 when no triplets exist.
pub fn transitivity(g: &Graph) -> f64 {
    let und = g.undirected_view();
    let tri = triangle_counts(&und);
    let closed: u64 = tri.iter().sum(); // equals 3 * number of triangles
    let triplets: u64 = (0..und.node_count() as u32)
        .map(|u| {
            let d = und.out_degree(u) as u64;
            d * (d - 1) / 2
        })
        .sum();
    if triplets == 0 {
        0.0
    } else {
        closed as f64 / triplets as f64
    }
}

/// Counts, for vertex `u`, directed two-step paths u->v->w (w != u) and how
/// many of them are closed by a co-oriented shortcut u->w.
fn directed_path_counts(g: &Graph, u: u32) -> (u64, u64) {
    let (mut paths, mut closed) = (0u64, 0u64);
    for &v in g.out_neighbors(u) {
        for &w in g.out_neighbors(v) {
            if w == u {
                continue;
            }
            paths += 1;
            if g.has_edge(u, w) {
                closed += 1;
            }
        }
    }
    (paths, closed)
}

/// Mean over vertices of the fraction of directed two-step paths starting at
/// the vertex that are closed by an edge in the same direction. Vertices
/// without such paths contribute 0. Directed graphs only.
pub fn clustering_directed(g: &Graph) -> Result<f64> {
    if !g.is_directed() {
        return Err(Error::NotApplicable {
            what: "directed clustering",
            why: "undirected graphs",
        });
    }
    let n = g.node_count();
    let mut acc = 0.0;
    for u in 0..n as u32 {
        let (paths, closed) = directed_path_counts(g, u);
        if paths > 0 {
            acc += closed as f64 / paths as f64;
        }
    }
    Ok(acc / n as f64)
}

/// Global fraction of directed two-step paths closed by a co-oriented edge.
/// 0 when the graph has no directed two-step path. Directed graphs only.
pub fn transitivity_directed(g: &Graph) -> Result<f64> {
    if !g.is_directed() {
        return Err(Error::NotApplicable {
            what: "directed transitivity",
            why: "undirected graphs",
        });
    }
    let (mut paths, mut closed) = (0u64, 0u64);
    for u in 0..g.node_count() as u32 {
        let (p, c) = directed_path_counts(g, u);
        paths += p;
        closed += c;
    }
    Ok(if paths == 0 { 0.0 } else { closed as f64 / paths as f64 })
}

/// BFS distances from `start` over `und`; unreachable vertices are
/// `u32::MAX`. Returns the farthest reached vertex and its distance.
fn bfs(und: &Graph, start: u32, dist: &mut [u32], queue: &mut VecDeque<u32>) -> (u32, u32) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[start as usize] = 0;
    queue.push_back(start);
    let (mut far_node, mut far_dist) = (start, 0);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in und.out_neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                if du + 1 > far_dist {
                    far_dist = du + 1;
                    far_node = v;
                }
                queue.push_back(v);
            }
        }
    }
    (far_node, far_dist)
}

/// Vertices of the largest connected component of the undirected view.
fn largest_component(und: &Graph) -> Vec<u32> {
    let n = und.node_count();
    let mut comp = vec![u32::MAX; n];
    let mut best: (usize, u32) = (0, 0); // (size, component id)
    let mut next_id = 0u32;
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        if comp[s as usize] != u32::MAX {
            continue;
        }
        let id = next_id;
        next_id += 1;
        let mut size = 0usize;
        comp[s as usize] = id;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in und.out_neighbors(u) {
                if comp[v as usize] == u32::MAX {
                    comp[v as usize] = id;
                    queue.push_back(v);
                }
            }
        }
        if size > best.0 {
            best = (size, id);
        }
    }
    (0..n as u32).filter(|&u| comp[u as usize] == best.1).collect()
}

/// Diameter of the largest component of the undirected view. The second
/// element is `true` when the value is exact (all-sources BFS); for graphs
/// above [`EXACT_DIAMETER_LIMIT`] vertices it is a double-sweep lower bound.
pub fn diameter(g: &Graph) -> (u32, bool) {
    let und = g.undirected_view();
    let members = largest_component(&und);
    let n = und.node_count();
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    if members.len() <= EXACT_DIAMETER_LIMIT {
        let mut best = 0;
        for &s in &members {
            let (_, d) = bfs(&und, s, &mut dist, &mut queue);
            best = best.max(d);
        }
        (best, true)
    } else {
        // Double sweep: BFS from a seed, then from the farthest vertex found;
        // the second eccentricity lower-bounds the diameter.
        let mut rng = stream_rng(DIAMETER_SEED, &[members.len() as u64]);
        let mut best = 0;
        for _ in 0..DIAMETER_SWEEPS {
            let s = members[rng.gen_range(0..members.len())];
            let (far, _) = bfs(&und, s, &mut dist, &mut queue);
            let (_, d) = bfs(&und, far, &mut dist, &mut queue);
            best = best.max(d);
        }
        (best, false)
    }
}

/// Symmetric adjacency mat-vec on the undirected view.
fn sym_matvec(und: &Graph, x: &[f64], y: &mut [f64]) {
    y.fill(0.0);
    for u in 0..und.node_count() as u32 {
        let mut acc = 0.0;
        for (&v, &w) in und.out_neighbors(u).iter().zip(und.out_weights(u)) {
            acc += w * x[v as usize];
        }
        y[u as usize] = acc;
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Power iteration for the largest eigenvalue of A^2 (A symmetric),
/// optionally deflated against a previously found eigenvector. Working on
/// A^2 makes +/- eigenvalue pairs (bipartite spectra) converge cleanly; the
/// returned value is lambda^2 ordered by |lambda|.
fn squared_power_iteration(
    und: &Graph,
    deflate: Option<&[f64]>,
    tol: f64,
    max_iters: usize,
    seed_tag: u64,
) -> Result<(Vec<f64>, f64)> {
    let n = und.node_count();
    let mut rng = stream_rng(SPECTRAL_SEED, &[seed_tag]);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut tmp = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut prev = f64::INFINITY;
    for _ in 0..max_iters {
        if let Some(v1) = deflate {
            let proj: f64 = v1.iter().zip(&x).map(|(a, b)| a * b).sum();
            for (xi, vi) in x.iter_mut().zip(v1) {
                *xi -= proj * vi;
            }
        }
        let nx = norm(&x);
        if nx == 0.0 {
            return Err(Error::NoConvergence { iterations: max_iters });
        }
        for xi in x.iter_mut() {
            *xi /= nx;
        }
        sym_matvec(und, &x, &mut tmp);
        sym_matvec(und, &tmp, &mut y);
        if let Some(v1) = deflate {
            let proj: f64 = v1.iter().zip(&y).map(|(a, b)| a * b).sum();
            for (yi, vi) in y.iter_mut().zip(v1) {
                *yi -= proj * vi;
            }
        }
        let mu: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        if (mu - prev).abs() <= tol * mu.abs().max(1e-12) {
            x.copy_from_slice(&y);
            let nx = norm(&x);
            if nx > 0.0 {
                for xi in x.iter_mut() {
                    *xi /= nx;
                }
            }
            return Ok((x, mu.max(0.0)));
        }
        prev = mu;
        x.copy_from_slice(&y);
    }
    Err(Error::NoConvergence { iterations: max_iters })
}

/// Ratio |lambda_1| / |lambda_2| of the adjacency spectrum, eigenvalues
/// ordered by magnitude. Directed graphs are symmetrized first.
pub fn spectral_separation(g: &Graph) -> Result<f64> {
    spectral_separation_with_opts(g, SPECTRAL_TOL, SPECTRAL_MAX_ITERS)
}

pub fn spectral_separation_with_opts(g: &Graph, tol: f64, max_iters: usize) -> Result<f64> {
    let und = g.undirected_view();
    if und.node_count() < 2 {
        return Err(Error::NotApplicable {
            what: "spectral separation",
            why: "graphs with fewer than two vertices",
        });
    }
    let (v1, mu1) = squared_power_iteration(&und, None, tol, max_iters, 1)?;
    let (_, mu2) = squared_power_iteration(&und, Some(&v1), tol, max_iters, 2)?;
    if mu2 <= 0.0 {
        return Err(Error::NoConvergence { iterations: max_iters });
    }
    Ok((mu1 / mu2).sqrt())
}

/// Bundle of every measurement, as reported by the `stats` task.
#[derive(Debug, Clone)]
pub struct GraphProfile {
    pub node_count: usize,
    pub edge_count: usize,
    pub directed: bool,
    pub reciprocity: Option<f64>,
    pub diameter: u32,
    pub diameter_exact: bool,
    pub clustering: f64,
    pub transitivity: f64,
    pub clustering_directed: Option<f64>,
    pub transitivity_directed: Option<f64>,
    pub spectral_separation: f64,
}

pub fn profile(g: &Graph) -> Result<GraphProfile> {
    let (diam, exact) = diameter(g);
    Ok(GraphProfile {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        directed: g.is_directed(),
        reciprocity: if g.is_directed() { Some(reciprocity(g)?) } else { None },
        diameter: diam,
        diameter_exact: exact,
        clustering: clustering(g),
        transitivity: transitivity(g),
        clustering_directed: if g.is_directed() {
            Some(clustering_directed(g)?)
        } else {
            None
        },
        transitivity_directed: if g.is_directed() {
            Some(transitivity_directed(g)?)
        } else {
            None
        },
        spectral_separation: spectral_separation(g)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::IdMap;
    use crate::synth;

    fn directed(n: usize, edges: &[(u32, u32)]) -> Graph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Graph::build(true, IdMap::numeric(n), &e).unwrap()
    }

    #[test]
    fn reciprocity_counts_mutual_arcs() {
        let g = directed(3, &[(0, 1), (1, 0), (1, 2)]);
        assert!((reciprocity(&g).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let dag = synth::layered(30, 3, 1, 3, 1);
        assert_eq!(reciprocity(&dag).unwrap(), 0.0);
        let two_cycle = synth::cycle(2, true);
        assert_eq!(reciprocity(&two_cycle).unwrap(), 1.0);
    }

    #[test]
    fn reciprocity_rejects_undirected_graphs() {
        let err = reciprocity(&synth::path(3)).unwrap_err();
        assert!(matches!(err, Error::NotApplicable { .. }));
    }

    #[test]
    fn symmetrized_graph_is_fully_reciprocal() {
        let und = synth::layered(30, 3, 1, 3, 2).undirected_view();
        let arcs: Vec<_> = und.arcs().collect();
        let sym = Graph::build(true, IdMap::numeric(und.node_count()), &arcs).unwrap();
        assert_eq!(reciprocity(&sym).unwrap(), 1.0);
    }

    #[test]
    fn clustering_known_values() {
        assert!((clustering(&synth::complete(3)) - 1.0).abs() < 1e-15);
        assert_eq!(clustering(&synth::path(3)), 0.0);
        // Triangle with pendant: (1/3 + 1 + 1 + 0) / 4.
        assert!((clustering(&synth::k3_with_pendant()) - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn transitivity_known_values() {
        assert!((transitivity(&synth::complete(3)) - 1.0).abs() < 1e-15);
        assert_eq!(transitivity(&synth::star(3)), 0.0);
        // One triangle, five paths of length two.
        assert!((transitivity(&synth::k3_with_pendant()) - 0.6).abs() < 1e-15);
        // A single edge has no triplet at all.
        assert_eq!(transitivity(&synth::path(2)), 0.0);
    }

    #[test]
    fn clustering_and_transitivity_stay_in_unit_interval() {
        for seed in 0..5 {
            let g = synth::erdos_renyi(30, 0.2, false, seed);
            for v in [clustering(&g), transitivity(&g)] {
                assert!((0.0..=1.0).contains(&v), "out of range: {v}");
            }
        }
        assert_eq!(clustering(&synth::complete(5)), 1.0);
        assert_eq!(transitivity(&synth::complete(5)), 1.0);
        assert_eq!(clustering(&synth::star(6)), 0.0);
    }

    #[test]
    fn directed_clustering_hand_traced() {
        // 0->1->2 with shortcut 0->2: the only 2-path from 0 closes.
        let g = directed(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!((clustering_directed(&g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(transitivity_directed(&g).unwrap(), 1.0);
        // Layered graphs have 2-paths but never a co-oriented shortcut.
        let dag = synth::layered(30, 3, 2, 3, 3);
        assert_eq!(clustering_directed(&dag).unwrap(), 0.0);
        assert_eq!(transitivity_directed(&dag).unwrap(), 0.0);
    }

    #[test]
    fn directed_measures_reject_undirected_graphs() {
        assert!(clustering_directed(&synth::path(3)).is_err());
        assert!(transitivity_directed(&synth::path(3)).is_err());
    }

    #[test]
    fn diameter_exact_on_small_graphs() {
        assert_eq!(diameter(&synth::path(4)), (3, true));
        assert_eq!(diameter(&synth::complete(3)), (1, true));
        assert_eq!(diameter(&synth::k3_with_pendant()), (2, true));
    }

    #[test]
    fn diameter_uses_largest_component() {
        // P4 plus a disjoint edge: the P4 wins.
        let g = Graph::build(
            false,
            IdMap::numeric(6),
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (4, 5, 1.0)],
        )
        .unwrap();
        assert_eq!(diameter(&g), (3, true));
    }

    #[test]
    fn spectral_separation_analytic_cases() {
        // Triangle spectrum {2, -1, -1}.
        assert!((spectral_separation(&synth::complete(3)).unwrap() - 2.0).abs() < 1e-6);
        // Star and path are bipartite: +/- pairs with equal magnitude.
        assert!((spectral_separation(&synth::star(3)).unwrap() - 1.0).abs() < 1e-6);
        assert!((spectral_separation(&synth::path(3)).unwrap() - 1.0).abs() < 1e-6);
        assert!((spectral_separation(&synth::path(2)).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn spectral_separation_is_relabeling_invariant() {
        let g = synth::erdos_renyi(25, 0.25, false, 11);
        let n = g.node_count();
        // Relabel v -> n-1-v.
        let relabeled: Vec<_> = g
            .arcs()
            .map(|(u, v, w)| ((n as u32 - 1 - u), (n as u32 - 1 - v), w))
            .collect();
        let h = Graph::build(false, IdMap::numeric(n), &relabeled).unwrap();
        let a = spectral_separation(&g).unwrap();
        let b = spectral_separation(&h).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn spectral_separation_reports_non_convergence() {
        let err = spectral_separation_with_opts(&synth::complete(3), 1e-8, 1).unwrap_err();
        match err {
            Error::NoConvergence { iterations } => assert_eq!(iterations, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_bundles_everything() {
        let p = profile(&synth::k3_with_pendant()).unwrap();
        assert_eq!(p.node_count, 4);
        assert_eq!(p.edge_count, 4);
        assert!(!p.directed);
        assert!(p.reciprocity.is_none() && p.clustering_directed.is_none());
        assert_eq!(p.diameter, 2);
        assert!(p.diameter_exact);
        assert!((p.transitivity - 0.6).abs() < 1e-15);

        let d = profile(&directed(3, &[(0, 1), (1, 2), (0, 2)])).unwrap();
        assert_eq!(d.reciprocity, Some(0.0));
        assert_eq!(d.transitivity_directed, Some(1.0));
    }
}
