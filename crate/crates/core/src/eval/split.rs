//! Train/test edge splits for link prediction.
//!
//! A split removes a fraction of edges as test positives under the
//! constraint that no vertex loses its last incident edge, then pairs them
//! with an equal number of negatives: reversed positives first (when the
//! reversal is itself a non-edge), uniform non-edges for the rest.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Rng derivation tag for split generation.
const SPLIT_TAG: u64 = 0x5b11;

/// Attempt budget per needed negative before giving up on rejection
/// sampling (near-complete graphs have almost no non-edges).
const NEGATIVE_ATTEMPTS: usize = 10_000;

#[derive(Debug)]
pub struct LinkSplit {
    /// Residual graph: every node keeps at least one incident edge.
    pub train: Graph,
    /// Held-out edges, in removal order.
    pub positives: Vec<(u32, u32)>,
    /// Non-edges, one per positive; the leading entries are reversals.
    pub negatives: Vec<(u32, u32)>,
    pub holdout: f64,
    pub reversal: f64,
    pub seed: u64,
}

/// Removes ⌊holdout·|E|⌋ edges (fewer when the no-isolation constraint
/// pins edges to training) and draws matched negatives; `reversal` is the
/// fraction of positives whose reversed pair is tried as a negative first.
pub fn make_lp_split(g: &Graph, holdout: f64, reversal: f64, seed: u64) -> Result<LinkSplit> {
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "holdout fraction must be in (0,1), got {holdout}"
        )));
    }
    if !(0.0..=1.0).contains(&reversal) {
        return Err(Error::InvalidConfig(format!(
            "reversal fraction must be in [0,1], got {reversal}"
        )));
    }
    for u in 0..g.node_count() as u32 {
        if g.total_degree(u) == 0 {
            return Err(Error::InvalidConfig(format!(
                "node {} has no edges; no split can keep it un-isolated",
                g.ids().original(u)
            )));
        }
    }

    let mut rng = stream_rng(seed, &[SPLIT_TAG]);
    let mut edges: Vec<(u32, u32, f64)> = g.logical_edges().collect();
    let target = (holdout * edges.len() as f64).floor() as usize;
    edges.shuffle(&mut rng);

    // Greedy removal with live incident-edge counts: an edge is removable
    // only while both endpoints keep another edge.
    let mut remaining: Vec<usize> =
        (0..g.node_count() as u32).map(|u| g.total_degree(u)).collect();
    let mut positives = Vec::with_capacity(target);
    let mut train_edges = Vec::with_capacity(edges.len() - target);
    for (u, v, w) in edges {
        if positives.len() < target && remaining[u as usize] >= 2 && remaining[v as usize] >= 2 {
            remaining[u as usize] -= 1;
            remaining[v as usize] -= 1;
            positives.push((u, v));
        } else {
            train_edges.push((u, v, w));
        }
    }
    let train = Graph::build(g.is_directed(), g.ids().clone(), &train_edges)?;

    // Negatives: reversals of the leading ρ·|positives| positives when the
    // reversed pair is a genuine non-edge, then uniform rejection samples.
    let mut negatives: Vec<(u32, u32)> = Vec::with_capacity(positives.len());
    let mut taken: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
    let is_negative =
        |u: u32, v: u32, taken: &std::collections::HashSet<(u32, u32)>| {
            u != v && !g.has_edge(u, v) && !taken.contains(&(u, v))
        };
    let reversal_quota = (reversal * positives.len() as f64).round() as usize;
    for &(a, b) in positives.iter().take(reversal_quota) {
        if is_negative(b, a, &taken) {
            negatives.push((b, a));
            taken.insert((b, a));
        }
    }
    let n = g.node_count() as u32;
    let mut attempts = 0usize;
    while negatives.len() < positives.len() {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if is_negative(u, v, &taken) {
            negatives.push((u, v));
            taken.insert((u, v));
        } else {
            attempts += 1;
            if attempts > NEGATIVE_ATTEMPTS * positives.len() {
                return Err(Error::InvalidConfig(
                    "graph is too dense to sample enough non-edge negatives".into(),
                ));
            }
        }
    }

    let split =
        LinkSplit { train, positives, negatives, holdout, reversal, seed };
    validate_split(g, &split)?;
    Ok(split)
}

/// Exhaustive invariant scan, run on every generated split: balance,
/// positive/negative disjointness from the right edge sets, no isolated
/// vertex.
pub fn validate_split(g: &Graph, s: &LinkSplit) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidConfig(format!("invalid split: {msg}")));
    if s.negatives.len() != s.positives.len() {
        return fail(format!(
            "{} positives vs {} negatives",
            s.positives.len(),
            s.negatives.len()
        ));
    }
    if s.train.node_count() != g.node_count() {
        return fail("residual graph lost vertices".into());
    }
    for &(u, v) in &s.positives {
        if !g.has_edge(u, v) {
            return fail(format!("positive ({u},{v}) is not an edge of the full graph"));
        }
        if s.train.has_edge(u, v) {
            return fail(format!("positive ({u},{v}) leaked into the training graph"));
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(s.negatives.len());
    for &(u, v) in &s.negatives {
        if u == v || g.has_edge(u, v) {
            return fail(format!("negative ({u},{v}) is an edge or a self-pair"));
        }
        if !seen.insert((u, v)) {
            return fail(format!("negative ({u},{v}) repeats"));
        }
    }
    for u in 0..g.node_count() as u32 {
        if s.train.total_degree(u) == 0 {
            return fail(format!("node {} is isolated in the residual graph", g.ids().original(u)));
        }
    }
    Ok(())
}

/// Writes `train.txt`, `positives.txt`, `negatives.txt` and
/// `manifest.json` into `dir`.
pub fn write_split(g: &Graph, s: &LinkSplit, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    s.train.save_edge_list(&dir.join("train.txt"))?;
    let write_pairs = |name: &str, pairs: &[(u32, u32)]| -> Result<()> {
        let path = dir.join(name);
        let mut text = String::new();
        for &(u, v) in pairs {
            text.push_str(g.ids().original(u));
            text.push(' ');
            text.push_str(g.ids().original(v));
            text.push('\n');
        }
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    write_pairs("positives.txt", &s.positives)?;
    write_pairs("negatives.txt", &s.negatives)?;
    let manifest = serde_json::json!({
        "holdout": s.holdout,
        "reversal": s.reversal,
        "seed": s.seed,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "train_edges": s.train.edge_count(),
        "positives": s.positives.len(),
        "negatives": s.negatives.len(),
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, format!("{manifest:#}\n")).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::synth;

    #[test]
    fn directed_four_cycle_reverses_its_single_positive() {
        let g = synth::cycle(4, true);
        let s = make_lp_split(&g, 0.25, 1.0, 5).unwrap();
        assert_eq!(s.positives.len(), 1);
        let (a, b) = s.positives[0];
        assert_eq!(s.negatives, vec![(b, a)]);
    }

    #[test]
    fn zero_reversal_draws_only_uniform_non_edges() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let s = make_lp_split(&g, 0.3, 0.0, 9).unwrap();
        assert!(!s.positives.is_empty());
        for &(u, v) in &s.negatives {
            let reversed = s.positives.iter().any(|&(a, b)| (b, a) == (u, v));
            assert!(!reversed || !g.has_edge(u, v));
            assert!(!g.has_edge(u, v));
        }
    }

    #[test]
    fn star_pins_every_leaf_edge_to_training() {
        let g = synth::star(5);
        let s = make_lp_split(&g, 0.5, 0.5, 3).unwrap();
        // Every edge is some leaf's only edge, so none can be held out.
        assert_eq!(s.positives.len(), 0);
        assert_eq!(s.train.edge_count(), 5);
        for u in 0..6 {
            assert!(s.train.total_degree(u) >= 1);
        }
    }

    #[test]
    fn splits_satisfy_invariants_across_seeds_and_shapes() {
        let graphs = [
            synth::erdos_renyi(12, 0.3, false, 2),
            synth::erdos_renyi(12, 0.3, true, 31),
            synth::cycle(9, true),
            synth::k3_with_pendant(),
        ];
        for g in &graphs {
            for seed in 0..5 {
                for rho in [0.0, 0.5, 1.0] {
                    let s = make_lp_split(g, 0.4, rho, seed).unwrap();
                    validate_split(g, &s).unwrap();
                    let kept = s.train.edge_count() + s.positives.len();
                    assert_eq!(kept, g.edge_count(), "edges conserved");
                }
            }
        }
    }

    #[test]
    fn isolated_nodes_block_the_split_by_name() {
        let g = synth::erdos_renyi(30, 0.02, false, 0);
        assert!(
            (0..30).any(|u| g.total_degree(u) == 0),
            "fixture needs an isolated node"
        );
        match make_lp_split(&g, 0.5, 0.0, 1) {
            Err(Error::InvalidConfig(msg)) => {
                assert!(msg.contains("no edges"), "{msg}");
            }
            other => panic!("expected a blocking-node error, got {other:?}"),
        }
    }

    #[test]
    fn bad_fractions_are_rejected() {
        let g = synth::complete(4);
        assert!(make_lp_split(&g, 0.0, 0.5, 1).is_err());
        assert!(make_lp_split(&g, 1.0, 0.5, 1).is_err());
        assert!(make_lp_split(&g, 0.5, 1.5, 1).is_err());
    }

    #[test]
    fn splits_replay_per_seed() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let a = make_lp_split(&g, 0.4, 0.5, 7).unwrap();
        let b = make_lp_split(&g, 0.4, 0.5, 7).unwrap();
        assert_eq!(a.positives, b.positives);
        assert_eq!(a.negatives, b.negatives);
        let c = make_lp_split(&g, 0.4, 0.5, 8).unwrap();
        assert!(a.positives != c.positives || a.negatives != c.negatives);
    }

    #[test]
    fn split_files_round_trip_the_edge_counts() {
        let dir = tempfile::tempdir().unwrap();
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let s = make_lp_split(&g, 0.4, 0.5, 7).unwrap();
        write_split(&g, &s, dir.path()).unwrap();
        let count_lines = |name: &str| {
            std::fs::read_to_string(dir.path().join(name)).unwrap().lines().count()
        };
        assert_eq!(count_lines("train.txt"), s.train.edge_count());
        assert_eq!(count_lines("positives.txt"), s.positives.len());
        assert_eq!(count_lines("negatives.txt"), s.negatives.len());
        let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(manifest.contains("\"holdout\": 0.4"));
    }
}
