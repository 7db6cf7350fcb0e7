//! Majority-vote label baseline: no embedding, just neighbor tallies.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::labels::{f1_scores, LabeledNodes};
use crate::graph::Graph;
use crate::rng::stream_rng;

/// Rng derivation tags: 80/20 split shuffle, random label fill.
const SPLIT80_TAG: u64 = 0x8020;
const FILL_TAG: u64 = 0xf111;

/// Predicts each test node's labels as the k most frequent labels among its
/// labeled non-test neighbors (undirected adjacency, k = true label count).
/// Frequency ties break toward the smaller label id; when fewer than k
/// labels were tallied, the rest are drawn uniformly, without replacement,
/// from the unused classes.
pub fn max_vote_predict(
    g: &Graph,
    truth: &LabeledNodes,
    test_nodes: &[u32],
    seed: u64,
) -> Vec<Vec<u32>> {
    let und = g.undirected_view();
    let test_set: HashSet<u32> = test_nodes.iter().copied().collect();
    let l = truth.label_count() as u32;
    let mut rng = stream_rng(seed, &[FILL_TAG]);
    test_nodes
        .iter()
        .map(|&v| {
            let mut counts: HashMap<u32, u32> = HashMap::new();
            for &u in und.out_neighbors(v) {
                if !test_set.contains(&u) {
                    for &lab in truth.of(u) {
                        *counts.entry(lab).or_insert(0) += 1;
                    }
                }
            }
            let mut tallied: Vec<(u32, u32)> = counts.into_iter().collect();
            tallied.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let k = truth.of(v).len();
            let mut chosen: Vec<u32> =
                tallied.into_iter().take(k).map(|(lab, _)| lab).collect();
            if chosen.len() < k {
                let mut remaining: Vec<u32> =
                    (0..l).filter(|lab| !chosen.contains(lab)).collect();
                while chosen.len() < k && !remaining.is_empty() {
                    let i = rng.gen_range(0..remaining.len());
                    chosen.push(remaining.swap_remove(i));
                }
            }
            chosen
        })
        .collect()
}

/// Full protocol: shuffle the labeled nodes, hold out 20% as the test set,
/// vote with the remaining 80%, and tabulate micro/macro F1.
pub fn max_vote_eval(g: &Graph, truth: &LabeledNodes, seed: u64) -> (f64, f64) {
    let mut labeled = truth.labeled_nodes();
    labeled.shuffle(&mut stream_rng(seed, &[SPLIT80_TAG]));
    let test_count = (labeled.len() / 5).max(1);
    let test = &labeled[labeled.len() - test_count..];
    let predictions = max_vote_predict(g, truth, test, seed);
    f1_scores(truth, test, &predictions)
}
