//! Node label sets, fold assignment, and multi-label F1 tabulation.

use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::graph::{Graph, IdMap};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Rng derivation tag for fold shuffling.
const FOLD_TAG: u64 = 0xf01d;

pub const FOLD_COUNT: usize = 5;

/// Per-node label sets over a dense label universe of size ℓ.
#[derive(Debug, Clone)]
pub struct LabeledNodes {
    /// Dense node id → sorted label ids; empty set = unlabeled node.
    labels: Vec<Vec<u32>>,
    label_ids: IdMap,
}

impl LabeledNodes {
    /// Reads `node_id  label_id` lines (multi-label nodes repeat, repeated
    /// identical lines collapse). Every node must already exist in the
    /// graph's id map.
    pub fn load(path: &Path, g: &Graph) -> Result<LabeledNodes> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut labels = vec![Vec::new(); g.node_count()];
        let mut label_ids = IdMap::new();
        for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { path: path.into(), line: idx + 1, msg };
            let mut toks = trimmed.split_whitespace();
            let (node_tok, label_tok) = match (toks.next(), toks.next(), toks.next()) {
                (Some(n), Some(l), None) => (n, l),
                _ => return Err(parse_err("expected `node_id label_id`".into())),
            };
            let node = g
                .ids()
                .dense(node_tok)
                .ok_or_else(|| parse_err(format!("unknown node {node_tok:?}")))?;
            let label = label_ids.intern(label_tok);
            let set = &mut labels[node as usize];
            if !set.contains(&label) {
                set.push(label);
            }
        }
        if labels.iter().all(|s| s.is_empty()) {
            return Err(Error::InvalidConfig(format!(
                "label file {} labels no node of the graph",
                path.display()
            )));
        }
        for set in &mut labels {
            set.sort_unstable();
        }
        Ok(LabeledNodes { labels, label_ids })
    }

    /// Builds labels directly (tests, synthetic data). `sets[u]` may be
    /// empty for unlabeled nodes.
    pub fn from_sets(sets: Vec<Vec<u32>>, label_count: usize) -> LabeledNodes {
        let mut labels = sets;
        for set in &mut labels {
            set.sort_unstable();
            set.dedup();
            debug_assert!(set.iter().all(|&l| (l as usize) < label_count));
        }
        let mut label_ids = IdMap::new();
        for l in 0..label_count {
            label_ids.intern(&l.to_string());
        }
        LabeledNodes { labels, label_ids }
    }

    /// Number of distinct labels ℓ.
    pub fn label_count(&self) -> usize {
        self.label_ids.len()
    }

    pub fn label_name(&self, label: u32) -> &str {
        self.label_ids.original(label)
    }

    /// Sorted label set of one node (empty when unlabeled).
    pub fn of(&self, node: u32) -> &[u32] {
        &self.labels[node as usize]
    }

    pub fn has_labels(&self, node: u32) -> bool {
        !self.labels[node as usize].is_empty()
    }

    /// Dense ids of all labeled nodes.
    pub fn labeled_nodes(&self) -> Vec<u32> {
        (0..self.labels.len() as u32).filter(|&u| self.has_labels(u)).collect()
    }

    /// Shuffles the labeled nodes and deals them into `FOLD_COUNT` folds of
    /// near-equal size; folds partition the labeled nodes.
    pub fn assign_folds(&self, seed: u64) -> Vec<Vec<u32>> {
        let mut nodes = self.labeled_nodes();
        nodes.shuffle(&mut stream_rng(seed, &[FOLD_TAG]));
        let mut folds = vec![Vec::new(); FOLD_COUNT];
        for (i, u) in nodes.into_iter().enumerate() {
            folds[i % FOLD_COUNT].push(u);
        }
        folds
    }
}

/// Micro- and macro-averaged F1 of predicted label sets against the truth.
/// Micro pools true/false positives globally; macro averages per-label F1
/// over the whole universe, counting labels that never occur as 0.
pub fn f1_scores(
    truth: &LabeledNodes,
    nodes: &[u32],
    predictions: &[Vec<u32>],
) -> (f64, f64) {
    assert_eq!(nodes.len(), predictions.len(), "one prediction set per node");
    let l = truth.label_count();
    let (mut tp, mut fp, mut fn_) = (vec![0u64; l], vec![0u64; l], vec![0u64; l]);
    for (&u, pred) in nodes.iter().zip(predictions) {
        let actual = truth.of(u);
        for &p in pred {
            if actual.contains(&p) {
                tp[p as usize] += 1;
            } else {
                fp[p as usize] += 1;
            }
        }
        for &a in actual {
            if !pred.contains(&a) {
                fn_[a as usize] += 1;
            }
        }
    }
    let (tps, fps, fns) =
        (tp.iter().sum::<u64>(), fp.iter().sum::<u64>(), fn_.iter().sum::<u64>());
    let micro = if tps + fps + fns == 0 {
        0.0
    } else {
        2.0 * tps as f64 / (2 * tps + fps + fns) as f64
    };
    let macro_ = (0..l)
        .map(|i| {
            let denom = 2 * tp[i] + fp[i] + fn_[i];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[i] as f64 / denom as f64
            }
        })
        .sum::<f64>()
        / l as f64;
    (micro, macro_)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::synth;

    fn write_labels(lines: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.txt");
        std::fs::write(&path, lines).unwrap();
        (dir, path)
    }

    #[test]
    fn label_files_parse_with_repeats_and_comments() {
        let g = synth::path(4);
        let (_dir, path) = write_labels("# comment\n0 red\n1 blue\n1 red\n1 blue\n\n3 red\n");
        let lab = LabeledNodes::load(&path, &g).unwrap();
        assert_eq!(lab.label_count(), 2);
        assert_eq!(lab.of(0), &[lab.label_ids.dense("red").unwrap()]);
        assert_eq!(lab.of(1).len(), 2, "repeat collapsed");
        assert!(!lab.has_labels(2));
        assert_eq!(lab.labeled_nodes(), vec![0, 1, 3]);
    }

    #[test]
    fn unknown_nodes_and_malformed_lines_are_errors() {
        let g = synth::path(3);
        let (_dir, path) = write_labels("9 red\n");
        assert!(matches!(LabeledNodes::load(&path, &g), Err(Error::Parse { .. })));
        let (_dir, path) = write_labels("0 red extra\n");
        assert!(matches!(LabeledNodes::load(&path, &g), Err(Error::Parse { .. })));
        let (_dir, path) = write_labels("# nothing\n");
        assert!(LabeledNodes::load(&path, &g).is_err());
    }

    #[test]
    fn folds_partition_the_labeled_nodes() {
        let sets: Vec<Vec<u32>> = (0..23).map(|u| if u % 3 == 0 { vec![] } else { vec![0] }).collect();
        let lab = LabeledNodes::from_sets(sets, 1);
        let folds = lab.assign_folds(4);
        assert_eq!(folds.len(), FOLD_COUNT);
        let mut all: Vec<u32> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, lab.labeled_nodes());
        let sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(folds, lab.assign_folds(4), "fold assignment replays");
        assert_ne!(folds, lab.assign_folds(5));
    }

    #[test]
    fn perfect_predictions_score_one() {
        let lab = LabeledNodes::from_sets(vec![vec![0], vec![1], vec![0, 1]], 2);
        let nodes = [0u32, 1, 2];
        let preds = vec![vec![0], vec![1], vec![0, 1]];
        let (micro, macro_) = f1_scores(&lab, &nodes, &preds);
        assert_eq!((micro, macro_), (1.0, 1.0));
    }

    #[test]
    fn tabulated_example_matches_hand_computation() {
        // Truth A, B; predicted A, A: micro 0.5, macro (2/3 + 0)/2 = 1/3.
        let lab = LabeledNodes::from_sets(vec![vec![0], vec![1]], 2);
        let (micro, macro_) = f1_scores(&lab, &[0, 1], &[vec![0], vec![0]]);
        assert!((micro - 0.5).abs() < 1e-12);
        assert!((macro_ - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn scores_are_invariant_to_node_order() {
        let lab =
            LabeledNodes::from_sets(vec![vec![0], vec![1], vec![0, 1], vec![1]], 2);
        let nodes = [0u32, 1, 2, 3];
        let preds = vec![vec![0], vec![0], vec![1], vec![1]];
        let fwd = f1_scores(&lab, &nodes, &preds);
        let rev_nodes: Vec<u32> = nodes.iter().rev().copied().collect();
        let rev_preds: Vec<Vec<u32>> = preds.iter().rev().cloned().collect();
        let rev = f1_scores(&lab, &rev_nodes, &rev_preds);
        assert_eq!(fwd, rev);
    }

    #[test]
    fn single_label_micro_equals_accuracy() {
        let lab = LabeledNodes::from_sets(vec![vec![0], vec![1], vec![0], vec![1]], 2);
        let preds = vec![vec![0], vec![0], vec![0], vec![1]];
        let (micro, _) = f1_scores(&lab, &[0, 1, 2, 3], &preds);
        assert!((micro - 0.75).abs() < 1e-12, "3 of 4 correct");
    }
}
