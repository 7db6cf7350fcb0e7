//! ROC-AUC as an exact rank statistic, and the link-prediction harness
//! that scores a split with an embedding.

use crate::eval::split::LinkSplit;
use crate::sgns::embedding::{score_pair, EmbeddingSet, ScoreMode};
use crate::{Error, Result};

/// Probability that a random positive outranks a random negative, ties at
/// half credit: (#{p > n} + ½·#{p = n}) / (|pos|·|neg|). Computed by
/// sorting, and ties are counted by exact equality — the symmetric-scorer
/// argument below depends on that.
pub fn roc_auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidConfig(
            "roc_auc needs at least one positive and one negative score".into(),
        ));
    }
    if pos.iter().chain(neg).any(|s| !s.is_finite()) {
        return Err(Error::InvalidConfig("roc_auc scores must be finite".into()));
    }
    let mut sorted = pos.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut wins = 0.0;
    for &n in neg {
        // Positives strictly above n, and positives exactly equal to n.
        let lo = sorted.partition_point(|&p| p < n);
        let hi = sorted.partition_point(|&p| p <= n);
        wins += (sorted.len() - hi) as f64 + 0.5 * (hi - lo) as f64;
    }
    Ok(wins / (pos.len() as f64 * neg.len() as f64))
}

/// Scores a split's positives and negatives with a trained embedding and
/// ranks them.
///
/// When the scorer is symmetric (source-source) and the negatives are the
/// reversals of the positives, score(a,b) = score(b,a) bit for bit, so the
/// positive multiset equals the negative multiset and the statistic is
/// exactly 1/2 — direction is provably invisible to such methods.
pub fn eval_lp(e: &EmbeddingSet, split: &LinkSplit, mode: ScoreMode) -> Result<f64> {
    let score_all = |pairs: &[(u32, u32)]| -> Result<Vec<f64>> {
        pairs.iter().map(|&(u, v)| score_pair(e, u, v, mode)).collect()
    };
    roc_auc(&score_all(&split.positives)?, &score_all(&split.negatives)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    use rand::Rng;

    use crate::eval::split::make_lp_split;
    use crate::rng::stream_rng;
    use crate::sgns::embedding::{init_phi, Matrix};
    use crate::synth;

    #[test]
    fn separated_scores_give_perfect_auc() {
        assert_eq!(roc_auc(&[0.9, 0.8], &[0.1, 0.2]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.1, 0.2], &[0.9, 0.8]).unwrap(), 0.0);
    }

    #[test]
    fn all_ties_give_exactly_half() {
        let auc = roc_auc(&[0.4, 0.4, 0.4], &[0.4, 0.4]).unwrap();
        assert_eq!(auc, 0.5);
    }

    #[test]
    fn partial_ordering_counts_pairs() {
        // Ordered pairs: (0.8,0.5)✓ (0.8,0.1)✓ (0.3,0.5)✗ (0.3,0.1)✓.
        assert_eq!(roc_auc(&[0.8, 0.3], &[0.5, 0.1]).unwrap(), 0.75);
    }

    #[test]
    fn empty_or_non_finite_inputs_are_errors() {
        assert!(roc_auc(&[], &[0.1]).is_err());
        assert!(roc_auc(&[0.1], &[]).is_err());
        assert!(roc_auc(&[f64::NAN], &[0.1]).is_err());
    }

    #[test]
    fn auc_is_invariant_under_monotone_transforms() {
        let mut rng = stream_rng(3, &[0]);
        let pos: Vec<f64> = (0..40).map(|_| rng.gen::<f64>()).collect();
        let neg: Vec<f64> = (0..25).map(|_| rng.gen::<f64>() * 0.9).collect();
        let base = roc_auc(&pos, &neg).unwrap();
        let transforms: [fn(f64) -> f64; 2] = [|x| x.exp(), |x| 3.0 * x - 7.0];
        for f in transforms {
            let map = |v: &[f64]| v.iter().map(|&x| f(x)).collect::<Vec<_>>();
            let t = roc_auc(&map(&pos), &map(&neg)).unwrap();
            assert!((t - base).abs() < 1e-12, "transform changed {base} to {t}");
        }
    }

    #[test]
    fn symmetric_scorer_ties_every_reversal_exactly() {
        // Zero-reciprocity digraph, full-reversal negatives, symmetric
        // scoring: the statistic must be the dyadic 0.5 exactly.
        let g = synth::cycle(40, true);
        let s = make_lp_split(&g, 0.5, 1.0, 2).unwrap();
        assert!(
            s.positives.iter().all(|&(a, b)| s.negatives.contains(&(b, a))),
            "fixture must reverse every positive"
        );
        let e = EmbeddingSet { phi: init_phi(40, 16, 9), theta: None };
        let auc = eval_lp(&e, &s, ScoreMode::SourceSource).unwrap();
        assert_eq!(auc, 0.5);
    }

    #[test]
    fn oracle_embedding_scores_perfectly() {
        // Hand-built vectors: φ_u·θ_v is large for held-out edges, negative
        // for the sampled negatives.
        let g = synth::cycle(6, true);
        let s = make_lp_split(&g, 0.34, 0.5, 4).unwrap();
        let mut phi = Matrix::zeros(6, 6);
        let mut theta = Matrix::zeros(6, 6);
        for u in 0..6u32 {
            phi.row_mut(u)[u as usize] = 1.0;
        }
        for &(u, v) in &s.positives {
            theta.row_mut(v)[u as usize] = 5.0;
        }
        for &(u, v) in &s.negatives {
            theta.row_mut(v)[u as usize] = -5.0;
        }
        let e = EmbeddingSet { phi, theta: Some(theta) };
        assert_eq!(eval_lp(&e, &s, ScoreMode::SourceContext).unwrap(), 1.0);
    }
}
