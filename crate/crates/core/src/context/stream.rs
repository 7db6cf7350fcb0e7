//! The pair stream interface shared by every sampling recipe.
//!
//! Each embedding method boils down to a distribution over (source, context)
//! node pairs. Samplers expose that distribution as replayable streams: the
//! same `stream_id` always yields the same sequence, and distinct ids yield
//! statistically independent sequences, which is what both epoch loops and
//! parallel trainers need.

use crate::Result;

/// One observed co-occurrence: `context` appeared near `source`.
///
/// `weight` scales the learning-rate for this pair. Sampled streams emit 1.0
/// and let frequency carry the weighting; it exists so closed-form recipes
/// can be replayed through the same trainer if needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextPair {
    pub source: u32,
    pub context: u32,
    pub weight: f64,
}

impl ContextPair {
    pub fn new(source: u32, context: u32) -> Self {
        ContextPair { source, context, weight: 1.0 }
    }
}

/// A replayable source of context pairs over a fixed node set.
///
/// Implementations derive all randomness from their own seed combined with
/// `stream_id`, so any stream can be regenerated independently of the others.
pub trait ContextSampler: Sync {
    /// Number of nodes pairs are drawn over; node ids are `0..node_count`.
    fn node_count(&self) -> usize;

    /// Expected pair count of one stream, used to size learning-rate decay.
    fn pairs_per_stream(&self) -> u64;

    /// The pair sequence for `stream_id`. Calling twice with the same id
    /// yields the same sequence.
    fn stream(&self, stream_id: u64) -> Box<dyn Iterator<Item = ContextPair> + Send + '_>;
}

/// Tallies a stream into an ordered-pair frequency matrix (row-major, n x n).
///
/// Used by verification routines to compare empirical samplers against
/// closed-form expectations.
pub fn pair_frequencies(sampler: &dyn ContextSampler, stream_id: u64) -> Result<Vec<f64>> {
    let n = sampler.node_count();
    let mut counts = vec![0u64; n * n];
    let mut total = 0u64;
    for pair in sampler.stream(stream_id) {
        counts[pair.source as usize * n + pair.context as usize] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(crate::Error::InvalidConfig(
            "sampler produced an empty stream".into(),
        ));
    }
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

/// Largest absolute entry difference between two matrices of equal shape.
pub fn linf_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "shape mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Total variation distance between two distributions stored as flat tables.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "shape mismatch");
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Vec<ContextPair>);

    impl ContextSampler for Fixed {
        fn node_count(&self) -> usize {
            2
        }
        fn pairs_per_stream(&self) -> u64 {
            self.0.len() as u64
        }
        fn stream(&self, _id: u64) -> Box<dyn Iterator<Item = ContextPair> + Send + '_> {
            Box::new(self.0.iter().copied())
        }
    }

    #[test]
    fn frequencies_normalize_counts() {
        let s = Fixed(vec![
            ContextPair::new(0, 1),
            ContextPair::new(0, 1),
            ContextPair::new(1, 0),
            ContextPair::new(1, 1),
        ]);
        let f = pair_frequencies(&s, 0).unwrap();
        assert_eq!(f, vec![0.0, 0.5, 0.25, 0.25]);
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert!(pair_frequencies(&Fixed(vec![]), 0).is_err());
    }

    #[test]
    fn gap_measures_are_zero_on_identical_tables() {
        let t = vec![0.25, 0.75];
        assert_eq!(linf_gap(&t, &t), 0.0);
        assert_eq!(total_variation(&t, &t), 0.0);
        let u = vec![0.5, 0.5];
        assert!((linf_gap(&t, &u) - 0.25).abs() < 1e-15);
        assert!((total_variation(&t, &u) - 0.25).abs() < 1e-15);
    }
}
