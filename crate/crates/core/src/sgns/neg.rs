//! Negative sampling distribution: degree^0.75, the standard smoothing of
//! context frequency (degree stands in for occurrence count).

use rand::Rng;

use crate::graph::Graph;

/// Exponent flattening the degree distribution.
const SMOOTHING: f64 = 0.75;

/// Floor applied to degrees so isolated nodes keep a vanishing but nonzero
/// probability and the distribution covers every node.
const DEGREE_FLOOR: f64 = 1e-3;

/// Draws nodes with probability proportional to total degree^0.75 via a
/// cumulative table and binary search.
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    pub fn new(g: &Graph) -> NegativeSampler {
        let mut cumulative = Vec::with_capacity(g.node_count());
        let mut acc = 0.0;
        for u in 0..g.node_count() as u32 {
            let d = (g.total_degree(u) as f64).max(DEGREE_FLOOR);
            acc += d.powf(SMOOTHING);
            cumulative.push(acc);
        }
        NegativeSampler { cumulative }
    }

    /// Probability of drawing `u`.
    pub fn probability(&self, u: u32) -> f64 {
        let total = *self.cumulative.last().unwrap();
        let prev = if u == 0 { 0.0 } else { self.cumulative[u as usize - 1] };
        (self.cumulative[u as usize] - prev) / total
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().unwrap();
        let draw = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= draw) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::IdMap;
    use crate::rng::stream_rng;
    use crate::synth;

    #[test]
    fn probabilities_cover_all_nodes_and_sum_to_one() {
        let g = synth::star(4);
        let s = NegativeSampler::new(&g);
        let total: f64 = (0..5).map(|u| s.probability(u)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((0..5).all(|u| s.probability(u) > 0.0));
        // Center degree 4 vs leaf degree 1, smoothed.
        let want = 4f64.powf(0.75);
        assert!((s.probability(0) / s.probability(1) - want).abs() < 1e-12);
    }

    #[test]
    fn isolated_nodes_keep_negligible_mass() {
        // Node 2 has no edges at all.
        let g = Graph::build(false, IdMap::numeric(3), &[(0, 1, 1.0)]).unwrap();
        let s = NegativeSampler::new(&g);
        assert!(s.probability(2) > 0.0);
        assert!(s.probability(2) < 0.01);
    }

    #[test]
    fn sampling_tracks_the_smoothed_degrees() {
        let g = synth::k3_with_pendant();
        let s = NegativeSampler::new(&g);
        let mut rng = stream_rng(11, &[0]);
        let mut counts = [0u64; 4];
        let trials = 400_000;
        for _ in 0..trials {
            counts[s.sample(&mut rng) as usize] += 1;
        }
        for u in 0..4u32 {
            let got = counts[u as usize] as f64 / trials as f64;
            assert!(
                (got - s.probability(u)).abs() < 5e-3,
                "node {u}: {got} vs {}",
                s.probability(u)
            );
        }
    }
}
