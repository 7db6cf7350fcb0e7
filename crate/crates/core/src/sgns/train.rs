//! SGD training loop over context-pair streams.
//!
//! One engine serves both objectives (negative sampling, hierarchical
//! softmax) and both execution modes: a deterministic single-worker loop,
//! and an asynchronous multi-worker loop where updates race on the shared
//! parameter block and the convergence contract is statistical rather than
//! bitwise.

use rand_chacha::ChaCha8Rng;

use crate::context::ContextSampler;
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::sgns::embedding::{dot_f32, init_phi, EmbeddingSet, Matrix};
use crate::sgns::hsoftmax::HuffmanTree;
use crate::sgns::loss::sigmoid;
use crate::sgns::neg::NegativeSampler;
use crate::{Error, Result};

/// Rng derivation tag for negative drawing.
const NEG_TAG: u64 = 0x06e9;

/// How the (source, context) affinity is normalized during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Sigmoid contrast against `negatives` draws from the smoothed degree
    /// distribution.
    NegativeSampling,
    /// Softmax over all nodes, factored along a degree-keyed Huffman tree.
    HierarchicalSoftmax,
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    /// Negatives drawn per pair (negative-sampling objective only).
    pub negatives: usize,
    /// Initial learning rate; decays linearly over each worker's budget.
    pub lr: f64,
    /// Learning-rate floor.
    pub lr_min: f64,
    /// Learn a single vector set: contexts reuse the source vectors.
    pub shared: bool,
    pub objective: Objective,
    pub seed: u64,
    /// Worker count; 0 (or 1) selects the deterministic single-worker loop.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            dim: 128,
            epochs: 1,
            negatives: 5,
            lr: 0.025,
            lr_min: 1e-4,
            shared: false,
            objective: Objective::NegativeSampling,
            seed: 1,
            threads: 0,
        }
    }
}

/// Trained vectors plus the mean pair loss per epoch.
pub struct TrainOutput {
    pub embeddings: EmbeddingSet,
    pub epoch_losses: Vec<f64>,
}

/// Unsynchronized row access to a shared parameter matrix. Workers may race
/// on overlapping rows; the training contract tolerates lost or torn
/// updates, so plain aliased writes are acceptable here.
struct RawMat {
    ptr: *mut f32,
    dim: usize,
}

unsafe impl Send for RawMat {}
unsafe impl Sync for RawMat {}

impl RawMat {
    fn of(m: &mut Matrix) -> RawMat {
        RawMat { ptr: m.data_mut().as_mut_ptr(), dim: m.dim() }
    }

    /// Safety: `i` must be a valid row; the backing matrix must outlive the
    /// returned slice and must not be moved meanwhile.
    #[allow(clippy::mut_from_ref)]
    unsafe fn row(&self, i: u32) -> &mut [f32] {
        std::slice::from_raw_parts_mut(self.ptr.add(i as usize * self.dim), self.dim)
    }
}

/// Per-objective state shared by all workers.
enum ObjectiveState {
    Ns { sampler: NegativeSampler, k: usize },
    Hs { tree: HuffmanTree },
}

/// Scratch buffers reused across pairs by one worker.
struct Scratch {
    /// Source row as it stood when the pair started; all dot products and
    /// context-side updates read this frozen copy, so aliasing between the
    /// source row and a context row (shared mode, self-pairs) cannot feed a
    /// half-updated vector back into the same pair.
    snap: Vec<f32>,
    /// Accumulated source-side gradient, applied once after the contrast
    /// loop.
    neu1e: Vec<f64>,
    negatives: Vec<u32>,
}

impl Scratch {
    fn new(dim: usize) -> Scratch {
        Scratch { snap: vec![0.0; dim], neu1e: vec![0.0; dim], negatives: Vec::new() }
    }
}

/// One negative-sampling update. `label` 1 pulls the pair together, 0 pushes
/// apart. Returns the summed pair loss, or `None` when a raw affinity is no
/// longer finite (the sigmoid clamp would otherwise mask the blow-up).
///
/// Safety: as for [`RawMat::row`]; `phi` and `ctx` may alias.
unsafe fn ns_update(
    phi: &RawMat,
    ctx: &RawMat,
    source: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
    s: &mut Scratch,
) -> Option<f64> {
    let src = phi.row(source);
    s.snap.copy_from_slice(src);
    s.neu1e.iter_mut().for_each(|v| *v = 0.0);
    let mut loss = 0.0;
    for (target, label) in std::iter::once((context, 1.0))
        .chain(negatives.iter().map(|&n| (n, 0.0)))
    {
        let row = ctx.row(target);
        let f = dot_f32(&s.snap, row);
        if !f.is_finite() {
            return None;
        }
        let p = sigmoid(f);
        loss -= if label == 1.0 { p.ln() } else { (1.0 - p).ln() };
        let g = (label - p) * lr;
        for (acc, &v) in s.neu1e.iter_mut().zip(row.iter()) {
            *acc += g * v as f64;
        }
        for (v, &snap) in row.iter_mut().zip(&s.snap) {
            *v += (g * snap as f64) as f32;
        }
    }
    let src = phi.row(source);
    for (v, &d) in src.iter_mut().zip(&s.neu1e) {
        *v += d as f32;
    }
    Some(loss)
}

/// One hierarchical-softmax update: walk the context leaf's root path,
/// nudging each branch vector toward the recorded bit. Same return and
/// safety contract as [`ns_update`].
unsafe fn hs_update(
    phi: &RawMat,
    psi: &RawMat,
    tree: &HuffmanTree,
    source: u32,
    context: u32,
    lr: f64,
    s: &mut Scratch,
) -> Option<f64> {
    let src = phi.row(source);
    s.snap.copy_from_slice(src);
    s.neu1e.iter_mut().for_each(|v| *v = 0.0);
    let (points, bits) = tree.path(context);
    let mut loss = 0.0;
    for (&t, &b) in points.iter().zip(bits) {
        let row = psi.row(t);
        let f = dot_f32(&s.snap, row);
        if !f.is_finite() {
            return None;
        }
        let p = sigmoid(f);
        loss -= if b == 1 { p.ln() } else { (1.0 - p).ln() };
        let g = (b as f64 - p) * lr;
        for (acc, &v) in s.neu1e.iter_mut().zip(row.iter()) {
            *acc += g * v as f64;
        }
        for (v, &snap) in row.iter_mut().zip(&s.snap) {
            *v += (g * snap as f64) as f32;
        }
    }
    let src = phi.row(source);
    for (v, &d) in src.iter_mut().zip(&s.neu1e) {
        *v += d as f32;
    }
    Some(loss)
}

/// Single-pair negative-sampling step against plain matrices; used to pin
/// the update rule to the f64 reference gradient.
#[cfg(test)]
pub(crate) fn ns_step(
    phi: &mut Matrix,
    theta: &mut Matrix,
    source: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
) -> Option<f64> {
    let mut s = Scratch::new(phi.dim());
    let phi = RawMat::of(phi);
    let theta = RawMat::of(theta);
    unsafe { ns_update(&phi, &theta, source, context, negatives, lr, &mut s) }
}

/// Runs one worker across all its epochs; returns (loss sum, pair count)
/// per epoch. `worker_count` fixes the stream-id layout, so the sequential
/// loop is exactly the one-worker instance of this function.
fn run_worker(
    sampler: &dyn ContextSampler,
    phi: &RawMat,
    ctx: &RawMat,
    obj: &ObjectiveState,
    cfg: &TrainConfig,
    worker: u64,
    worker_count: u64,
) -> Result<Vec<(f64, u64)>> {
    let budget = (cfg.epochs as u64 * sampler.pairs_per_stream()).max(1);
    let mut s = Scratch::new(cfg.dim);
    let mut processed = 0u64;
    let mut per_epoch = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs as u64 {
        let stream_id = epoch * worker_count + worker;
        let mut neg_rng: ChaCha8Rng = stream_rng(cfg.seed, &[NEG_TAG, stream_id]);
        let (mut loss_sum, mut count) = (0.0, 0u64);
        for pair in sampler.stream(stream_id) {
            let frac = processed as f64 / budget as f64;
            let lr = (cfg.lr * (1.0 - frac)).max(cfg.lr_min);
            let stepped = unsafe {
                match obj {
                    ObjectiveState::Ns { sampler: neg, k } => {
                        s.negatives.clear();
                        for _ in 0..*k {
                            let n = neg.sample(&mut neg_rng);
                            if n != pair.context {
                                s.negatives.push(n);
                            }
                        }
                        let negs = std::mem::take(&mut s.negatives);
                        let r = ns_update(phi, ctx, pair.source, pair.context, &negs, lr, &mut s);
                        s.negatives = negs;
                        r
                    }
                    ObjectiveState::Hs { tree } => {
                        hs_update(phi, ctx, tree, pair.source, pair.context, lr, &mut s)
                    }
                }
            };
            match stepped {
                Some(loss) => loss_sum += loss,
                None => return Err(Error::NonFinite { step: processed, lr }),
            }
            processed += 1;
            count += 1;
        }
        per_epoch.push((loss_sum, count));
    }
    Ok(per_epoch)
}

/// Trains source (and, unless shared, context) vectors against the pairs a
/// sampler emits. With `threads <= 1` the result is bit-reproducible for a
/// fixed seed; with more workers, updates race and only the statistical
/// quality of the embedding is guaranteed.
pub fn train(sampler: &dyn ContextSampler, g: &Graph, cfg: &TrainConfig) -> Result<TrainOutput> {
    if cfg.dim == 0 {
        return Err(Error::InvalidConfig("embedding dimension must be positive".into()));
    }
    if !(cfg.lr.is_finite() && cfg.lr > 0.0) || !(cfg.lr_min > 0.0 && cfg.lr_min <= cfg.lr) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < lr_min <= lr, got lr {} lr_min {}",
            cfg.lr, cfg.lr_min
        )));
    }
    if cfg.objective == Objective::NegativeSampling && cfg.negatives == 0 {
        return Err(Error::InvalidConfig(
            "negative sampling needs at least one negative per pair".into(),
        ));
    }
    if cfg.objective == Objective::HierarchicalSoftmax && cfg.shared {
        return Err(Error::InvalidConfig(
            "hierarchical softmax trains branch vectors, not context vectors; \
             it cannot share them with the source side"
                .into(),
        ));
    }
    let n = g.node_count();
    if sampler.node_count() != n {
        return Err(Error::DimMismatch(format!(
            "sampler covers {} nodes, graph has {n}",
            sampler.node_count()
        )));
    }

    let mut phi = init_phi(n, cfg.dim, cfg.seed);
    // Context-side block: θ for negative sampling (or Φ itself when shared),
    // branch vectors ψ for hierarchical softmax. Zero-initialized either way.
    let (mut ctx_block, obj) = match cfg.objective {
        Objective::NegativeSampling => (
            if cfg.shared { None } else { Some(Matrix::zeros(n, cfg.dim)) },
            ObjectiveState::Ns { sampler: NegativeSampler::new(g), k: cfg.negatives },
        ),
        Objective::HierarchicalSoftmax => {
            let degrees: Vec<u64> =
                (0..n as u32).map(|u| g.total_degree(u) as u64).collect();
            let tree = HuffmanTree::from_degrees(&degrees);
            (
                Some(Matrix::zeros(tree.internal_count(), cfg.dim)),
                ObjectiveState::Hs { tree },
            )
        }
    };

    let epoch_losses = {
        let phi_raw = RawMat::of(&mut phi);
        let ctx_raw = match ctx_block.as_mut() {
            Some(m) => RawMat::of(m),
            None => RawMat { ptr: phi_raw.ptr, dim: phi_raw.dim },
        };
        let workers = cfg.threads.max(1) as u64;
        let mut per_epoch = vec![(0.0, 0u64); cfg.epochs];
        if workers <= 1 {
            for (e, r) in run_worker(sampler, &phi_raw, &ctx_raw, &obj, cfg, 0, 1)?
                .into_iter()
                .enumerate()
            {
                per_epoch[e] = r;
            }
        } else {
            let results: Vec<Result<Vec<(f64, u64)>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        let (phi_raw, ctx_raw, obj) = (&phi_raw, &ctx_raw, &obj);
                        scope.spawn(move || {
                            run_worker(sampler, phi_raw, ctx_raw, obj, cfg, w, workers)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            });
            for r in results {
                for (e, (sum, count)) in r?.into_iter().enumerate() {
                    per_epoch[e].0 += sum;
                    per_epoch[e].1 += count;
                }
            }
        }
        per_epoch
            .into_iter()
            .map(|(sum, count)| sum / count.max(1) as f64)
            .collect()
    };

    let theta = match cfg.objective {
        Objective::NegativeSampling => ctx_block,
        // Branch vectors are an internal device of the softmax; they are not
        // node representations and are dropped.
        Objective::HierarchicalSoftmax => None,
    };
    Ok(TrainOutput {
        embeddings: EmbeddingSet { phi, theta },
        epoch_losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::context::{DanglingPolicy, WalkConfig, WalkSampler};
    use crate::sgns::loss::sgns_grad;
    use crate::synth;

    fn walk_sampler(g: &Graph, seed: u64) -> WalkSampler<'_> {
        let cfg = WalkConfig { walks_per_node: 4, walk_len: 10, window: 3, seed };
        WalkSampler::stationary(g, cfg, DanglingPolicy::Error).unwrap()
    }

    fn small_cfg(seed: u64) -> TrainConfig {
        TrainConfig { dim: 16, epochs: 1, seed, ..TrainConfig::default() }
    }

    #[test]
    fn zero_epochs_returns_the_exact_initialization() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let sampler = walk_sampler(&g, 3);
        let cfg = TrainConfig { epochs: 0, ..small_cfg(7) };
        let out = train(&sampler, &g, &cfg).unwrap();
        assert_eq!(out.epoch_losses.len(), 0);
        assert_eq!(out.embeddings.phi, init_phi(10, 16, 7));
        let theta = out.embeddings.theta.unwrap();
        assert!(theta.data().iter().all(|&v| v == 0.0));

        let shared = TrainConfig { shared: true, epochs: 0, ..small_cfg(7) };
        let out = train(&sampler, &g, &shared).unwrap();
        assert!(out.embeddings.theta.is_none());
    }

    #[test]
    fn single_worker_training_is_bit_reproducible() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let sampler = walk_sampler(&g, 3);
        let cfg = TrainConfig { epochs: 2, ..small_cfg(11) };
        let a = train(&sampler, &g, &cfg).unwrap();
        let b = train(&sampler, &g, &cfg).unwrap();
        assert_eq!(a.embeddings.phi, b.embeddings.phi);
        assert_eq!(
            a.embeddings.theta.as_ref().unwrap().data(),
            b.embeddings.theta.as_ref().unwrap().data()
        );
        assert_eq!(a.epoch_losses, b.epoch_losses);

        let other = train(&sampler, &g, &TrainConfig { epochs: 2, ..small_cfg(12) }).unwrap();
        assert_ne!(a.embeddings.phi, other.embeddings.phi);
    }

    #[test]
    fn update_step_matches_the_reference_gradient() {
        // Apply one step with the production f32 routine and with the f64
        // reference gradient; they must agree to f32 rounding.
        let dim = 8;
        let mut phi = init_phi(4, dim, 5);
        for v in phi.data_mut() {
            *v *= 30.0; // lift values to O(1) so relative error is meaningful
        }
        let mut theta = init_phi(4, dim, 6);
        for v in theta.data_mut() {
            *v *= 30.0;
        }
        let lr = 0.3;
        let (source, context, negatives) = (0u32, 1u32, [2u32, 3]);

        let to64 = |r: &[f32]| r.iter().map(|&v| v as f64).collect::<Vec<f64>>();
        let p = to64(phi.row(source));
        let t = to64(theta.row(context));
        let negs: Vec<Vec<f64>> = negatives.iter().map(|&n| to64(theta.row(n))).collect();
        let (dp, dt, dn) = sgns_grad(&p, &t, &negs);

        ns_step(&mut phi, &mut theta, source, context, &negatives, lr).unwrap();

        for k in 0..dim {
            let want = p[k] - lr * dp[k];
            assert!((phi.row(source)[k] as f64 - want).abs() < 1e-4, "phi[{k}]");
            let want = t[k] - lr * dt[k];
            assert!((theta.row(context)[k] as f64 - want).abs() < 1e-4, "theta_j[{k}]");
            for (i, &n) in negatives.iter().enumerate() {
                let want = negs[i][k] - lr * dn[i][k];
                assert!((theta.row(n)[k] as f64 - want).abs() < 1e-4, "neg {i}[{k}]");
            }
        }
    }

    #[test]
    fn runaway_learning_rate_is_reported_not_masked() {
        // The sigmoid clamp keeps every pair loss finite even when rows
        // overflow, so the blow-up check must look at raw affinities.
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let sampler = walk_sampler(&g, 3);
        let cfg = TrainConfig { lr: 1e308, lr_min: 1e-4, ..small_cfg(1) };
        match train(&sampler, &g, &cfg) {
            Err(Error::NonFinite { step, lr }) => {
                assert!(lr > 0.0);
                assert!(step < 10_000, "blow-up detected late: step {step}");
            }
            other => panic!("expected NonFinite, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn loss_decreases_over_epochs_for_most_seeds() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let mut better = 0;
        for seed in 0..5 {
            let sampler = walk_sampler(&g, seed);
            let cfg = TrainConfig { epochs: 5, ..small_cfg(seed) };
            let out = train(&sampler, &g, &cfg).unwrap();
            if out.epoch_losses[4] < out.epoch_losses[0] {
                better += 1;
            }
        }
        assert!(better >= 3, "loss fell for only {better}/5 seeds");
    }

    /// Mean within-clique vs across-clique source-side affinity.
    fn clique_margin(phi: &Matrix, k: u32) -> (f64, f64) {
        let (mut intra, mut inter) = (Vec::new(), Vec::new());
        for u in 0..2 * k {
            for v in (u + 1)..2 * k {
                let d = dot_f32(phi.row(u), phi.row(v));
                if (u < k) == (v < k) {
                    intra.push(d);
                } else {
                    inter.push(d);
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        (mean(&intra), mean(&inter))
    }

    #[test]
    fn cliques_separate_under_negative_sampling() {
        let g = synth::two_cliques(4);
        for seed in 0..5 {
            let sampler = walk_sampler(&g, seed);
            let cfg = TrainConfig { epochs: 5, ..small_cfg(seed) };
            let out = train(&sampler, &g, &cfg).unwrap();
            let (intra, inter) = clique_margin(&out.embeddings.phi, 4);
            assert!(
                intra > inter,
                "seed {seed}: intra {intra:.4} <= inter {inter:.4}"
            );
        }
    }

    #[test]
    fn cliques_separate_under_hierarchical_softmax() {
        let g = synth::two_cliques(4);
        for seed in 0..5 {
            let sampler = walk_sampler(&g, seed);
            let cfg = TrainConfig {
                epochs: 5,
                objective: Objective::HierarchicalSoftmax,
                ..small_cfg(seed)
            };
            let out = train(&sampler, &g, &cfg).unwrap();
            assert!(out.embeddings.theta.is_none(), "branch vectors must not leak");
            let (intra, inter) = clique_margin(&out.embeddings.phi, 4);
            assert!(
                intra > inter,
                "seed {seed}: intra {intra:.4} <= inter {inter:.4}"
            );
        }
    }

    #[test]
    fn shared_mode_returns_a_single_vector_set() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let sampler = walk_sampler(&g, 3);
        let cfg = TrainConfig { shared: true, ..small_cfg(5) };
        let out = train(&sampler, &g, &cfg).unwrap();
        assert!(out.embeddings.theta.is_none());
        // Training moved the vectors away from the initialization.
        assert_ne!(out.embeddings.phi, init_phi(10, 16, 5));
    }

    #[test]
    fn racy_workers_still_separate_the_cliques() {
        let g = synth::two_cliques(4);
        let sampler = walk_sampler(&g, 2);
        let cfg = TrainConfig { epochs: 5, threads: 4, ..small_cfg(2) };
        let out = train(&sampler, &g, &cfg).unwrap();
        assert_eq!(out.epoch_losses.len(), 5);
        assert!(out.epoch_losses.iter().all(|l| l.is_finite()));
        let (intra, inter) = clique_margin(&out.embeddings.phi, 4);
        assert!(intra > inter, "intra {intra:.4} <= inter {inter:.4}");
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        let g = synth::erdos_renyi(10, 0.35, false, synth::ER10_SEED);
        let sampler = walk_sampler(&g, 3);
        let bad = [
            TrainConfig { dim: 0, ..TrainConfig::default() },
            TrainConfig { negatives: 0, ..TrainConfig::default() },
            TrainConfig { lr: 0.0, ..TrainConfig::default() },
            TrainConfig { lr_min: 0.0, ..TrainConfig::default() },
            TrainConfig { lr_min: 1.0, lr: 0.025, ..TrainConfig::default() },
            TrainConfig {
                objective: Objective::HierarchicalSoftmax,
                shared: true,
                ..TrainConfig::default()
            },
        ];
        for cfg in bad {
            assert!(
                matches!(train(&sampler, &g, &cfg), Err(Error::InvalidConfig(_))),
                "accepted {cfg:?}"
            );
        }
        let other = synth::path(5);
        let mismatched = walk_sampler(&other, 3);
        assert!(matches!(
            train(&mismatched, &g, &TrainConfig::default()),
            Err(Error::DimMismatch(_))
        ));
    }
}
