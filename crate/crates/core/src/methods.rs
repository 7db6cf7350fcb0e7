//! Method catalogue: each supported method named, parsed, and resolved to a
//! concrete recipe — which context stream or matrix it consumes, which
//! optimizer fits it, whether one or two vector sets come out, and how the
//! result is scored downstream.

use std::str::FromStr;

use rand::Rng;

use crate::context::{
    estimate_spectral_radius, katz_matrix, netmf_matrix, AdjacencySampler, DanglingPolicy,
    PprConfig, PprSampler, WalkConfig, WalkSampler,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mf::{factorize, factorize_op, KatzOp};
use crate::rng::stream_rng;
use crate::sgns::{train, EmbeddingSet, Matrix, Objective, ScoreMode, TrainConfig};

/// Tail bound for the damped path-count series.
const KATZ_TOL: f64 = 1e-6;
/// Surplus sketch columns for the randomized factorizations.
const OVERSAMPLE: usize = 10;
/// Subspace iterations for the randomized factorizations.
const POWER_ITERS: usize = 4;
/// Walk-length cap for restart walks.
const PPR_MAX_LEN: u32 = 64;
/// Node count up to which the damped path-count matrix is stored explicitly;
/// larger graphs go through the implicit operator, whose reported residual is
/// an estimate but whose factors cost only matrix-vector products.
const EXPLICIT_KATZ_LIMIT: usize = 2000;
/// Fraction of the divergence boundary used when no damping is given:
/// β = 0.5 / ρ̂ keeps the series comfortably convergent on any graph.
const AUTO_BETA_MARGIN: f64 = 0.5;
/// Rng derivation tag for the seeds of the two concatenated half-runs.
const CONCAT_TAG: u64 = 0x0112;

/// Every method the toolkit ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Uniform truncated walks fitted with hierarchical softmax.
    DeepWalk,
    /// Second-order biased walks fitted with split negative sampling.
    Node2vec,
    /// Raw edges fitted with shared-vector negative sampling.
    Line1,
    /// Raw edges fitted with split negative sampling.
    Line2,
    /// Half-dimension Line1 and Line2 runs, normalized and concatenated.
    Line12,
    /// Restart walks fitted with split negative sampling; scored Φ·θ.
    App,
    /// Restart walks fitted with shared-vector negative sampling.
    Verse,
    /// Log-normalized walk-series matrix, factorized. Undirected only.
    NetMf,
    /// Damped path-count matrix, factorized; scored Φ·θ.
    Hope,
    /// Neighbor-label voting baseline; classification only, no embedding.
    MaxVote,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::DeepWalk,
        Method::Node2vec,
        Method::Line1,
        Method::Line2,
        Method::Line12,
        Method::App,
        Method::Verse,
        Method::NetMf,
        Method::Hope,
        Method::MaxVote,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::DeepWalk => "deepwalk",
            Method::Node2vec => "node2vec",
            Method::Line1 => "line1",
            Method::Line2 => "line2",
            Method::Line12 => "line12",
            Method::App => "app",
            Method::Verse => "verse",
            Method::NetMf => "netmf",
            Method::Hope => "hope",
            Method::MaxVote => "maxvote",
        }
    }

    /// Whether the method produces vectors at all (the voting baseline
    /// predicts labels directly).
    pub fn embeds(self) -> bool {
        self != Method::MaxVote
    }

    /// How trained vectors score a candidate edge; `None` for the voting
    /// baseline, which cannot score edges.
    pub fn lp_score_mode(self) -> Option<ScoreMode> {
        match self {
            Method::App | Method::Hope => Some(ScoreMode::SourceContext),
            Method::MaxVote => None,
            _ => Some(ScoreMode::SourceSource),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown method {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Flat hyperparameter bundle covering every method; each recipe reads the
/// fields it understands and ignores the rest.
#[derive(Debug, Clone, Copy)]
pub struct MethodParams {
    /// Embedding dimension.
    pub dim: usize,
    /// Walks started per node, per stream.
    pub walks: u32,
    /// Steps per walk; also the series length of the walk-series matrix.
    pub walk_len: u32,
    /// Co-occurrence window; also the series length of the log-normalized
    /// matrix, where it plays the same role.
    pub window: u32,
    /// Negatives per observed pair.
    pub negatives: u32,
    /// Restart probability of restart walks.
    pub alpha: f64,
    /// Return bias of second-order walks.
    pub p: f64,
    /// In-out bias of second-order walks.
    pub q: f64,
    /// Damping of the path-count series; `None` picks 0.5 / ρ̂.
    pub beta: Option<f64>,
    /// Initial learning rate of the stochastic trainer.
    pub lr: f64,
    /// Passes over the stream.
    pub epochs: u32,
    pub seed: u64,
    /// Worker count; 0 = deterministic single-threaded.
    pub threads: usize,
}

impl Default for MethodParams {
    fn default() -> MethodParams {
        MethodParams {
            dim: 128,
            walks: 10,
            walk_len: 80,
            window: 10,
            negatives: 5,
            alpha: 0.15,
            p: 1.0,
            q: 1.0,
            beta: None,
            lr: 0.025,
            epochs: 1,
            seed: 1,
            threads: 0,
        }
    }
}

impl MethodParams {
    /// Pair budget per stream for recipes without an intrinsic stream length
    /// (edge and restart-walk sampling): one pair per walk step the walk
    /// recipes would take, so all stochastic methods see comparable work.
    fn sample_budget(&self, g: &Graph) -> u64 {
        (self.walks as u64)
            .saturating_mul(self.walk_len as u64)
            .saturating_mul(g.node_count() as u64)
    }

    fn train_config(&self, shared: bool, objective: Objective) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            epochs: self.epochs as usize,
            negatives: self.negatives as usize,
            lr: self.lr,
            shared,
            objective,
            seed: self.seed,
            threads: self.threads,
            ..TrainConfig::default()
        }
    }

    fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            walks_per_node: self.walks,
            walk_len: self.walk_len,
            window: self.window,
            seed: self.seed,
        }
    }
}

/// Train the given method on the graph.
///
/// Stuck walks (a directed node with no outgoing arc) are truncated rather
/// than rejected: split training graphs routinely contain such nodes and the
/// shortened walk still yields usable pairs.
pub fn embed(g: &Graph, method: Method, params: &MethodParams) -> Result<EmbeddingSet> {
    if params.dim == 0 {
        return Err(Error::InvalidConfig("embedding dimension must be positive".into()));
    }
    match method {
        Method::MaxVote => Err(Error::InvalidConfig(
            "maxvote predicts labels from neighbors directly; it has no embedding".into(),
        )),
        Method::DeepWalk => {
            let sampler = WalkSampler::stationary(g, params.walk_config(), DanglingPolicy::Truncate)?;
            let cfg = params.train_config(false, Objective::HierarchicalSoftmax);
            Ok(train(&sampler, g, &cfg)?.embeddings)
        }
        Method::Node2vec => {
            let sampler = WalkSampler::second_order(
                g,
                params.walk_config(),
                params.p,
                params.q,
                DanglingPolicy::Truncate,
            )?;
            let cfg = params.train_config(false, Objective::NegativeSampling);
            Ok(train(&sampler, g, &cfg)?.embeddings)
        }
        Method::Line1 => {
            let sampler = AdjacencySampler::new(g, params.sample_budget(g), params.seed)?;
            let cfg = params.train_config(true, Objective::NegativeSampling);
            Ok(train(&sampler, g, &cfg)?.embeddings)
        }
        Method::Line2 => {
            let sampler = AdjacencySampler::new(g, params.sample_budget(g), params.seed)?;
            let cfg = params.train_config(false, Objective::NegativeSampling);
            Ok(train(&sampler, g, &cfg)?.embeddings)
        }
        Method::Line12 => embed_concat(g, params),
        Method::App => {
            let sampler = ppr_sampler(g, params)?;
            let cfg = params.train_config(false, Objective::NegativeSampling);
            Ok(train(&sampler, g, &cfg)?.embeddings)
        }
        Method::Verse => {
            let sampler = ppr_sampler(g, params)?;
            let cfg = params.train_config(true, Objective::NegativeSampling);
            Ok(train(&sampler, g, &cfg)?.embeddings)
        }
        Method::NetMf => {
            let c = netmf_matrix(g, params.window, params.walk_len, params.negatives)?;
            let r = factorize(&c, params.dim, OVERSAMPLE, POWER_ITERS, params.seed)?;
            Ok(r.embeddings())
        }
        Method::Hope => {
            let beta = match params.beta {
                Some(b) => b,
                None => {
                    let rho = estimate_spectral_radius(g)?;
                    if rho > 0.0 {
                        AUTO_BETA_MARGIN / rho
                    } else {
                        // Nothing diverges on a cycle-free spectrum; weight
                        // all path lengths equally.
                        1.0
                    }
                }
            };
            let r = if g.node_count() <= EXPLICIT_KATZ_LIMIT {
                let c = katz_matrix(g, beta, KATZ_TOL)?;
                factorize(&c, params.dim, OVERSAMPLE, POWER_ITERS, params.seed)?
            } else {
                let op = KatzOp::new(g, beta, KATZ_TOL)?;
                factorize_op(&op, params.dim, OVERSAMPLE, POWER_ITERS, params.seed)?
            };
            Ok(r.embeddings())
        }
    }
}

fn ppr_sampler<'g>(g: &'g Graph, params: &MethodParams) -> Result<PprSampler<'g>> {
    PprSampler::new(
        g,
        PprConfig {
            alpha: params.alpha,
            max_len: PPR_MAX_LEN,
            samples: params.sample_budget(g),
            seed: params.seed,
        },
        DanglingPolicy::Truncate,
    )
}

/// Shared-vector and split half-dimension runs, each row-normalized so both
/// halves contribute equally, glued column-wise. Only the source vectors are
/// kept: the halves' context vectors do not line up into one usable set.
fn embed_concat(g: &Graph, params: &MethodParams) -> Result<EmbeddingSet> {
    if params.dim % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "concatenation needs an even dimension to split in half, got {}",
            params.dim
        )));
    }
    // Distinct derived seeds: the halves must not share initialization or
    // negative draws, or their errors correlate.
    let seeds: Vec<u64> =
        (0..2).map(|i| stream_rng(params.seed, &[CONCAT_TAG, i]).gen()).collect();
    let half = |method, seed| {
        let p = MethodParams { dim: params.dim / 2, seed, ..*params };
        embed(g, method, &p)
    };
    let mut first = half(Method::Line1, seeds[0])?.phi;
    let mut second = half(Method::Line2, seeds[1])?.phi;
    first.l2_normalize_rows();
    second.l2_normalize_rows();
    Ok(EmbeddingSet { phi: first.hconcat(&second), theta: None })
}

/// Feature matrix handed to the classifier: source vectors, with context
/// vectors appended for the methods whose downstream representation is the
/// (Φ, θ) pair.
pub fn nc_features(e: &EmbeddingSet, method: Method) -> Result<Matrix> {
    match method {
        Method::App | Method::Hope => match &e.theta {
            Some(theta) => Ok(e.phi.hconcat(theta)),
            None => Err(Error::InvalidConfig(format!(
                "{} features need context vectors, but none are present",
                method.name()
            ))),
        },
        _ => Ok(e.phi.clone()),
    }
}
