//! Command-line interface: one binary, one task per run.
//!
//! Every run resolves its full configuration, executes a single task, and
//! writes a deterministic `report.txt` plus a `report.json` carrying the
//! resolved configuration, into the output directory. The text body is the
//! reproducibility surface: with a fixed seed and `--threads 0` it is
//! byte-identical across runs.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::context::oracle::{expected_cooccurrence, expected_ppr_pairs, ExactWindowSampler};
use crate::context::stream::{linf_gap, pair_frequencies, total_variation};
use crate::context::walks::{
    first_order_distribution, second_order_biases, second_order_distribution,
};
use crate::context::{DanglingPolicy, PprConfig, PprSampler};
use crate::error::{Error, Result};
use crate::eval::{
    eval_lp, make_lp_split, max_vote_eval, nc_cross_validate, write_split, LabeledNodes,
    DEFAULT_LAMBDA, FOLD_COUNT,
};
use crate::graph::Graph;
use crate::methods::{embed, nc_features, Method, MethodParams};
use crate::profile::profile;
use crate::report::Report;
use crate::sgns::{context_path, write_embeddings};
use crate::synth;

/// Monte-Carlo draws for the windowed-pair verification.
const VERIFY_FINE_SAMPLES: u64 = 1_000_000;
/// Smaller draw demonstrating that the gap shrinks with sample count.
const VERIFY_COARSE_SAMPLES: u64 = 10_000;
/// Monte-Carlo draws per restart rate for the restart-pair verification.
const VERIFY_PPR_SAMPLES: u64 = 1_000_000;
/// Walk-length cap shared by the restart sampler and its closed form.
const VERIFY_PPR_MAX_LEN: u32 = 64;
/// Largest admissible windowed-pair frequency gap.
const VERIFY_LINF_TOL: f64 = 0.01;
/// Largest admissible restart-pair total-variation distance.
const VERIFY_TV_TOL: f64 = 0.01;
/// Largest admissible asymmetry of the symmetric closed form.
const VERIFY_ASYM_TOL: f64 = 1e-12;

/// What a run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Structural profile of the input graph.
    Stats,
    /// Link-prediction edge split written to disk.
    Split,
    /// Train one method and write its vectors.
    Embed,
    /// Split, train on the residual graph, report ROC-AUC.
    EvalLp,
    /// Five-fold multi-label classification, report micro/macro F1.
    EvalNc,
    /// Samplers vs closed forms; fails on any tolerance breach.
    Verify,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Stats => "stats",
            Task::Split => "split",
            Task::Embed => "embed",
            Task::EvalLp => "eval-lp",
            Task::EvalNc => "eval-nc",
            Task::Verify => "verify",
        }
    }
}

/// Benchmark harness for unsupervised node embeddings: seven methods over
/// one context-pair abstraction, plus the protocols that compare them.
#[derive(Parser, Debug, Clone)]
#[command(name = "ctxembed", version)]
pub struct Args {
    /// What to run.
    #[arg(long, value_enum)]
    pub task: Task,

    /// Method to train or evaluate (embed, eval-lp, eval-nc).
    #[arg(long)]
    pub method: Option<Method>,

    /// Edge-list file: `src dst [weight]` per line, `#`/`%` comments.
    #[arg(long)]
    pub input: PathBuf,

    /// Treat edges as directed (the file format carries no orientation).
    #[arg(long)]
    pub directed: bool,

    /// Label file for eval-nc: `node label` per line, repeats allowed.
    #[arg(long)]
    pub labels: Option<PathBuf>,

    /// Embedding dimension.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,

    /// Walks started per node.
    #[arg(long, default_value_t = 10)]
    pub walks: u32,

    /// Steps per walk.
    #[arg(long, default_value_t = 80)]
    pub walk_len: u32,

    /// Co-occurrence window radius.
    #[arg(long, default_value_t = 10)]
    pub window: u32,

    /// Negative samples per observed pair.
    #[arg(long, default_value_t = 5)]
    pub neg: u32,

    /// Restart probability of restart-walk methods.
    #[arg(long, default_value_t = 0.15)]
    pub alpha: f64,

    /// Return bias of second-order walks.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,

    /// In-out bias of second-order walks.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,

    /// Damping of the path-count series (default: half the divergence
    /// boundary, from the estimated spectral radius).
    #[arg(long)]
    pub beta: Option<f64>,

    /// Fraction of edges held out as test positives.
    #[arg(long, default_value_t = 0.5)]
    pub holdout: f64,

    /// Fraction of test negatives built by reversing positives.
    #[arg(long, default_value_t = 1.0)]
    pub reversal: f64,

    /// Classification fold count (the shipped protocol is 5-fold).
    #[arg(long, default_value_t = FOLD_COUNT as u32)]
    pub folds: u32,

    /// Seed for every derived random stream.
    #[arg(long, env = "CTXEMBED_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Worker threads; 0 = deterministic single-threaded.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Output directory for reports and artifacts.
    #[arg(long)]
    pub out: PathBuf,
}

impl Args {
    fn method_params(&self) -> MethodParams {
        MethodParams {
            dim: self.dim,
            walks: self.walks,
            walk_len: self.walk_len,
            window: self.window,
            negatives: self.neg,
            alpha: self.alpha,
            p: self.p,
            q: self.q,
            beta: self.beta,
            seed: self.seed,
            threads: self.threads,
            ..MethodParams::default()
        }
    }

    fn require_method(&self) -> Result<Method> {
        self.method.ok_or_else(|| {
            Error::InvalidConfig(format!("--method is required for --task {}", self.task.name()))
        })
    }

    /// The fully resolved configuration recorded alongside every result.
    fn resolved_config(&self) -> serde_json::Value {
        json!({
            "task": self.task.name(),
            "method": self.method.map(Method::name),
            "input": self.input.display().to_string(),
            "directed": self.directed,
            "labels": self.labels.as_ref().map(|p| p.display().to_string()),
            "dim": self.dim,
            "walks": self.walks,
            "walk_len": self.walk_len,
            "window": self.window,
            "neg": self.neg,
            "alpha": self.alpha,
            "p": self.p,
            "q": self.q,
            "beta": self.beta,
            "holdout": self.holdout,
            "reversal": self.reversal,
            "folds": self.folds,
            "seed": self.seed,
            "threads": self.threads,
            "out": self.out.display().to_string(),
        })
    }
}

/// Execute one run; the returned code is the process exit status (nonzero
/// when a verification tolerance was breached).
pub fn run(args: &Args) -> Result<i32> {
    let g = Graph::load_edge_list(&args.input, args.directed)?;
    let mut report = Report::new();
    let mut exit = 0;

    match args.task {
        Task::Stats => run_stats(&g, &mut report)?,
        Task::Split => run_split(args, &g, &mut report)?,
        Task::Embed => run_embed(args, &g, &mut report)?,
        Task::EvalLp => run_eval_lp(args, &g, &mut report)?,
        Task::EvalNc => run_eval_nc(args, &g, &mut report)?,
        Task::Verify => exit = run_verify(args, &g, &mut report)?,
    }

    let (text_path, _) = report.write(&args.out, "report", args.resolved_config())?;
    // The body is the run's human-facing result; echo it.
    print!("{}", report.text_body()?);
    log::info!("report written to {}", text_path.display());
    Ok(exit)
}

fn run_stats(g: &Graph, report: &mut Report) -> Result<()> {
    let p = profile(g)?;
    report.set("node_count", p.node_count as f64);
    report.set("edge_count", p.edge_count as f64);
    report.set("directed", p.directed as u8 as f64);
    report.set("diameter", p.diameter as f64);
    report.set("diameter_exact", p.diameter_exact as u8 as f64);
    report.set("clustering", p.clustering);
    report.set("transitivity", p.transitivity);
    report.set("spectral_separation", p.spectral_separation);
    if let Some(r) = p.reciprocity {
        report.set("reciprocity", r);
    }
    if let Some(c) = p.clustering_directed {
        report.set("clustering_directed", c);
    }
    if let Some(t) = p.transitivity_directed {
        report.set("transitivity_directed", t);
    }
    Ok(())
}

fn run_split(args: &Args, g: &Graph, report: &mut Report) -> Result<()> {
    let s = make_lp_split(g, args.holdout, args.reversal, args.seed)?;
    write_split(g, &s, &args.out)?;
    report.set("train_edges", s.train.edge_count() as f64);
    report.set("test_positives", s.positives.len() as f64);
    report.set("test_negatives", s.negatives.len() as f64);
    Ok(())
}

fn run_embed(args: &Args, g: &Graph, report: &mut Report) -> Result<()> {
    let method = args.require_method()?;
    let e = embed(g, method, &args.method_params())?;
    let path = args.out.join("embeddings.txt");
    std::fs::create_dir_all(&args.out).map_err(|err| Error::io(&args.out, err))?;
    write_embeddings(&path, g.ids(), &e.phi)?;
    if let Some(theta) = &e.theta {
        write_embeddings(&context_path(&path), g.ids(), theta)?;
    }
    report.set("node_count", e.node_count() as f64);
    report.set("dim", e.dim() as f64);
    report.set("context_vectors", e.theta.is_some() as u8 as f64);
    Ok(())
}

fn run_eval_lp(args: &Args, g: &Graph, report: &mut Report) -> Result<()> {
    let method = args.require_method()?;
    let mode = method.lp_score_mode().ok_or_else(|| {
        Error::InvalidConfig(
            "maxvote predicts labels, not edges; use --task eval-nc".into(),
        )
    })?;
    let s = make_lp_split(g, args.holdout, args.reversal, args.seed)?;
    let e = embed(&s.train, method, &args.method_params())?;
    let auc = eval_lp(&e, &s, mode)?;
    report.set("auc", auc);
    report.set("test_positives", s.positives.len() as f64);
    report.set("test_negatives", s.negatives.len() as f64);
    Ok(())
}

fn run_eval_nc(args: &Args, g: &Graph, report: &mut Report) -> Result<()> {
    let method = args.require_method()?;
    if args.folds as usize != FOLD_COUNT {
        return Err(Error::InvalidConfig(format!(
            "the classification protocol is {FOLD_COUNT}-fold; got --folds {}",
            args.folds
        )));
    }
    let labels = args.labels.as_ref().ok_or_else(|| {
        Error::InvalidConfig("--labels is required for --task eval-nc".into())
    })?;
    let truth = LabeledNodes::load(labels, g)?;
    let (micro, macro_) = if method == Method::MaxVote {
        max_vote_eval(g, &truth, args.seed)
    } else {
        let e = embed(g, method, &args.method_params())?;
        let features = nc_features(&e, method)?;
        nc_cross_validate(&features, &truth, DEFAULT_LAMBDA, args.seed)?
    };
    report.set("micro_f1", micro);
    report.set("macro_f1", macro_);
    report.set("labeled_nodes", truth.labeled_nodes().len() as f64);
    report.set("label_count", truth.label_count() as f64);
    Ok(())
}

/// Samplers against closed forms on the input graph, plus the two
/// second-order walk identities on fixed zero-reciprocity fixtures. Returns
/// the exit code: nonzero when any check misses its tolerance.
fn run_verify(args: &Args, g: &Graph, report: &mut Report) -> Result<i32> {
    // Windowed co-occurrence: empirical frequencies against the closed form,
    // at two sample counts (the gap must shrink with more draws).
    let expected = expected_cooccurrence(g, args.window)?;
    let fine = ExactWindowSampler::new(g, args.window, VERIFY_FINE_SAMPLES, args.seed)?;
    let coarse = ExactWindowSampler::new(g, args.window, VERIFY_COARSE_SAMPLES, args.seed)?;
    let fine_gap = linf_gap(&pair_frequencies(&fine, 0)?, &expected);
    let coarse_gap = linf_gap(&pair_frequencies(&coarse, 0)?, &expected);
    report.set("eq3_linf_gap", fine_gap);
    report.set("eq3_linf_gap_coarse", coarse_gap);
    let eq3_ok = fine_gap < VERIFY_LINF_TOL && fine_gap < coarse_gap;
    report.set("eq3_pass", eq3_ok as u8 as f64);

    // The closed form is symmetric even on directed graphs.
    let n = g.node_count();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((expected[i * n + j] - expected[j * n + i]).abs());
        }
    }
    report.set("cooccurrence_asymmetry", asym);
    let asym_ok = asym < VERIFY_ASYM_TOL;
    report.set("cooccurrence_asymmetry_pass", asym_ok as u8 as f64);

    // Restart pairs: empirical distribution against the closed form, at the
    // two restart rates the downstream methods default to.
    let mut ppr_ok = true;
    for (key, alpha) in [("ppr_tv_alpha15", 0.15), ("ppr_tv_alpha50", 0.5)] {
        let cfg = PprConfig {
            alpha,
            max_len: VERIFY_PPR_MAX_LEN,
            samples: VERIFY_PPR_SAMPLES,
            seed: args.seed,
        };
        let sampler = PprSampler::new(g, cfg, DanglingPolicy::Error)?;
        let want = expected_ppr_pairs(g, alpha, VERIFY_PPR_MAX_LEN)?;
        let tv = total_variation(&pair_frequencies(&sampler, 0)?, &want);
        report.set(key, tv);
        let ok = tv < VERIFY_TV_TOL;
        report.set(format!("{key}_pass"), ok as u8 as f64);
        ppr_ok &= ok;
    }

    // Second-order identities, checked on fixtures with the structure the
    // statements require (no reciprocal arcs; no two-hop shortcuts).
    let p2_gap = return_bias_gap(&synth::layered(40, 4, 1, 3, 5));
    report.set("property2_table_gap", p2_gap);
    let p2_ok = p2_gap == 0.0;
    report.set("property2_pass", p2_ok as u8 as f64);

    let p3_gap = second_order_collapse_gap(&synth::layered(40, 4, 2, 3, 6));
    report.set("property3_table_gap", p3_gap);
    let p3_ok = p3_gap == 0.0;
    report.set("property3_pass", p3_ok as u8 as f64);

    let all_ok = eq3_ok && asym_ok && ppr_ok && p2_ok && p3_ok;
    Ok(if all_ok { 0 } else { 1 })
}

/// Largest bias-table change when the return parameter moves, on a graph
/// with no reciprocal arcs (where it must have no effect at all).
fn return_bias_gap(g: &Graph) -> f64 {
    let mut base = Vec::new();
    let mut other = Vec::new();
    let mut gap: f64 = 0.0;
    for (prev, cur, _) in g.arcs() {
        second_order_biases(g, 1.0, 0.7, prev, cur, &mut base);
        for p in [0.25, 4.0] {
            second_order_biases(g, p, 0.7, prev, cur, &mut other);
            for (a, b) in base.iter().zip(&other) {
                gap = gap.max((a - b).abs());
            }
        }
    }
    gap
}

/// Largest distance between second-order and first-order step distributions
/// on a graph with neither reciprocal arcs nor two-hop closures (where the
/// in-out factor cancels and the orders must coincide exactly).
fn second_order_collapse_gap(g: &Graph) -> f64 {
    let mut gap: f64 = 0.0;
    for q in [0.5, 2.0] {
        for (prev, cur, _) in g.arcs() {
            if g.out_neighbors(cur).is_empty() {
                continue;
            }
            let second = second_order_distribution(g, 1.0, q, prev, cur);
            let first = first_order_distribution(g, cur);
            for (a, b) in second.iter().zip(&first) {
                gap = gap.max((a - b).abs());
            }
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_follow_the_flag_surface() {
        for (task, name) in [
            (Task::Stats, "stats"),
            (Task::Split, "split"),
            (Task::Embed, "embed"),
            (Task::EvalLp, "eval-lp"),
            (Task::EvalNc, "eval-nc"),
            (Task::Verify, "verify"),
        ] {
            assert_eq!(task.name(), name);
        }
    }

    #[test]
    fn args_parse_with_defaults() {
        let args = Args::try_parse_from([
            "ctxembed", "--task", "stats", "--input", "g.txt", "--out", "o",
        ])
        .unwrap();
        assert_eq!(args.task, Task::Stats);
        assert_eq!(args.dim, 128);
        assert_eq!(args.walks, 10);
        assert_eq!(args.walk_len, 80);
        assert_eq!(args.window, 10);
        assert_eq!(args.neg, 5);
        assert_eq!(args.holdout, 0.5);
        assert_eq!(args.reversal, 1.0);
        assert_eq!(args.folds as usize, FOLD_COUNT);
        assert_eq!(args.threads, 0);
        assert!(!args.directed);
        assert!(args.method.is_none());
    }

    #[test]
    fn method_flag_parses_every_name() {
        for m in Method::ALL {
            let args = Args::try_parse_from([
                "ctxembed", "--task", "embed", "--method", m.name(), "--input", "g", "--out", "o",
            ])
            .unwrap();
            assert_eq!(args.method, Some(m));
        }
        assert!(Args::try_parse_from([
            "ctxembed", "--task", "embed", "--method", "sdne", "--input", "g", "--out", "o",
        ])
        .is_err());
    }

    #[test]
    fn resolved_config_is_complete_and_stable() {
        let args = Args::try_parse_from([
            "ctxembed", "--task", "eval-lp", "--method", "hope", "--input", "g.txt", "--out",
            "o", "--seed", "9",
        ])
        .unwrap();
        let cfg = args.resolved_config();
        assert_eq!(cfg["task"], json!("eval-lp"));
        assert_eq!(cfg["method"], json!("hope"));
        assert_eq!(cfg["seed"], json!(9));
        assert_eq!(cfg["beta"], json!(null));
        // Serialization is key-sorted, hence byte-stable run to run.
        assert_eq!(cfg.to_string(), args.resolved_config().to_string());
    }

    #[test]
    fn missing_method_is_a_usage_error() {
        let args = Args::try_parse_from([
            "ctxembed", "--task", "embed", "--input", "g", "--out", "o",
        ])
        .unwrap();
        let err = args.require_method().unwrap_err().to_string();
        assert!(err.contains("--method"), "{err}");
    }

    #[test]
    fn fixture_identities_hold_bitwise() {
        assert_eq!(return_bias_gap(&synth::layered(40, 4, 1, 3, 5)), 0.0);
        assert_eq!(second_order_collapse_gap(&synth::layered(40, 4, 2, 3, 6)), 0.0);
        // A graph with reciprocal arcs must NOT collapse: the gap detector
        // is alive.
        assert!(return_bias_gap(&synth::cycle(2, true)) > 0.0);
    }
}
