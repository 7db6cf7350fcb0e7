//! C ABI for the ctxembed node-embedding toolkit.
//!
//! Conventions: every fallible call returns a [`CtxStatus`]; `CTX_STATUS_OK`
//! means all out-parameters were written, anything else means none were.
//! The failure message is retrievable with [`ctx_last_error`] on the same
//! thread. Handles ([`CtxGraph`], [`CtxEmbedding`]) are opaque, created and
//! destroyed only through this interface, and never shared across a
//! create/free pair. Passing a null handle is reported, not undefined.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ctxembed::methods::{embed, Method, MethodParams};
use ctxembed::sgns::{context_path, score_pair, write_embeddings, EmbeddingSet, ScoreMode};
use ctxembed::{Error, Graph};

/// Outcome of a call. Non-`Ok` leaves out-parameters untouched; the
/// message behind it is available from `ctx_last_error`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CtxStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// The operating system refused a file operation.
    Io = 3,
    /// An input file exists but could not be understood.
    Parse = 4,
    /// Arguments or graph shape violate the operation's contract.
    Invalid = 5,
    /// Iteration diverged or failed to converge.
    Numeric = 6,
    /// An internal invariant failed; the library state is unharmed but the
    /// call did nothing.
    Panic = 7,
}

/// Directed or undirected graph handle.
pub struct CtxGraph(Graph);

/// Trained vectors: one source vector per node, optionally a second
/// context vector per node.
pub struct CtxEmbedding(EmbeddingSet);

/// Hyperparameters for `ctx_embed`. Obtain defaults from
/// `ctx_params_default`, then override fields as needed.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct CtxParams {
    /// Embedding dimension (columns per vector).
    pub dim: usize,
    /// Walks started per node.
    pub walks: u32,
    /// Steps per walk; also the series length of the factorized walk matrix.
    pub walk_len: u32,
    /// Co-occurrence window.
    pub window: u32,
    /// Negative samples per observed pair.
    pub negatives: u32,
    /// Restart probability of restart walks.
    pub alpha: f64,
    /// Return bias of second-order walks.
    pub p: f64,
    /// In-out bias of second-order walks.
    pub q: f64,
    /// Damping of the path-count series; zero or negative selects the
    /// automatic spectral rule.
    pub beta: f64,
    /// Initial learning rate of the stochastic trainer.
    pub learning_rate: f64,
    /// Passes over the pair stream.
    pub epochs: u32,
    /// Seed for every random draw of the run.
    pub seed: u64,
    /// Worker threads; 0 = deterministic single-threaded.
    pub threads: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> CtxStatus {
    match err {
        Error::Io { .. } => CtxStatus::Io,
        Error::Parse { .. } => CtxStatus::Parse,
        Error::Divergent { .. } | Error::NoConvergence { .. } | Error::NonFinite { .. } => {
            CtxStatus::Numeric
        }
        _ => CtxStatus::Invalid,
    }
}

fn fail(status: CtxStatus, msg: &str) -> CtxStatus {
    set_error(msg);
    status
}

fn fail_with(err: &Error) -> CtxStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs a closure with panics converted to `CTX_STATUS_PANIC`: unwinding
/// must never cross the language boundary.
fn guarded(f: impl FnOnce() -> CtxStatus) -> CtxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown internal failure".into());
            fail(CtxStatus::Panic, &format!("internal failure: {msg}"))
        }
    }
}

/// Converts a C path/string argument; records the failure itself.
///
/// # Safety
/// `ptr` must be null or point at a NUL-terminated string.
unsafe fn take_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, CtxStatus> {
    if ptr.is_null() {
        return Err(fail(CtxStatus::NullPointer, &format!("{what} pointer is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(CtxStatus::Utf8, &format!("{what} is not valid UTF-8")))
}

fn params_to_native(p: &CtxParams) -> MethodParams {
    MethodParams {
        dim: p.dim,
        walks: p.walks,
        walk_len: p.walk_len,
        window: p.window,
        negatives: p.negatives,
        alpha: p.alpha,
        p: p.p,
        q: p.q,
        beta: if p.beta > 0.0 { Some(p.beta) } else { None },
        lr: p.learning_rate,
        epochs: p.epochs,
        seed: p.seed,
        threads: p.threads as usize,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ctx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread; empty string when no
/// call has failed yet. The pointer stays valid until the next failing call
/// on the same thread.
#[no_mangle]
pub extern "C" fn ctx_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Default hyperparameters (dimension 128, ten walks of eighty steps,
/// window ten, five negatives, automatic damping, single-threaded).
#[no_mangle]
pub extern "C" fn ctx_params_default() -> CtxParams {
    let d = MethodParams::default();
    CtxParams {
        dim: d.dim,
        walks: d.walks,
        walk_len: d.walk_len,
        window: d.window,
        negatives: d.negatives,
        alpha: d.alpha,
        p: d.p,
        q: d.q,
        beta: 0.0,
        learning_rate: d.lr,
        epochs: d.epochs,
        seed: d.seed,
        threads: d.threads as u32,
    }
}

/// Loads a whitespace-separated edge list (`source target [weight]` per
/// line, `#` comments) and writes a new graph handle to `out`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_graph_load(
    path: *const c_char,
    directed: bool,
    out: *mut *mut CtxGraph,
) -> CtxStatus {
    guarded(|| {
        if out.is_null() {
            return fail(CtxStatus::NullPointer, "output pointer is null");
        }
        let path = match take_str(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match Graph::load_edge_list(Path::new(path), directed) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(CtxGraph(g)));
                CtxStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases a graph handle. Null is a no-op.
///
/// # Safety
/// `g` must be null or a handle obtained from `ctx_graph_load`, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn ctx_graph_free(g: *mut CtxGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ctx_graph_node_count(g: *const CtxGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.0.node_count() as u64)
}

/// Number of logical edges (arcs when directed); 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ctx_graph_edge_count(g: *const CtxGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.0.edge_count() as u64)
}

/// Whether the graph was loaded as directed; false for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ctx_graph_is_directed(g: *const CtxGraph) -> bool {
    g.as_ref().is_some_and(|g| g.0.is_directed())
}

/// Trains vectors for `method` (one of: deepwalk, node2vec, line1, line2,
/// line12, app, verse, netmf, hope) and writes a new embedding handle to
/// `out`. A null `params` uses the defaults. The graph is only borrowed
/// for the duration of the call.
///
/// # Safety
/// `g` must be a live graph handle; `method` a NUL-terminated string;
/// `params` null or a valid pointer; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_embed(
    g: *const CtxGraph,
    method: *const c_char,
    params: *const CtxParams,
    out: *mut *mut CtxEmbedding,
) -> CtxStatus {
    guarded(|| {
        if out.is_null() {
            return fail(CtxStatus::NullPointer, "output pointer is null");
        }
        let Some(graph) = g.as_ref() else {
            return fail(CtxStatus::NullPointer, "graph handle is null");
        };
        let name = match take_str(method, "method name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let method: Method = match name.parse() {
            Ok(m) => m,
            Err(e) => return fail_with(&e),
        };
        if !method.embeds() {
            return fail(
                CtxStatus::Invalid,
                &format!("method {name} predicts labels directly and trains no vectors"),
            );
        }
        let native = match params.as_ref() {
            Some(p) => params_to_native(p),
            None => MethodParams::default(),
        };
        match embed(&graph.0, method, &native) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(CtxEmbedding(e)));
                CtxStatus::Ok
            }
            Err(e) => fail_with(&e),
        }
    })
}

/// Releases an embedding handle. Null is a no-op.
///
/// # Safety
/// `e` must be null or a handle obtained from `ctx_embed`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_free(e: *mut CtxEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Number of embedded nodes; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live embedding handle.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_node_count(e: *const CtxEmbedding) -> u64 {
    e.as_ref().map_or(0, |e| e.0.node_count() as u64)
}

/// Vector dimension; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live embedding handle.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_dim(e: *const CtxEmbedding) -> u32 {
    e.as_ref().map_or(0, |e| e.0.dim() as u32)
}

/// Whether the method trained separate context vectors; false for a null
/// handle.
///
/// # Safety
/// `e` must be null or a live embedding handle.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_has_context(e: *const CtxEmbedding) -> bool {
    e.as_ref().is_some_and(|e| e.0.theta.is_some())
}

/// Copies one node's vector (source side, or context side when `context`
/// is true) into `out`, which must hold exactly `len` = dimension floats.
///
/// # Safety
/// `e` must be a live embedding handle; `out` must point at `len` floats.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_copy_vector(
    e: *const CtxEmbedding,
    node: u32,
    context: bool,
    out: *mut f32,
    len: usize,
) -> CtxStatus {
    guarded(|| {
        let Some(e) = e.as_ref() else {
            return fail(CtxStatus::NullPointer, "embedding handle is null");
        };
        if out.is_null() {
            return fail(CtxStatus::NullPointer, "output buffer is null");
        }
        if len != e.0.dim() {
            return fail(
                CtxStatus::Invalid,
                &format!("buffer holds {len} floats, vectors have {}", e.0.dim()),
            );
        }
        let matrix = if context {
            match &e.0.theta {
                Some(t) => t,
                None => {
                    return fail(
                        CtxStatus::Invalid,
                        "this embedding has no context vectors",
                    )
                }
            }
        } else {
            &e.0.phi
        };
        if node as usize >= matrix.rows() {
            return fail(
                CtxStatus::Invalid,
                &format!("node {node} out of range ({} embedded)", matrix.rows()),
            );
        }
        std::ptr::copy_nonoverlapping(matrix.row(node).as_ptr(), out, len);
        CtxStatus::Ok
    })
}

/// Scores a candidate edge (source, target): dot product of the source
/// vectors, or of source and context vector when `use_context` is true.
/// Writes the score to `out`.
///
/// # Safety
/// `e` must be a live embedding handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_score(
    e: *const CtxEmbedding,
    source: u32,
    target: u32,
    use_context: bool,
    out: *mut f64,
) -> CtxStatus {
    guarded(|| {
        let Some(e) = e.as_ref() else {
            return fail(CtxStatus::NullPointer, "embedding handle is null");
        };
        if out.is_null() {
            return fail(CtxStatus::NullPointer, "output pointer is null");
        }
        let n = e.0.node_count() as u32;
        if source >= n || target >= n {
            return fail(
                CtxStatus::Invalid,
                &format!("pair ({source},{target}) out of range ({n} embedded)"),
            );
        }
        let mode = if use_context { ScoreMode::SourceContext } else { ScoreMode::SourceSource };
        match score_pair(&e.0, source, target, mode) {
            Ok(s) => {
                *out = s;
                CtxStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Writes the vectors as text (`node_count dim` header, then
/// `original_id v1 .. vd` per line) at `path`; context vectors, when
/// present, go to the same path with a `.ctx` suffix appended. `g` must be
/// the graph the embedding was trained on — it supplies the original node
/// identifiers.
///
/// # Safety
/// `e` and `g` must be live handles; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ctx_embedding_save(
    e: *const CtxEmbedding,
    g: *const CtxGraph,
    path: *const c_char,
) -> CtxStatus {
    guarded(|| {
        let Some(e) = e.as_ref() else {
            return fail(CtxStatus::NullPointer, "embedding handle is null");
        };
        let Some(g) = g.as_ref() else {
            return fail(CtxStatus::NullPointer, "graph handle is null");
        };
        let path = match take_str(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if e.0.node_count() != g.0.node_count() {
            return fail(
                CtxStatus::Invalid,
                &format!(
                    "embedding covers {} nodes, graph has {}",
                    e.0.node_count(),
                    g.0.node_count()
                ),
            );
        }
        let path = Path::new(path);
        if let Err(err) = write_embeddings(path, g.0.ids(), &e.0.phi) {
            return fail_with(&err);
        }
        if let Some(theta) = &e.0.theta {
            if let Err(err) = write_embeddings(&context_path(path), g.0.ids(), theta) {
                return fail_with(&err);
            }
        }
        CtxStatus::Ok
    })
}
