//! End-to-end exercise of the C interface from the Rust side: load, embed,
//! inspect, score, save, and every guarded failure path.

use std::ffi::{CStr, CString};
use std::ptr;

use ctxembed_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ctx_last_error()).to_string_lossy().into_owned() }
}

/// Triangle with a two-way chord, written as an edge-list file.
fn fixture(dir: &std::path::Path) -> CString {
    let path = dir.join("g.txt");
    std::fs::write(&path, "0 1\n1 2\n2 0\n0 2\n").unwrap();
    c(path.to_str().unwrap())
}

fn load(path: &CStr) -> *mut CtxGraph {
    let mut g: *mut CtxGraph = ptr::null_mut();
    let status = unsafe { ctx_graph_load(path.as_ptr(), true, &mut g) };
    assert_eq!(status, CtxStatus::Ok, "{}", last_error());
    assert!(!g.is_null());
    g
}

fn small_params() -> CtxParams {
    CtxParams {
        dim: 8,
        walks: 2,
        walk_len: 10,
        window: 3,
        negatives: 2,
        ..ctx_params_default()
    }
}

#[test]
fn version_and_defaults() {
    let v = unsafe { CStr::from_ptr(ctx_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    let p = ctx_params_default();
    assert_eq!((p.dim, p.walks, p.walk_len), (128, 10, 80));
    assert_eq!(p.beta, 0.0, "automatic damping by default");
    assert_eq!(p.threads, 0, "deterministic by default");
}

#[test]
fn load_inspect_free() {
    let tmp = tempfile::tempdir().unwrap();
    let path = fixture(tmp.path());
    let g = load(&path);
    unsafe {
        assert_eq!(ctx_graph_node_count(g), 3);
        assert_eq!(ctx_graph_edge_count(g), 4);
        assert!(ctx_graph_is_directed(g));
        ctx_graph_free(g);
        // Null handles are inert, not undefined.
        assert_eq!(ctx_graph_node_count(ptr::null()), 0);
        ctx_graph_free(ptr::null_mut());
    }
}

#[test]
fn embed_score_and_copy() {
    let tmp = tempfile::tempdir().unwrap();
    let path = fixture(tmp.path());
    let g = load(&path);
    let params = small_params();

    unsafe {
        // Shared-vector method: no context side.
        let mut e: *mut CtxEmbedding = ptr::null_mut();
        let status = ctx_embed(g, c("line1").as_ptr(), &params, &mut e);
        assert_eq!(status, CtxStatus::Ok, "{}", last_error());
        assert_eq!(ctx_embedding_node_count(e), 3);
        assert_eq!(ctx_embedding_dim(e), 8);
        assert!(!ctx_embedding_has_context(e));

        let mut row = [0.0f32; 8];
        assert_eq!(
            ctx_embedding_copy_vector(e, 1, false, row.as_mut_ptr(), row.len()),
            CtxStatus::Ok
        );
        assert!(row.iter().all(|x| x.is_finite()));
        assert!(row.iter().any(|&x| x != 0.0), "trained vector is not zero");

        let mut score = f64::NAN;
        assert_eq!(ctx_embedding_score(e, 0, 1, false, &mut score), CtxStatus::Ok);
        assert!(score.is_finite());

        // Context side neither copyable nor scorable when absent.
        assert_eq!(
            ctx_embedding_copy_vector(e, 1, true, row.as_mut_ptr(), row.len()),
            CtxStatus::Invalid
        );
        assert_eq!(ctx_embedding_score(e, 0, 1, true, &mut score), CtxStatus::Invalid);
        ctx_embedding_free(e);

        // Split-vector method: context present and scorable.
        let mut e2: *mut CtxEmbedding = ptr::null_mut();
        let status = ctx_embed(g, c("line2").as_ptr(), &params, &mut e2);
        assert_eq!(status, CtxStatus::Ok, "{}", last_error());
        assert!(ctx_embedding_has_context(e2));
        assert_eq!(
            ctx_embedding_copy_vector(e2, 2, true, row.as_mut_ptr(), row.len()),
            CtxStatus::Ok
        );
        assert_eq!(ctx_embedding_score(e2, 0, 1, true, &mut score), CtxStatus::Ok);
        assert!(score.is_finite());
        ctx_embedding_free(e2);
        ctx_graph_free(g);
    }
}

#[test]
fn embed_null_params_uses_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let path = fixture(tmp.path());
    let g = load(&path);
    unsafe {
        let mut e: *mut CtxEmbedding = ptr::null_mut();
        let status = ctx_embed(g, c("line1").as_ptr(), ptr::null(), &mut e);
        assert_eq!(status, CtxStatus::Ok, "{}", last_error());
        assert_eq!(ctx_embedding_dim(e), 128);
        ctx_embedding_free(e);
        ctx_graph_free(g);
    }
}

#[test]
fn save_writes_both_files() {
    let tmp = tempfile::tempdir().unwrap();
    let path = fixture(tmp.path());
    let g = load(&path);
    let params = small_params();
    unsafe {
        let mut e: *mut CtxEmbedding = ptr::null_mut();
        assert_eq!(ctx_embed(g, c("line2").as_ptr(), &params, &mut e), CtxStatus::Ok);
        let out = tmp.path().join("vectors.txt");
        let out_c = c(out.to_str().unwrap());
        assert_eq!(ctx_embedding_save(e, g, out_c.as_ptr()), CtxStatus::Ok, "{}", last_error());
        assert!(out.exists());
        assert!(tmp.path().join("vectors.txt.ctx").exists(), "context side saved too");
        let header = std::fs::read_to_string(&out).unwrap();
        assert!(header.starts_with("3 8\n"), "count and dimension header");
        ctx_embedding_free(e);
        ctx_graph_free(g);
    }
}

#[test]
fn failure_paths_report_status_and_message() {
    let tmp = tempfile::tempdir().unwrap();
    let path = fixture(tmp.path());
    unsafe {
        // Missing file.
        let mut g: *mut CtxGraph = ptr::null_mut();
        let missing = c("/nonexistent/g.txt");
        assert_eq!(ctx_graph_load(missing.as_ptr(), true, &mut g), CtxStatus::Io);
        assert!(!last_error().is_empty());
        assert!(g.is_null(), "failed load must not produce a handle");

        // Null arguments.
        assert_eq!(ctx_graph_load(ptr::null(), true, &mut g), CtxStatus::NullPointer);
        assert_eq!(ctx_graph_load(missing.as_ptr(), true, ptr::null_mut()), CtxStatus::NullPointer);

        let g = load(&path);
        let mut e: *mut CtxEmbedding = ptr::null_mut();

        // Unknown and non-embedding methods.
        assert_eq!(ctx_embed(g, c("sdne").as_ptr(), ptr::null(), &mut e), CtxStatus::Invalid);
        assert!(last_error().contains("sdne"));
        assert_eq!(ctx_embed(g, c("maxvote").as_ptr(), ptr::null(), &mut e), CtxStatus::Invalid);
        assert!(last_error().contains("maxvote"));

        // Bad hyperparameters surface the library's own validation.
        let mut bad = small_params();
        bad.dim = 0;
        assert_eq!(ctx_embed(g, c("line1").as_ptr(), &bad, &mut e), CtxStatus::Invalid);

        // Wrong buffer length and out-of-range nodes.
        let params = small_params();
        assert_eq!(ctx_embed(g, c("line1").as_ptr(), &params, &mut e), CtxStatus::Ok);
        let mut row = [0.0f32; 4];
        assert_eq!(
            ctx_embedding_copy_vector(e, 0, false, row.as_mut_ptr(), row.len()),
            CtxStatus::Invalid
        );
        let mut score = 0.0;
        assert_eq!(ctx_embedding_score(e, 0, 99, false, &mut score), CtxStatus::Invalid);
        ctx_embedding_free(e);
        ctx_graph_free(g);
    }
}
