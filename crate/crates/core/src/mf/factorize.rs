//! Randomized truncated SVD and the Φ/θ factor split.
//!
//! The factorizer is a standard randomized subspace iteration: sketch the
//! range with a Gaussian test matrix, re-orthonormalize between every
//! operator application (which keeps column norms from collapsing under
//! power iterations), then solve the small projected problem exactly.

use rand::Rng;

use crate::context::ContextMatrix;
use crate::mf::op::LinearOp;
use crate::rng::{gaussian, stream_rng};
use crate::sgns::embedding::{EmbeddingSet, Matrix};
use crate::{Error, Result};

/// Rng derivation tags: sketch matrix, Frobenius-norm probe.
const SKETCH_TAG: u64 = 0x0fac;
const PROBE_TAG: u64 = 0x0f20;

/// Singular values below this fraction of σ₁ are treated as numerically
/// zero; their factor columns are zero-padded.
const RANK_CUTOFF: f64 = 1e-12;

/// Rank-d factorization C ≈ Φ·θᵀ with the singular scale split evenly:
/// Φ = U·√Σ (one row per matrix row), θ = V·√Σ (one row per column).
#[derive(Debug, Clone)]
pub struct FactorizationResult {
    pub rows: usize,
    pub cols: usize,
    pub dim: usize,
    /// rows×dim, row-major.
    pub phi: Vec<f64>,
    /// cols×dim, row-major.
    pub theta: Vec<f64>,
    /// Non-increasing, ≥ 0.
    pub singular_values: Vec<f64>,
    /// Frobenius distance ‖C − Φθᵀ‖; exact from [`factorize`], a randomized
    /// estimate from [`factorize_op`].
    pub residual: f64,
}

impl FactorizationResult {
    /// Converts both factors to the embedding container (f32).
    pub fn embeddings(&self) -> EmbeddingSet {
        let to_matrix = |rows: usize, data: &[f64]| {
            let mut m = Matrix::zeros(rows, self.dim);
            for (dst, &src) in m.data_mut().iter_mut().zip(data) {
                *dst = src as f32;
            }
            m
        };
        EmbeddingSet {
            phi: to_matrix(self.rows, &self.phi),
            theta: Some(to_matrix(self.cols, &self.theta)),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place modified Gram–Schmidt with one re-orthogonalization pass.
/// Columns that collapse below the rank cutoff become zero columns.
fn orthonormalize(cols: &mut [Vec<f64>]) {
    let mut max_norm = 0.0f64;
    for j in 0..cols.len() {
        for _ in 0..2 {
            for i in 0..j {
                let proj = dot(&cols[j], &cols[i]);
                if proj != 0.0 {
                    let (head, tail) = cols.split_at_mut(j);
                    for (x, &b) in tail[0].iter_mut().zip(&head[i]) {
                        *x -= proj * b;
                    }
                }
            }
        }
        let norm = dot(&cols[j], &cols[j]).sqrt();
        max_norm = max_norm.max(norm);
        if norm > 1e-10 * max_norm && norm > 0.0 {
            cols[j].iter_mut().for_each(|x| *x /= norm);
        } else {
            cols[j].iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

/// Eigen-decomposition of a small symmetric PSD matrix by cyclic Jacobi
/// rotations. Returns eigenvalues (descending, clamped at 0) and the
/// matching eigenvectors as columns.
fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = a.len();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p][q];
                if apq.abs() <= 1e-15 * (a[p][p].abs() + a[q][q].abs()) {
                    continue;
                }
                rotated = true;
                let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let (ap, aq) = (a[p][i], a[q][i]);
                    a[p][i] = c * ap - s * aq;
                    a[q][i] = s * ap + c * aq;
                }
                for i in 0..k {
                    let (ap, aq) = (a[i][p], a[i][q]);
                    a[i][p] = c * ap - s * aq;
                    a[i][q] = s * ap + c * aq;
                    let (vp, vq) = (v[i][p], v[i][q]);
                    v[i][p] = c * vp - s * vq;
                    v[i][q] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let eigvals: Vec<f64> = order.iter().map(|&j| a[j][j].max(0.0)).collect();
    let eigvecs: Vec<Vec<f64>> = (0..k)
        .map(|i| order.iter().map(|&j| v[i][j]).collect())
        .collect();
    (eigvals, eigvecs)
}

/// Randomized rank-d factorization of any linear operator. The residual
/// field is a randomized Frobenius estimate (the operator may be implicit,
/// so the exact value is unavailable); [`factorize`] replaces it with an
/// exact recomputation for explicit matrices.
pub fn factorize_op(
    op: &dyn LinearOp,
    d: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<FactorizationResult> {
    let (rows, cols) = (op.rows(), op.cols());
    let min_dim = rows.min(cols);
    if d == 0 || d > min_dim {
        return Err(Error::InvalidConfig(format!(
            "factorization rank must be in 1..={min_dim}, got {d}"
        )));
    }
    let k = (d + oversample).min(min_dim).max(1);

    // Range sketch.
    let mut rng = stream_rng(seed, &[SKETCH_TAG]);
    let mut q: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let omega: Vec<f64> = (0..cols).map(|_| gaussian(&mut rng)).collect();
            let mut y = vec![0.0; rows];
            op.matvec(&omega, &mut y);
            y
        })
        .collect();
    orthonormalize(&mut q);

    // Power iterations sharpen the subspace toward the top singular
    // directions; orthonormalizing after every application keeps the basis
    // well conditioned.
    for _ in 0..power_iters {
        let mut z: Vec<Vec<f64>> = q
            .iter()
            .map(|qi| {
                let mut zi = vec![0.0; cols];
                op.rmatvec(qi, &mut zi);
                zi
            })
            .collect();
        orthonormalize(&mut z);
        q = z
            .iter()
            .map(|zi| {
                let mut yi = vec![0.0; rows];
                op.matvec(zi, &mut yi);
                yi
            })
            .collect();
        orthonormalize(&mut q);
    }

    // Projected problem: B = QᵀC (k×cols), solved through the k×k Gram
    // matrix BBᵀ.
    let b: Vec<Vec<f64>> = q
        .iter()
        .map(|qi| {
            let mut bi = vec![0.0; cols];
            op.rmatvec(qi, &mut bi);
            bi
        })
        .collect();
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&b[i], &b[j])).collect())
        .collect();
    let (eigvals, w) = symmetric_eigen(gram);
    let sigma: Vec<f64> = eigvals.iter().take(d).map(|l| l.sqrt()).collect();

    let cutoff = sigma.first().copied().unwrap_or(0.0) * RANK_CUTOFF;
    let effective = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    if effective < d {
        log::warn!(
            "requested rank {d} exceeds the numerical rank {effective}; \
             trailing factor columns are zero-padded"
        );
    }

    let mut phi = vec![0.0; rows * d];
    let mut theta = vec![0.0; cols * d];
    for t in 0..effective {
        let scale = sigma[t].sqrt();
        // U column: Q·w_t, scaled to √σ.
        for i in 0..rows {
            let u: f64 = (0..k).map(|a| q[a][i] * w[a][t]).sum();
            phi[i * d + t] = u * scale;
        }
        // V column: Bᵀ·w_t / σ, scaled to √σ.
        for j in 0..cols {
            let v: f64 = (0..k).map(|a| b[a][j] * w[a][t]).sum();
            theta[j * d + t] = v / sigma[t] * scale;
        }
    }

    // Randomized Frobenius-norm probe: E‖C·z‖² over Rademacher z equals
    // ‖C‖²_F. Coarse, but the only handle we have on an implicit operator.
    let mut probe_rng = stream_rng(seed, &[PROBE_TAG]);
    let probes = 32;
    let mut est_fro_sq = 0.0;
    let mut y = vec![0.0; rows];
    for _ in 0..probes {
        let z: Vec<f64> = (0..cols)
            .map(|_| if probe_rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        op.matvec(&z, &mut y);
        est_fro_sq += dot(&y, &y);
    }
    est_fro_sq /= probes as f64;
    let captured: f64 = sigma.iter().map(|s| s * s).sum();
    let residual = (est_fro_sq - captured).max(0.0).sqrt();

    Ok(FactorizationResult { rows, cols, dim: d, phi, theta, singular_values: sigma, residual })
}

/// Rank-d factorization of an explicit context matrix; the reported
/// residual is computed exactly from the entries.
pub fn factorize(
    c: &ContextMatrix,
    d: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<FactorizationResult> {
    let mut r = factorize_op(c, d, oversample, power_iters, seed)?;
    r.residual = exact_residual(c, &r);
    Ok(r)
}

/// ‖C − Φθᵀ‖_F over a scatter buffer: one dense row at a time, so the cost
/// is rows·cols·d without materializing the dense matrix.
fn exact_residual(c: &ContextMatrix, r: &FactorizationResult) -> f64 {
    let d = r.dim;
    let mut row_buf = vec![0.0; r.cols];
    let mut sq = 0.0;
    for i in 0..r.rows {
        let (idx, vals) = c.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            row_buf[j as usize] = v;
        }
        let phi_row = &r.phi[i * d..(i + 1) * d];
        for (j, rb) in row_buf.iter().enumerate() {
            let pred = dot(phi_row, &r.theta[j * d..(j + 1) * d]);
            let diff = rb - pred;
            sq += diff * diff;
        }
        for &j in idx {
            row_buf[j as usize] = 0.0;
        }
    }
    sq.sqrt()
}

/// Recomputes ‖C − Φθᵀ‖_F from scratch, independently of whatever the
/// factorizer reported; the audit half of the residual invariant.
pub fn residual_check(c: &ContextMatrix, r: &FactorizationResult) -> Result<f64> {
    if c.rows() != r.rows || c.cols() != r.cols {
        return Err(Error::DimMismatch(format!(
            "matrix is {}x{}, factorization covers {}x{}",
            c.rows(),
            c.cols(),
            r.rows,
            r.cols
        )));
    }
    let d = r.dim;
    let mut sq = 0.0;
    for i in 0..r.rows {
        for j in 0..r.cols {
            let pred: f64 = (0..d).map(|t| r.phi[i * d + t] * r.theta[j * d + t]).sum();
            let diff = c.get(i, j) - pred;
            sq += diff * diff;
        }
    }
    Ok(sq.sqrt())
}
