//! Closed-form context matrices: the log-degree-normalized walk series and
//! the damped path-count series, stored sparsely for factorization.

use log::warn;
use rand::Rng;

use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Largest node count the matrix builders accept; both keep dense row or
/// term intermediates.
pub const DENSE_NODE_LIMIT: usize = 20_000;

/// Hard cap on series terms before giving up on convergence.
const MAX_SERIES_TERMS: usize = 10_000;

const RADIUS_SEED: u64 = 0x5bec_0a1d;
const RADIUS_TOL: f64 = 1e-10;
const RADIUS_MAX_ITERS: usize = 10_000;

/// Sparse rows of a real matrix, ordered by column within each row.
#[derive(Debug, Clone)]
pub struct ContextMatrix {
    rows: usize,
    cols: usize,
    row_off: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl ContextMatrix {
    /// Builds from (row, col, value) triplets: duplicates are summed, exact
    /// zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!((r as usize) < rows && (c as usize) < cols);
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != 0.0);
        let mut row_off = vec![0usize; rows + 1];
        for &(r, _, _) in &merged {
            row_off[r as usize + 1] += 1;
        }
        for r in 0..rows {
            row_off[r + 1] += row_off[r];
        }
        let col_idx = merged.iter().map(|t| t.1).collect();
        let values = merged.iter().map(|t| t.2).collect();
        ContextMatrix { rows, cols, row_off, col_idx, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.row_off[i], self.row_off[i + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Entry (i, j), zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .map(move |(&c, &v)| (i as u32, c, v))
        })
    }

    /// y = M x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        y.fill(0.0);
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j as usize];
            }
            y[i] = acc;
        }
    }

    /// y = Mᵀ x.
    pub fn rmatvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        y.fill(0.0);
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j as usize] += v * x[i];
            }
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Row-major dense copy; only for small matrices.
    pub fn to_dense(&self) -> Vec<f64> {
        assert!(
            self.rows * self.cols <= 4_000_000,
            "dense copy only supported for small matrices"
        );
        let mut d = vec![0.0; self.rows * self.cols];
        for (i, j, v) in self.entries() {
            d[i as usize * self.cols + j as usize] = v;
        }
        d
    }

    /// Largest |M_ij − M_ji| over stored entries (square matrices).
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        self.entries()
            .map(|(i, j, v)| (v - self.get(j as usize, i as usize)).abs())
            .fold(0.0, f64::max)
    }

    /// (M + Mᵀ) / 2.
    pub fn symmetrized(&self) -> ContextMatrix {
        assert_eq!(self.rows, self.cols);
        let mut triplets = Vec::with_capacity(2 * self.nnz());
        for (i, j, v) in self.entries() {
            triplets.push((i, j, 0.5 * v));
            triplets.push((j, i, 0.5 * v));
        }
        ContextMatrix::from_triplets(self.rows, self.cols, triplets)
    }
}

fn check_dense_size(g: &Graph, what: &'static str) -> Result<()> {
    if g.node_count() > DENSE_NODE_LIMIT {
        return Err(Error::TooLarge {
            what,
            actual: g.node_count(),
            limit: DENSE_NODE_LIMIT,
        });
    }
    Ok(())
}

/// Log-normalized walk-series matrix over an undirected graph.
///
/// Entry (i, j) is `ln( vol/(k·T) · (Σ_{r=1..T} P^r)_{i,j} / d_j )` where `P`
/// is the weight-normalized transition matrix, `vol` the total weighted
/// degree, `T` the series length and `k` the negative-sample count. Entries
/// whose log argument is at most 1, and the diagonal, are not stored, keeping
/// the matrix sparse and the factorization well-posed.
///
/// `r_window` is accepted for parameter symmetry with the sampling recipes;
/// the closed form depends only on `t` and `k_neg`.
///
/// The result is symmetric in exact arithmetic; if rounding pushes the
/// asymmetry past 1e-9 the matrix is averaged with its transpose and the
/// event logged.
pub fn netmf_matrix(g: &Graph, t: u32, r_window: u32, k_neg: u32) -> Result<ContextMatrix> {
    let _ = r_window;
    if g.is_directed() {
        return Err(Error::Unsupported(
            "netmf requires an undirected graph".into(),
        ));
    }
    check_dense_size(g, "log-normalized walk-series matrix (prefer a sampling-based method)")?;
    if t == 0 || k_neg == 0 {
        return Err(Error::InvalidConfig(
            "series length and negative-sample count must be positive".into(),
        ));
    }
    if let Some(node) = g.first_dangling() {
        return Err(Error::DanglingNode {
            node: g.ids().original(node).to_string(),
        });
    }
    let n = g.node_count();
    let deg: Vec<f64> = (0..n).map(|u| g.weighted_out_degree(u as u32)).collect();
    let vol: f64 = deg.iter().sum();
    let scale = vol / (k_neg as f64 * t as f64);

    let mut triplets = Vec::new();
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut series = vec![0.0; n];
    for i in 0..n {
        // Row i of each P^r by repeated vector-matrix products.
        cur.fill(0.0);
        cur[i] = 1.0;
        series.fill(0.0);
        for _ in 0..t {
            next.fill(0.0);
            for (u, &mass) in cur.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                let share = mass / deg[u];
                for (&v, &w) in g.out_neighbors(u as u32).iter().zip(g.out_weights(u as u32)) {
                    next[v as usize] += share * w;
                }
            }
            std::mem::swap(&mut cur, &mut next);
            for (s, &c) in series.iter_mut().zip(cur.iter()) {
                *s += c;
            }
        }
        for j in 0..n {
            if j == i {
                continue;
            }
            let arg = scale * series[j] / deg[j];
            if arg > 1.0 {
                triplets.push((i as u32, j as u32, arg.ln()));
            }
        }
    }
    let m = ContextMatrix::from_triplets(n, n, triplets);
    let asym = m.max_asymmetry();
    if asym > 1e-9 {
        warn!("walk-series matrix asymmetry {asym:.3e} exceeds 1e-9; symmetrizing");
        return Ok(m.symmetrized());
    }
    Ok(m)
}

/// Damped path-count series `Σ_{ℓ≥1} βℓ Aℓ`, truncated once the geometric
/// tail bound on the dropped terms falls below `tol`.
///
/// Requires `β · ρ(A) < 1` (checked via [`estimate_spectral_radius`]);
/// otherwise the series diverges and an error reports the radius.
pub fn katz_matrix(g: &Graph, beta: f64, tol: f64) -> Result<ContextMatrix> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "damping must be finite and non-negative, got {beta}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    check_dense_size(g, "damped path-count series (dense term accumulation)")?;
    let n = g.node_count();
    if beta == 0.0 {
        return Ok(ContextMatrix::from_triplets(n, n, Vec::new()));
    }
    let rho = estimate_spectral_radius(g)?;
    if beta * rho >= 1.0 {
        return Err(Error::Divergent { beta, spectral_radius: rho });
    }

    // term = (βA)^ℓ, dense row-major; acc accumulates the series.
    let mut term = vec![0.0; n * n];
    for (u, v, w) in g.arcs() {
        term[u as usize * n + v as usize] += beta * w;
    }
    let mut acc = term.clone();
    let mut prev_norm = term.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut converged = prev_norm == 0.0;
    let mut next = vec![0.0; n * n];
    for _ in 2..=MAX_SERIES_TERMS {
        if converged {
            break;
        }
        // next = βA · term.
        next.fill(0.0);
        for u in 0..n {
            for (&v, &w) in g.out_neighbors(u as u32).iter().zip(g.out_weights(u as u32)) {
                let coeff = beta * w;
                let (src, dst) = (v as usize * n, u * n);
                for j in 0..n {
                    next[dst + j] += coeff * term[src + j];
                }
            }
        }
        std::mem::swap(&mut term, &mut next);
        let norm = term.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (a, t) in acc.iter_mut().zip(term.iter()) {
            *a += t;
        }
        let ratio = if prev_norm == 0.0 { 0.0 } else { norm / prev_norm };
        if norm == 0.0 || (ratio < 1.0 && norm * ratio / (1.0 - ratio) < tol) {
            converged = true;
        }
        prev_norm = norm;
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: MAX_SERIES_TERMS });
    }
    let triplets = acc
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0.0)
        .map(|(k, &v)| ((k / n) as u32, (k % n) as u32, v))
        .collect();
    Ok(ContextMatrix::from_triplets(n, n, triplets))
}

/// Spectral radius of the (possibly directed) weighted adjacency matrix,
/// estimated by power iteration on A + I.
///
/// The identity shift moves the dominant eigenvalue to ρ + 1, which breaks
/// the ties that make plain power iteration oscillate on periodic graphs
/// (bipartite ±ρ pairs, directed cycles) while preserving the Perron vector.
pub fn estimate_spectral_radius(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    let mut rng = stream_rng(RADIUS_SEED, &[n as u64]);
    // Strictly positive start: never orthogonal to the Perron vector.
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.5).collect();
    let norm0 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm0);
    let mut y = vec![0.0; n];
    let mut prev = f64::INFINITY;
    let mut norm = 0.0;
    for _ in 0..RADIUS_MAX_ITERS {
        // y = (A + I) x.
        y.copy_from_slice(&x);
        for u in 0..n {
            let mut acc = 0.0;
            for (&v, &w) in g.out_neighbors(u as u32).iter().zip(g.out_weights(u as u32)) {
                acc += w * x[v as usize];
            }
            y[u] += acc;
        }
        norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0); // A = 0 and x vanished: impossible with the shift, defensive.
        }
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            *xi = yi / norm;
        }
        if (norm - prev).abs() <= RADIUS_TOL * norm.max(1.0) {
            return Ok((norm - 1.0).max(0.0));
        }
        prev = norm;
    }
    // A defective dominant eigenvalue (e.g. nilpotent adjacency of a DAG)
    // converges only like 1/k; the running estimate is still within ~1e-3
    // of the radius by now, which is accurate enough for divergence checks.
    warn!("spectral radius estimate stopped after {RADIUS_MAX_ITERS} iterations");
    Ok((norm - 1.0).max(0.0))
}
