//! Dense one-sided Jacobi SVD.
//!
//! Slow but numerically transparent; serves as the brute-force reference the
//! randomized factorizer is measured against. Capped at 200×200 — production
//! paths must not route through this.

/// Hard cap: this solver is O(min(rows,cols)²·max(rows,cols)) per sweep.
pub const JACOBI_DIM_LIMIT: usize = 200;

/// Full SVD of a dense row-major matrix: returns (U, σ, V) with
/// r = min(rows, cols) columns each, σ non-increasing, and
/// A = U·diag(σ)·Vᵀ. U is rows×r and V is cols×r, both row-major.
pub fn jacobi_svd(rows: usize, cols: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), rows * cols, "matrix data does not match its shape");
    assert!(
        rows.max(cols) <= JACOBI_DIM_LIMIT,
        "reference SVD is capped at {JACOBI_DIM_LIMIT}"
    );
    // One-sided Jacobi orthogonalizes the columns of A; run it on whichever
    // orientation has fewer columns and swap the factors back.
    if cols > rows {
        let mut at = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                at[j * rows + i] = a[i * cols + j];
            }
        }
        let (u, s, v) = jacobi_svd(cols, rows, &at);
        return (v, s, u);
    }

    // Column-major working copy of A and accumulated rotations V.
    let n = cols;
    let mut w: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..rows).map(|i| a[i * cols + j]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    app += w[p][i] * w[p][i];
                    aqq += w[q][i] * w[q][i];
                    apq += w[p][i] * w[q][i];
                }
                if apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Classic stable rotation choice.
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (wp, wq) = (w[p][i], w[q][i]);
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[p][i], v[q][i]);
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u = vec![0.0; rows * n];
    let mut sigma = vec![0.0; n];
    let mut vout = vec![0.0; cols * n];
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        if norms[j] > 0.0 {
            for i in 0..rows {
                u[i * n + k] = w[j][i] / norms[j];
            }
        }
        for i in 0..n {
            vout[i * n + k] = v[j][i];
        }
    }
    (u, sigma, vout)
}

/// Best achievable rank-`d` Frobenius residual given a full singular
/// spectrum: the Euclidean norm of the dropped tail.
pub fn optimal_residual(sigma: &[f64], d: usize) -> f64 {
    sigma[d.min(sigma.len())..]
        .iter()
        .map(|s| s * s)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::rng::{gaussian, stream_rng};

    fn reconstruct(rows: usize, cols: usize, u: &[f64], s: &[f64], v: &[f64]) -> Vec<f64> {
        let r = s.len();
        let mut a = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                a[i * cols + j] =
                    (0..r).map(|k| u[i * r + k] * s[k] * v[j * r + k]).sum();
            }
        }
        a
    }

    fn assert_orthonormal(rows: usize, r: usize, m: &[f64]) {
        for a in 0..r {
            for b in 0..r {
                let dot: f64 = (0..rows).map(|i| m[i * r + a] * m[i * r + b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "col {a}·col {b} = {dot}");
            }
        }
    }

    #[test]
    fn known_two_by_two_spectrum() {
        // AᵀA = [[25, 20], [20, 25]] has eigenvalues 45 and 5.
        let a = [3.0, 0.0, 4.0, 5.0];
        let (u, s, v) = jacobi_svd(2, 2, &a);
        assert!((s[0] - 45f64.sqrt()).abs() < 1e-12);
        assert!((s[1] - 5f64.sqrt()).abs() < 1e-12);
        let back = reconstruct(2, 2, &u, &s, &v);
        for (x, y) in back.iter().zip(&a) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn random_rectangular_factorizations_reconstruct() {
        let mut rng = stream_rng(17, &[0]);
        for &(rows, cols) in &[(12usize, 7usize), (7, 12), (9, 9)] {
            let a: Vec<f64> = (0..rows * cols).map(|_| gaussian(&mut rng)).collect();
            let (u, s, v) = jacobi_svd(rows, cols, &a);
            let r = rows.min(cols);
            assert_eq!(s.len(), r);
            assert!(s.windows(2).all(|w| w[0] >= w[1]), "sorted spectrum");
            assert_orthonormal(rows, r, &u);
            assert_orthonormal(cols, r, &v);
            let back = reconstruct(rows, cols, &u, &s, &v);
            for (x, y) in back.iter().zip(&a) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tail_norm_is_the_optimal_residual() {
        let sigma = [4.0, 3.0, 0.0];
        assert_eq!(optimal_residual(&sigma, 0), 5.0);
        assert_eq!(optimal_residual(&sigma, 1), 3.0);
        assert_eq!(optimal_residual(&sigma, 3), 0.0);
        assert_eq!(optimal_residual(&sigma, 9), 0.0);
    }
}
