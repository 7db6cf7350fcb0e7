//! Reference loss and gradients for skip-gram with negative sampling, in f64.
//!
//! The training hot path works in f32 for speed; this module is the slow,
//! obviously-correct twin used for scoring and for gradient verification.

/// Dot products are clamped to this magnitude before the logistic function;
/// beyond it the sigmoid saturates past any useful gradient anyway.
pub const DOT_CLAMP: f64 = 30.0;

/// Numerically guarded logistic function.
pub fn sigmoid(x: f64) -> f64 {
    let c = x.clamp(-DOT_CLAMP, DOT_CLAMP);
    1.0 / (1.0 + (-c).exp())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Negative-sampling loss for one positive pair:
/// −log σ(φ·θ_j) − Σ_n log σ(−φ·θ_n).
pub fn sgns_loss(phi: &[f64], theta_j: &[f64], negatives: &[Vec<f64>]) -> f64 {
    let mut loss = -sigmoid(dot(phi, theta_j)).ln();
    for theta_n in negatives {
        loss -= sigmoid(-dot(phi, theta_n)).ln();
    }
    loss
}

/// Analytic gradients of [`sgns_loss`] with respect to every argument.
///
/// Returns (∂φ, ∂θ_j, ∂θ_n for each negative).
pub fn sgns_grad(
    phi: &[f64],
    theta_j: &[f64],
    negatives: &[Vec<f64>],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let d = phi.len();
    let g_pos = sigmoid(dot(phi, theta_j)) - 1.0;
    let mut d_phi: Vec<f64> = theta_j.iter().map(|t| g_pos * t).collect();
    let d_theta_j: Vec<f64> = phi.iter().map(|p| g_pos * p).collect();
    let mut d_negs = Vec::with_capacity(negatives.len());
    for theta_n in negatives {
        let g_neg = sigmoid(dot(phi, theta_n));
        for k in 0..d {
            d_phi[k] += g_neg * theta_n[k];
        }
        d_negs.push(phi.iter().map(|p| g_neg * p).collect());
    }
    (d_phi, d_theta_j, d_negs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::rng::stream_rng;

    #[test]
    fn zero_vectors_give_two_log_two() {
        let z = vec![0.0; 4];
        let loss = sgns_loss(&z, &z, &[z.clone()]);
        assert!((loss - 2.0 * 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unit_alignment_gives_the_tabulated_loss() {
        // φ=(1,0), θ_j=(1,0), θ_n=(−1,0): both terms are −log σ(1).
        let phi = vec![1.0, 0.0];
        let pos = vec![1.0, 0.0];
        let neg = vec![vec![-1.0, 0.0]];
        let want = -2.0 * sigmoid(1.0).ln();
        assert!((sgns_loss(&phi, &pos, &neg) - want).abs() < 1e-15);
        assert!((want - 0.6265233750364456).abs() < 1e-12);
    }

    #[test]
    fn saturated_pairs_cost_nothing() {
        let phi = vec![100.0, 0.0];
        let pos = vec![100.0, 0.0];
        let neg = vec![vec![-100.0, 0.0]];
        // Dots hit the clamp; σ(30) is 1 to within 1e-13.
        assert!(sgns_loss(&phi, &pos, &neg) < 1e-12);
    }

    #[test]
    fn sigmoid_is_bounded_and_monotone() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(f64::INFINITY) < 1.0);
        assert!(sigmoid(f64::NEG_INFINITY) > 0.0);
        assert!(sigmoid(1.0) > sigmoid(0.5));
    }

    /// Central finite differences, the gradient oracle's oracle.
    fn numeric_grad(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
        let mut g = Vec::with_capacity(x.len());
        let mut probe = x.to_vec();
        for k in 0..x.len() {
            probe[k] = x[k] + h;
            let up = f(&probe);
            probe[k] = x[k] - h;
            let down = f(&probe);
            probe[k] = x[k];
            g.push((up - down) / (2.0 * h));
        }
        g
    }

    fn assert_close(analytic: &[f64], numeric: &[f64], what: &str) {
        for (a, n) in analytic.iter().zip(numeric) {
            let scale = a.abs().max(n.abs()).max(1e-8);
            assert!(
                (a - n).abs() / scale < 1e-4,
                "{what}: analytic {a} vs numeric {n}"
            );
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = stream_rng(77, &[0]);
        let d = 6;
        for trial in 0..100 {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect()
            };
            let phi = draw(&mut rng);
            let theta_j = draw(&mut rng);
            let negs: Vec<Vec<f64>> = (0..3).map(|_| draw(&mut rng)).collect();
            let (d_phi, d_tj, d_negs) = sgns_grad(&phi, &theta_j, &negs);

            let num_phi = numeric_grad(|x| sgns_loss(x, &theta_j, &negs), &phi, 1e-5);
            assert_close(&d_phi, &num_phi, &format!("phi, trial {trial}"));

            let num_tj = numeric_grad(|x| sgns_loss(&phi, x, &negs), &theta_j, 1e-5);
            assert_close(&d_tj, &num_tj, &format!("theta_j, trial {trial}"));

            for (i, d_n) in d_negs.iter().enumerate() {
                let num_n = numeric_grad(
                    |x| {
                        let mut probe = negs.clone();
                        probe[i] = x.to_vec();
                        sgns_loss(&phi, &theta_j, &probe)
                    },
                    &negs[i],
                    1e-5,
                );
                assert_close(d_n, &num_n, &format!("neg {i}, trial {trial}"));
            }
        }
    }
}
