//! Matrix-free linear operators for the randomized factorizer.
//!
//! Explicit context matrices implement the interface directly; the Katz
//! operator applies the damped path series without ever materializing it,
//! which is what makes factorization tractable past a few thousand nodes.

use crate::context::{estimate_spectral_radius, ContextMatrix};
use crate::graph::Graph;
use crate::{Error, Result};

/// Anything that can apply itself (and its transpose) to a vector.
pub trait LinearOp: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// y = A·x.
    fn matvec(&self, x: &[f64], y: &mut [f64]);
    /// y = Aᵀ·x.
    fn rmatvec(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOp for ContextMatrix {
    fn rows(&self) -> usize {
        ContextMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        ContextMatrix::cols(self)
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        ContextMatrix::matvec(self, x, y);
    }

    fn rmatvec(&self, x: &[f64], y: &mut [f64]) {
        ContextMatrix::rmatvec(self, x, y);
    }
}

/// The truncated Katz series Σ_{ℓ=1..terms} β^ℓ·A^ℓ as an implicit operator.
/// One application costs `terms` sparse adjacency products (Horner form),
/// so memory stays linear in the arc count.
pub struct KatzOp<'g> {
    g: &'g Graph,
    beta: f64,
    terms: usize,
}

/// Series length is chosen so the dropped tail is below `tol` relative to
/// the leading term; pathological damping close to the divergence boundary
/// is clamped here (with a warning) instead of looping forever.
const MAX_OP_TERMS: usize = 512;
const MIN_OP_TERMS: usize = 4;

impl<'g> KatzOp<'g> {
    pub fn new(g: &'g Graph, beta: f64, tol: f64) -> Result<KatzOp<'g>> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidConfig(format!("katz damping must be positive, got {beta}")));
        }
        if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidConfig(format!("tail tolerance must be in (0,1), got {tol}")));
        }
        let rho = estimate_spectral_radius(g)?;
        let ratio = beta * rho;
        if ratio >= 1.0 {
            return Err(Error::Divergent { beta, spectral_radius: rho });
        }
        // (β·ρ)^terms ≤ tol bounds the relative tail mass.
        let terms = if ratio <= 1e-12 {
            MIN_OP_TERMS
        } else {
            let t = (tol.ln() / ratio.ln()).ceil();
            if t as usize > MAX_OP_TERMS {
                log::warn!(
                    "katz operator truncated at {MAX_OP_TERMS} terms \
                     (damping ratio {ratio:.4} decays too slowly for tol {tol:.1e})"
                );
                MAX_OP_TERMS
            } else {
                (t as usize).max(MIN_OP_TERMS)
            }
        };
        Ok(KatzOp { g, beta, terms })
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// z ← β·A·(x + z), the Horner step shared by both orientations.
    fn horner(&self, x: &[f64], transpose: bool) -> Vec<f64> {
        let n = self.g.node_count();
        let mut z = vec![0.0; n];
        let mut buf = vec![0.0; n];
        for _ in 0..self.terms {
            for (b, (&xv, &zv)) in buf.iter_mut().zip(x.iter().zip(&z)) {
                *b = xv + zv;
            }
            z.iter_mut().for_each(|v| *v = 0.0);
            for (u, v, w) in self.g.arcs() {
                if transpose {
                    z[v as usize] += self.beta * w * buf[u as usize];
                } else {
                    z[u as usize] += self.beta * w * buf[v as usize];
                }
            }
        }
        z
    }
}

impl LinearOp for KatzOp<'_> {
    fn rows(&self) -> usize {
        self.g.node_count()
    }

    fn cols(&self) -> usize {
        self.g.node_count()
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.horner(x, false));
    }

    fn rmatvec(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.horner(x, true));
    }
}
