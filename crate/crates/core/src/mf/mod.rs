//! Truncated SVD of explicit or implicit context matrices.
//!
//! `factorize` handles explicit sparse matrices, `factorize_op` anything
//! that can apply itself to a vector; `jacobi` keeps the slow dense
//! reference solver the randomized path is validated against.

pub mod factorize;
pub mod jacobi;
pub mod op;

pub use factorize::{factorize, factorize_op, residual_check, FactorizationResult};
pub use jacobi::{jacobi_svd, optimal_residual};
pub use op::{KatzOp, LinearOp};
