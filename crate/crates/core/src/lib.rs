//! Sparse linear solvers built around the EM-derived nonnegative algorithm (NNA).
//!
//! The multiplicative update
//!
//! ```text
//! x_{n+1} = (Ãᵀ (b̃ / Ã x_n)) ∘ x_n
//! ```
//!
//! solves a nonnegative system `Ã x̃ = b̃` whose columns sum to one. Arbitrary
//! systems are handled by shifting the unknowns ([`nna::shift`]) and by embedding
//! mixed-sign matrices into a larger nonnegative one ([`embedding::embed`]).
//! Consistent systems converge to the solution; inconsistent ones converge to the
//! point of minimal Kullback–Leibler divergence `D(b̃, Ã x̃)`.
//!
//! The [`baselines`] module carries the classical comparison solvers: Jacobi,
//! Gauss–Seidel, conjugate gradients, restarted GMRES(k), MINRES(k) via Lanczos,
//! and CG on the normal equations.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, generators and the
//! command line live in the companion `nna` crate.
//!
//! ```
//! use nna_core::{nna::nna_solve, SolverConfig, SparseMatrix, Status};
//!
//! let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 4.0), (0, 1, 1.0)]).unwrap();
//! let report = nna_solve(&a, &[3.0, 4.0], None, &SolverConfig::default()).unwrap();
//! assert_eq!(report.status, Status::Converged);
//! assert!((report.x[0] - 1.0).abs() < 1e-6 && (report.x[1] - 1.0).abs() < 1e-6);
//! ```
#![no_std]
#![deny(rust_2018_idioms)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
mod dense;
pub mod embedding;
mod error;
pub mod flops;
mod math;
pub mod metrics;
pub mod nna;
mod report;
pub mod sparse;
#[cfg(test)]
mod testutil;
mod vector;

pub use error::{Error, Result};
pub use metrics::Divergence;
pub use report::{Breakdown, Shift, SolveReport, SolverConfig, Status};
pub use sparse::SparseMatrix;
pub use vector::DenseVector;
