//! Classical iterative solvers used as comparison points for NNA.
//!
//! All of them take the same [`SolverConfig`] and return a [`SolveReport`]
//! whose residual trace starts at `x0`, which defaults to zero. `kl_trace` is
//! empty and `shift` is `None`. `matvec_trace` counts the products with `A` or
//! `Aᵀ` the method needs; the residual monitors of Jacobi and Gauss–Seidel are
//! not counted.

mod cg;
mod dominance;
mod krylov;
mod stationary;

pub use cg::{cg_solve, normal_equation_solve, ConjugateGradient};
pub use dominance::{dominance_class, Dominance, DominanceClass};
pub use krylov::{arnoldi, gmres_restarted, lanczos, minres_solve, KrylovWorkspace, LanczosState};
pub use stationary::{gauss_seidel_solve, jacobi_solve};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::SolverConfig;
use crate::sparse::SparseMatrix;
use crate::vector::{check_finite, check_len};

fn require_square(a: &SparseMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        })
    }
}

fn require_symmetric(a: &SparseMatrix, cfg: &SolverConfig) -> Result<()> {
    require_square(a)?;
    if cfg.assume_symmetric || a.is_symmetric(1e-12) {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

/// Validates `b` and `x0` and returns the starting iterate.
fn start(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_len(b, a.nrows())?;
    check_finite(b)?;
    match x0 {
        Some(x) => {
            check_len(x, a.ncols())?;
            check_finite(x)?;
            Ok(x.to_vec())
        }
        None => Ok(vec![0.0; a.ncols()]),
    }
}

/// `r = b − A x`
fn residual_into(a: &SparseMatrix, x: &[f64], b: &[f64], r: &mut [f64]) {
    a.spmv_into(x, r, &mut ());
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}
