//! Jacobi and Gauss–Seidel.

use alloc::vec;
use alloc::vec::Vec;

use super::{require_square, residual_into, start};
use crate::error::{Error, Result};
use crate::math::norm2;
use crate::report::{Breakdown, Recorder, SolveReport, SolverConfig, Status};
use crate::sparse::SparseMatrix;
use crate::vector::DenseVector;

fn nonzero_diagonal(a: &SparseMatrix) -> Result<Vec<f64>> {
    require_square(a)?;
    let d = a.diagonal();
    match d.iter().position(|&v| v == 0.0) {
        Some(j) => Err(Error::ZeroDiagonal(j)),
        None => Ok(d),
    }
}

/// `x_{n+1,j} = (b_j − Σ_{i≠j} a_ji x_{n,i}) / a_jj`.
///
/// One step costs `2𝒩_A` flops. The residual of `x_n` falls out of the same
/// sweep as `‖D (x_{n+1} − x_n)‖₂`, so the returned iterate is the last one whose
/// residual was measured.
pub fn jacobi_solve(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    let d = nonzero_diagonal(a)?;
    let mut x = start(a, b, x0, cfg)?;
    let eps = cfg.tolerance_for(b);
    let m = a.nrows();
    let mut next = vec![0.0; m];
    let mut rec = Recorder::new(cfg);
    let mut matvecs = 0u64;

    let status = loop {
        let n = rec.residuals.len();
        // next = (A − D) x
        next.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..m {
            let xj = x[j];
            for (i, v) in a.column(j) {
                if i != j {
                    next[i] += v * xj;
                }
            }
        }
        for i in 0..m {
            next[i] = (b[i] - next[i]) / d[i];
        }
        matvecs += 1;
        let residual = norm2(&(0..m).map(|i| d[i] * (next[i] - x[i])).collect::<Vec<_>>());
        rec.push(residual, matvecs - 1);
        if !residual.is_finite() {
            break Status::Breakdown(Breakdown::NonFinite { iteration: n });
        }
        if residual <= eps {
            break Status::Converged;
        }
        if n >= cfg.max_iter {
            break Status::MaxIterations;
        }
        core::mem::swap(&mut x, &mut next);
    };
    Ok(rec.finish(status, DenseVector::new(x)?, None))
}

/// `x_{n+1,j} = (b_j − Σ_{i<j} a_ji x_{n+1,i} − Σ_{i>j} a_ji x_{n,i}) / a_jj`,
/// swept in place over a row-major copy of `A` built once at setup.
pub fn gauss_seidel_solve(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    let d = nonzero_diagonal(a)?;
    let mut x = start(a, b, x0, cfg)?;
    let eps = cfg.tolerance_for(b);
    let rows = a.to_row_major();
    let m = a.nrows();
    let mut r = vec![0.0; m];
    let mut last_finite = x.clone();
    let mut rec = Recorder::new(cfg);
    let mut sweeps = 0u64;

    let status = loop {
        let n = rec.residuals.len();
        residual_into(a, &x, b, &mut r);
        let residual = norm2(&r);
        rec.push(residual, sweeps);
        if !residual.is_finite() {
            x = last_finite;
            break Status::Breakdown(Breakdown::NonFinite { iteration: n });
        }
        if residual <= eps {
            break Status::Converged;
        }
        if n >= cfg.max_iter {
            break Status::MaxIterations;
        }
        last_finite.copy_from_slice(&x);
        for j in 0..m {
            let mut s = b[j];
            for (i, v) in rows.row(j) {
                if i != j {
                    s -= v * x[i];
                }
            }
            x[j] = s / d[j];
        }
        sweeps += 1;
    };
    Ok(rec.finish(status, DenseVector::new(x)?, None))
}
