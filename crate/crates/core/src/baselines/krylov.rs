//! Restarted GMRES(k) with Arnoldi, and MINRES(k) with Lanczos.
//!
//! Both share the outer logic: build `k` basis vectors from `r₀`, solve
//! `min_y ‖βe₁ − H_k y‖₂` by Givens rotations applied one column at a time,
//! update `x ← x + V_k y` and restart from the new residual.

use alloc::vec;
use alloc::vec::Vec;

use super::{require_square, require_symmetric, residual_into, start};
use crate::error::{Error, Result};
use crate::math::{dot, norm2, sqrt};
use crate::report::{Breakdown, Recorder, SolveReport, SolverConfig, Status};
use crate::sparse::SparseMatrix;
use crate::vector::{check_len, DenseVector};

/// Orthonormal basis and Hessenberg matrix from one Arnoldi run.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovWorkspace {
    /// `v_1, …, v_{k+1}` (only `k` when the run ended in a happy breakdown).
    pub v: Vec<Vec<f64>>,
    /// `h[i][j]`, `(k+1) × k`, zero below the first subdiagonal.
    pub h: Vec<Vec<f64>>,
    pub beta: f64,
}

impl KrylovWorkspace {
    /// Number of Arnoldi steps taken.
    pub fn steps(&self) -> usize {
        self.h.first().map_or(0, |row| row.len())
    }

    /// `min_y ‖βe₁ − H_j y‖₂` for `j = 1, …, k`.
    pub fn least_squares_residuals(&self) -> Vec<f64> {
        let k = self.steps();
        let mut ls = Givens::new(self.beta, k);
        (0..k)
            .map(|j| {
                let col: Vec<f64> = (0..j + 2).map(|i| self.h[i][j]).collect();
                ls.push(col)
            })
            .collect()
    }
}

/// Tridiagonal coefficients from one Lanczos run, with `α_j = h_jj` and
/// `β_j = h_{j−1,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosState {
    pub alpha: Vec<f64>,
    /// `β_1 = 0, β_2, …, β_{k+1}`.
    pub beta: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Process {
    Arnoldi,
    Lanczos,
}

/// Extends the basis by one vector and returns column `j` of `H` (length
/// `j + 2`) and whether the space became invariant (`h_{j+1,j} < tol`).
fn expand(a: &SparseMatrix, process: Process, v: &mut Vec<Vec<f64>>, prev_beta: f64, tol: f64) -> (Vec<f64>, bool) {
    let j = v.len() - 1;
    let mut w = vec![0.0; a.nrows()];
    a.spmv_into(&v[j], &mut w, &mut ());
    let mut col = vec![0.0; j + 2];
    match process {
        Process::Arnoldi => {
            // Modified Gram–Schmidt.
            for i in 0..=j {
                let h = dot(&w, &v[i]);
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= h * vk;
                }
                col[i] = h;
            }
        }
        Process::Lanczos => {
            if j > 0 {
                for (wk, vk) in w.iter_mut().zip(&v[j - 1]) {
                    *wk -= prev_beta * vk;
                }
                col[j - 1] = prev_beta;
            }
            let alpha = dot(&w, &v[j]);
            for (wk, vk) in w.iter_mut().zip(&v[j]) {
                *wk -= alpha * vk;
            }
            col[j] = alpha;
        }
    }
    let h = norm2(&w);
    col[j + 1] = h;
    let happy = !(h >= tol);
    if !happy {
        w.iter_mut().for_each(|x| *x /= h);
        v.push(w);
    }
    (col, happy)
}

fn unit(r0: &[f64]) -> (f64, Vec<f64>) {
    let beta = norm2(r0);
    (beta, r0.iter().map(|x| x / beta).collect())
}

/// Runs `k` Arnoldi steps from `r0`, stopping early when `h_{j+1,j} < tol`.
pub fn arnoldi(a: &SparseMatrix, r0: &[f64], k: usize, tol: f64) -> Result<KrylovWorkspace> {
    require_square(a)?;
    check_len(r0, a.nrows())?;
    let (beta, v1) = unit(r0);
    let mut v = vec![v1];
    let mut cols = Vec::new();
    if beta > 0.0 {
        for _ in 0..k {
            let (col, happy) = expand(a, Process::Arnoldi, &mut v, 0.0, tol);
            cols.push(col);
            if happy {
                break;
            }
        }
    }
    let steps = cols.len();
    let mut h = vec![vec![0.0; steps]; steps + 1];
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            h[i][j] = x;
        }
    }
    Ok(KrylovWorkspace { v, h, beta })
}

/// Runs `k` Lanczos steps from `r0`, stopping early when `β_{j+1} < tol`.
pub fn lanczos(a: &SparseMatrix, r0: &[f64], k: usize, tol: f64) -> Result<LanczosState> {
    require_square(a)?;
    check_len(r0, a.nrows())?;
    let (beta0, v1) = unit(r0);
    let mut v = vec![v1];
    let mut alpha = Vec::new();
    let mut beta = vec![0.0];
    if beta0 > 0.0 {
        for _ in 0..k {
            let (col, happy) = expand(a, Process::Lanczos, &mut v, *beta.last().unwrap(), tol);
            let j = col.len() - 2;
            alpha.push(col[j]);
            beta.push(col[j + 1]);
            if happy {
                break;
            }
        }
    }
    Ok(LanczosState { alpha, beta, v })
}

/// Incremental QR of a Hessenberg matrix by Givens rotations.
struct Givens {
    cs: Vec<f64>,
    sn: Vec<f64>,
    /// Upper-triangular factor, column by column.
    r: Vec<Vec<f64>>,
    g: Vec<f64>,
}

impl Givens {
    fn new(beta: f64, k: usize) -> Self {
        let mut g = vec![0.0; k + 1];
        g[0] = beta;
        Self {
            cs: Vec::with_capacity(k),
            sn: Vec::with_capacity(k),
            r: Vec::with_capacity(k),
            g,
        }
    }

    /// Adds column `j` and returns the least-squares residual `|g_{j+1}|`.
    /// A column that leaves `R` singular is not added.
    fn push(&mut self, mut col: Vec<f64>) -> f64 {
        let j = self.r.len();
        for i in 0..j {
            let t = self.cs[i] * col[i] + self.sn[i] * col[i + 1];
            col[i + 1] = -self.sn[i] * col[i] + self.cs[i] * col[i + 1];
            col[i] = t;
        }
        let (p, q) = (col[j], col[j + 1]);
        let rho = sqrt(p * p + q * q);
        if rho == 0.0 {
            return self.g[j].abs();
        }
        let (c, s) = (p / rho, q / rho);
        col[j] = rho;
        col.truncate(j + 1);
        self.cs.push(c);
        self.sn.push(s);
        self.r.push(col);
        self.g[j + 1] = -s * self.g[j];
        self.g[j] *= c;
        self.g[j + 1].abs()
    }

    /// Back substitution for `R y = g`.
    fn solve(&self) -> Vec<f64> {
        let n = self.r.len();
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = self.g[i];
            for (jj, yj) in y.iter().enumerate().skip(i + 1) {
                s -= self.r[jj][i] * yj;
            }
            y[i] = s / self.r[i][i];
        }
        y
    }
}

fn restarted(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    k: usize,
    cfg: &SolverConfig,
    process: Process,
) -> Result<SolveReport> {
    if k == 0 {
        return Err(Error::InvalidConfig("restart length k must be at least 1"));
    }
    let mut x = start(a, b, x0, cfg)?;
    let eps = cfg.tolerance_for(b);
    let mut r = vec![0.0; a.nrows()];
    residual_into(a, &x, b, &mut r);
    let mut matvecs = 1u64;
    let mut rec = Recorder::new(cfg);
    let mut beta = norm2(&r);
    rec.push(beta, matvecs);
    let mut inner = 0usize;

    let status = loop {
        if !beta.is_finite() {
            break Status::Breakdown(Breakdown::NonFinite { iteration: inner });
        }
        if beta <= eps {
            break Status::Converged;
        }
        if inner >= cfg.max_iter {
            break Status::MaxIterations;
        }
        let mut v = vec![r.iter().map(|x| x / beta).collect::<Vec<f64>>()];
        let mut ls = Givens::new(beta, k);
        let mut prev_beta = 0.0;
        for _ in 0..k {
            if inner >= cfg.max_iter {
                break;
            }
            let (col, happy) = expand(a, process, &mut v, prev_beta, eps);
            prev_beta = col[col.len() - 1];
            matvecs += 1;
            inner += 1;
            let estimate = ls.push(col);
            rec.push(estimate, matvecs);
            if happy || estimate <= eps {
                break;
            }
        }
        let y = ls.solve();
        for (yj, vj) in y.iter().zip(&v) {
            for (xi, vi) in x.iter_mut().zip(vj) {
                *xi += yj * vi;
            }
        }
        residual_into(a, &x, b, &mut r);
        matvecs += 1;
        beta = norm2(&r);
        rec.replace_last(beta, matvecs);
    };
    Ok(rec.finish(status, DenseVector::new(x)?, None))
}

/// Restarted GMRES(k), `x_{n+1} = G_k(x_n)`.
///
/// `max_iter` bounds the total number of inner Arnoldi steps. The trace has one
/// entry per inner step holding the Givens estimate of the residual; the last
/// entry of each cycle is the true residual `‖b − A x‖₂` computed for the restart.
/// A cycle ends early on a happy breakdown `h_{j+1,j} < ε_tol` or once the
/// estimate reaches `ε_tol`.
pub fn gmres_restarted(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    k: usize,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    require_square(a)?;
    restarted(a, b, x0, k, cfg, Process::Arnoldi)
}

/// MINRES(k): the GMRES(k) outer loop with the Lanczos three-term recurrence
/// for symmetric `A`. Same trace conventions as [`gmres_restarted`].
pub fn minres_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    k: usize,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    require_symmetric(a, cfg)?;
    restarted(a, b, x0, k, cfg, Process::Lanczos)
}
