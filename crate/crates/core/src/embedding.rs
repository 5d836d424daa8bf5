//! Embedding of an arbitrary-sign system into a nonnegative one.
//!
//! For `A x = b` let `𝒥` be the columns of `A` holding a negative entry and
//! `J = |𝒥|`. With `A⁺ = max(A, 0)`, `Ã⁻` the nonzero columns of `−min(A, 0)`
//! and `D` the `J × m₂` selector of `𝒥`,
//!
//! ```text
//! P = [ A⁺  Ã⁻ ]     c = [ b ]
//!     [ D   I_J ]         [ 0 ]
//! ```
//!
//! is nonnegative, and every solution `y` of `P y = c` has `y_{m₂+k} = −y_{j_k}`,
//! so its first `m₂` components solve `A x = b`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::math::{abs, dist2};
use crate::nna::{solve_with, ResidualMode};
use crate::report::{SolveReport, SolverConfig};
use crate::sparse::SparseMatrix;
use crate::vector::{check_finite, check_len, DenseVector};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSystem {
    p: SparseMatrix,
    c: DenseVector,
    neg_cols: Vec<usize>,
    m1: usize,
    m2: usize,
}

impl EmbeddedSystem {
    pub fn p(&self) -> &SparseMatrix {
        &self.p
    }

    pub fn c(&self) -> &DenseVector {
        &self.c
    }

    /// The sorted columns `𝒥` of `A` that contain a negative entry.
    pub fn neg_cols(&self) -> &[usize] {
        &self.neg_cols
    }

    pub fn j(&self) -> usize {
        self.neg_cols.len()
    }

    /// Dimensions `(m₁, m₂)` of the original system.
    pub fn original_dims(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    /// All ones, the default start.
    pub fn positive_start(&self) -> DenseVector {
        DenseVector::ones(self.m2 + self.j())
    }

    /// `(x₀, −x₀ restricted to 𝒥)`, a start that satisfies the slack rows exactly.
    pub fn mirrored_start(&self, x0: &[f64]) -> Result<DenseVector> {
        check_len(x0, self.m2)?;
        let mut y = x0.to_vec();
        y.extend(self.neg_cols.iter().map(|&j| -x0[j]));
        DenseVector::new(y)
    }

    /// `max_k |y_{j_k} + y_{m₂+k}|`, zero at any exact solution of `P y = c`.
    pub fn defect(&self, y: &[f64]) -> Result<f64> {
        check_len(y, self.m2 + self.j())?;
        Ok(self
            .neg_cols
            .iter()
            .enumerate()
            .map(|(k, &j)| abs(y[j] + y[self.m2 + k]))
            .fold(0.0, f64::max))
    }
}

/// Builds the minimal nonnegative embedding of `A x = b`.
///
/// A nonnegative `A` comes back unchanged with `J = 0`.
pub fn embed(a: &SparseMatrix, b: &[f64]) -> Result<EmbeddedSystem> {
    check_len(b, a.nrows())?;
    check_finite(b)?;
    let (m1, m2) = (a.nrows(), a.ncols());
    let neg_cols: Vec<usize> = (0..m2).filter(|&j| a.column(j).any(|(_, v)| v < 0.0)).collect();
    let jn = neg_cols.len();
    let mut slot = vec![usize::MAX; m2];
    for (k, &j) in neg_cols.iter().enumerate() {
        slot[j] = k;
    }

    let mut triplets = Vec::with_capacity(a.nnz() + 2 * jn);
    for (i, j, v) in a.entries() {
        if v > 0.0 {
            triplets.push((i, j, v));
        } else {
            triplets.push((i, m2 + slot[j], -v));
        }
    }
    for (k, &j) in neg_cols.iter().enumerate() {
        triplets.push((m1 + k, j, 1.0));
        triplets.push((m1 + k, m2 + k, 1.0));
    }
    let p = SparseMatrix::from_triplets(m1 + jn, m2 + jn, &triplets)?;
    let mut c = b.to_vec();
    c.resize(m1 + jn, 0.0);
    Ok(EmbeddedSystem {
        p,
        c: DenseVector::new(c)?,
        neg_cols,
        m1,
        m2,
    })
}

/// The first `m₂` components of `y`.
pub fn extract(y: &[f64], sys: &EmbeddedSystem) -> Result<DenseVector> {
    check_len(y, sys.m2 + sys.j())?;
    DenseVector::new(y[..sys.m2].to_vec())
}

/// Solves `A x = b` for any real `A` by running NNA on the embedding.
///
/// `x0` is mirrored into the slack variables; without it the all-ones start
/// is used. The residual trace and the stopping test use `‖A x_n − b‖₂` on the
/// original system, and `x` is the extracted solution.
pub fn general_solve(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    let sys = embed(a, b)?;
    let y0 = match x0 {
        Some(x) => sys.mirrored_start(x)?,
        None => sys.positive_start(),
    };
    let eps = cfg.tolerance_for(b);
    let m2 = sys.m2;
    let mut ax = vec![0.0; a.nrows()];
    let mut residual = |y: &[f64]| {
        a.spmv_into(&y[..m2], &mut ax, &mut ());
        dist2(&ax, b)
    };
    let mut report = solve_with(&sys.p, &sys.c, Some(&y0), cfg, eps, ResidualMode::Custom(&mut residual))?;
    report.x = extract(&report.x, &sys)?;
    Ok(report)
}
