//! Conjugate gradients, and CG on the normal equations.

use alloc::vec;
use alloc::vec::Vec;

use super::{require_symmetric, residual_into, start};
use crate::error::{Error, Result};
use crate::math::{dot, norm2, sqrt};
use crate::report::{Breakdown, Recorder, SolveReport, SolverConfig, Status};
use crate::sparse::SparseMatrix;
use crate::vector::DenseVector;

/// State of the conjugate gradient recurrence for SPD `A`.
///
/// Each [`step`](Self::step) performs
///
/// ```text
/// α_j = r_jᵀr_j / p_jᵀAp_j,  x_{j+1} = x_j + α_j p_j,  r_{j+1} = r_j − α_j Ap_j,
/// β_j = r_{j+1}ᵀr_{j+1} / r_jᵀr_j,  p_{j+1} = r_{j+1} + β_j p_j
/// ```
///
/// at `2𝒩_A + 12m` flops. Symmetry is the caller's business.
#[derive(Debug, Clone)]
pub struct ConjugateGradient<'a> {
    a: &'a SparseMatrix,
    x: Vec<f64>,
    r: Vec<f64>,
    p: Vec<f64>,
    ap: Vec<f64>,
    rr: f64,
    iteration: usize,
}

impl<'a> ConjugateGradient<'a> {
    /// Sets `r_0 = p_0 = b − A x_0`.
    pub fn new(a: &'a SparseMatrix, b: &[f64], x0: &[f64]) -> Self {
        let mut r = vec![0.0; a.nrows()];
        residual_into(a, x0, b, &mut r);
        let rr = dot(&r, &r);
        Self {
            a,
            x: x0.to_vec(),
            p: r.clone(),
            ap: vec![0.0; a.nrows()],
            r,
            rr,
            iteration: 0,
        }
    }

    pub fn step(&mut self) -> Result<()> {
        self.a.spmv_into(&self.p, &mut self.ap, &mut ());
        let pap = dot(&self.p, &self.ap);
        if !(pap > 0.0) {
            return Err(Error::IndefiniteBreakdown {
                iteration: self.iteration,
            });
        }
        let alpha = self.rr / pap;
        for i in 0..self.x.len() {
            self.x[i] += alpha * self.p[i];
            self.r[i] -= alpha * self.ap[i];
        }
        let rr_next = dot(&self.r, &self.r);
        let beta = rr_next / self.rr;
        for (p, r) in self.p.iter_mut().zip(&self.r) {
            *p = r + beta * *p;
        }
        self.rr = rr_next;
        self.iteration += 1;
        Ok(())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// The recursively updated residual `r_j`.
    pub fn residual(&self) -> &[f64] {
        &self.r
    }

    pub fn residual_norm(&self) -> f64 {
        sqrt(self.rr)
    }

    /// The current search direction `p_j`.
    pub fn direction(&self) -> &[f64] {
        &self.p
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Replaces the recursive residual by `b − A x` and restarts the directions.
    fn refresh(&mut self, b: &[f64]) {
        residual_into(self.a, &self.x, b, &mut self.r);
        self.rr = dot(&self.r, &self.r);
        self.p.copy_from_slice(&self.r);
    }
}

/// Conjugate gradients for symmetric positive definite `A`.
///
/// `A` is checked for symmetry (relative `1e-12`) unless
/// `cfg.assume_symmetric`. A direction with `pᵀAp ≤ 0` is reported as
/// [`Error::IndefiniteBreakdown`]. The trace records the recursive residual;
/// when it passes the tolerance the true residual is checked and, if that is
/// still too large, the recurrence restarts from it.
pub fn cg_solve(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    require_symmetric(a, cfg)?;
    let x0 = start(a, b, x0, cfg)?;
    let eps = cfg.tolerance_for(b);
    let mut cg = ConjugateGradient::new(a, b, &x0);
    let mut rec = Recorder::new(cfg);
    let mut matvecs = 1u64;
    let mut true_residual = vec![0.0; a.nrows()];

    let status = loop {
        let n = rec.residuals.len();
        let mut residual = cg.residual_norm();
        if residual <= eps {
            residual_into(a, &cg.x, b, &mut true_residual);
            matvecs += 1;
            residual = norm2(&true_residual);
            if residual > eps {
                cg.refresh(b);
            }
        }
        rec.push(residual, matvecs);
        if !residual.is_finite() {
            break Status::Breakdown(Breakdown::NonFinite { iteration: n });
        }
        if residual <= eps {
            break Status::Converged;
        }
        if n >= cfg.max_iter {
            break Status::MaxIterations;
        }
        cg.step()?;
        matvecs += 1;
    };
    Ok(rec.finish(status, DenseVector::new(cg.x)?, None))
}

/// Conjugate gradients on `AᵀA x = Aᵀb` without forming `AᵀA` (the CGLS
/// arrangement: one product with `A` and one with `Aᵀ` per step).
///
/// The trace records `‖A x_n − b‖₂` on the original system and the stopping
/// test uses the same quantity.
pub fn normal_equation_solve(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut x = start(a, b, x0, cfg)?;
    let eps = cfg.tolerance_for(b);
    let (m1, m2) = (a.nrows(), a.ncols());
    let mut r = vec![0.0; m1];
    residual_into(a, &x, b, &mut r);
    let mut s = vec![0.0; m2];
    a.spmv_transpose_into(&r, &mut s, &mut ());
    let mut p = s.clone();
    let mut ss = dot(&s, &s);
    let mut q = vec![0.0; m1];
    let mut rec = Recorder::new(cfg);
    let mut matvecs = 2u64;

    let status = loop {
        let n = rec.residuals.len();
        let residual = norm2(&r);
        rec.push(residual, matvecs);
        if !residual.is_finite() {
            break Status::Breakdown(Breakdown::NonFinite { iteration: n });
        }
        if residual <= eps {
            break Status::Converged;
        }
        if n >= cfg.max_iter {
            break Status::MaxIterations;
        }
        a.spmv_into(&p, &mut q, &mut ());
        let qq = dot(&q, &q);
        if !(qq > 0.0) {
            return Err(Error::IndefiniteBreakdown { iteration: n });
        }
        let alpha = ss / qq;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= alpha * qi;
        }
        a.spmv_transpose_into(&r, &mut s, &mut ());
        matvecs += 2;
        let ss_next = dot(&s, &s);
        let beta = ss_next / ss;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
        ss = ss_next;
    };
    Ok(rec.finish(status, DenseVector::new(x)?, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{dense_solve, from_dense, rand_matrix, Lcg};
    use proptest::prelude::*;

    /// Cholesky solve of a dense SPD matrix.
    fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                l[i][j] = if i == j { s.sqrt() } else { s / l[j][j] };
            }
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
        }
        x
    }

    fn spd(rng: &mut Lcg, n: usize) -> Vec<Vec<f64>> {
        let b = rand_matrix(rng, n, n, -1.0, 1.0);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| b[k][i] * b[k][j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn identity_one_iteration() {
        let r = cg_solve(
            &SparseMatrix::identity(4),
            &[1.0, 2.0, 3.0, 4.0],
            None,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(r.status, Status::Converged);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.x.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn spd_five_by_five_against_cholesky() {
        let mut rng = Lcg(7);
        let a = spd(&mut rng, 5);
        let b: Vec<f64> = (0..5).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let want = cholesky_solve(&a, &b);
        let r = cg_solve(&from_dense(&a), &b, None, &SolverConfig::default().with_tol(1e-12)).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!(r.iterations <= 6, "{}", r.iterations);
        for (x, w) in r.x.iter().zip(&want) {
            assert!((x - w).abs() < 1e-8);
        }
    }

    #[test]
    fn indefinite_breaks_down() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let e = cg_solve(&a, &[1.0, 1.0], None, &SolverConfig::default());
        assert_eq!(e, Err(Error::IndefiniteBreakdown { iteration: 0 }));
    }

    #[test]
    fn nonsymmetric_is_rejected() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(
            cg_solve(&a, &[1.0, 1.0], None, &SolverConfig::default()),
            Err(Error::NotSymmetric)
        );
        let cfg = SolverConfig {
            assume_symmetric: true,
            ..SolverConfig::default()
        };
        assert!(cg_solve(&a, &[1.0, 1.0], None, &cfg).is_ok());
    }

    #[test]
    fn normal_equation_identity_and_general() {
        let r = normal_equation_solve(
            &SparseMatrix::identity(3),
            &[1.0, -2.0, 3.0],
            None,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(r.x.as_slice(), &[1.0, -2.0, 3.0]);

        let mut rng = Lcg(11);
        let mut a = rand_matrix(&mut rng, 8, 8, -1.0, 1.0);
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 4.0;
        }
        let b: Vec<f64> = (0..8).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let want = dense_solve(&a, &b).unwrap();
        let cfg = SolverConfig::default().with_tol(1e-12).with_max_iter(1000);
        let r = normal_equation_solve(&from_dense(&a), &b, None, &cfg).unwrap();
        assert_eq!(r.status, Status::Converged);
        for (x, w) in r.x.iter().zip(&want) {
            assert!((x - w).abs() < 1e-6);
        }
    }

    #[test]
    fn residual_trace_is_true_residual_at_the_end() {
        let mut rng = Lcg(3);
        let a = from_dense(&spd(&mut rng, 12));
        let b = vec![1.0; 12];
        let r = cg_solve(&a, &b, None, &SolverConfig::default()).unwrap();
        let ax = a.spmv(&r.x).unwrap();
        let res = norm2(&ax.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>());
        assert_eq!(r.final_residual(), res);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn directions_are_conjugate(seed in any::<u64>(), n in 2usize..30) {
            let mut rng = Lcg(seed);
            let dense = spd(&mut rng, n);
            let a = from_dense(&dense);
            let b: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let mut cg = ConjugateGradient::new(&a, &b, &vec![0.0; n]);
            let mut dirs = vec![cg.direction().to_vec()];
            let r0 = cg.residual_norm();
            while cg.iteration() < n.min(8) && cg.residual_norm() > 1e-6 * r0 {
                cg.step().unwrap();
                dirs.push(cg.direction().to_vec());
            }
            dirs.pop();
            let ap: Vec<Vec<f64>> = dirs.iter().map(|p| a.spmv(p).unwrap().into_inner()).collect();
            for i in 0..dirs.len() {
                for j in 0..i {
                    let c = dot(&dirs[i], &ap[j]);
                    let scale = (dot(&dirs[i], &ap[i]) * dot(&dirs[j], &ap[j])).sqrt();
                    prop_assert!(c.abs() <= 1e-8 * scale, "p{}ᵀAp{} = {} (scale {})", i, j, c, scale);
                }
            }
        }
    }
}
