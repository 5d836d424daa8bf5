//! The nonnegative algorithm.
//!
//! For `A ≥ 0` and `b > 0` the problem is rescaled to column-stochastic form
//! `Ã x̃ = b̃` with `Ã = (a_ij / a_{·j})`, `x̃_j = x_j a_{·j} / b_·` and
//! `b̃ = b / b_·`. The EM update
//!
//! ```text
//! b_n = Ã x̃_n,   c_n = b̃ / b_n,   x̃_{n+1} = (Ãᵀ c_n) ∘ x̃_n
//! ```
//!
//! keeps every iterate positive and on the simplex, decreases `D(x̃*, x̃_n)` by at
//! least `D(b̃, b_n)` per step on consistent systems, and drives `D(b̃, b_n)` down
//! to its infimum on inconsistent ones.
//!
//! Right-hand sides with nonpositive entries, and solutions with negative
//! entries, are handled by the shift `x_t = x + t·1`, `b_t = b + t·A·1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::flops::Flops;
use crate::math::{abs, dist2, norm_inf};
use crate::metrics::{i_divergence, kl_divergence, Divergence};
use crate::report::{Breakdown, Recorder, Shift, SolveReport, SolverConfig, Status};
use crate::sparse::SparseMatrix;
use crate::vector::{check_finite, check_len, DenseVector};

/// Column-stochastic rescaling of a nonnegative system.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegativeSystem {
    a_tilde: SparseMatrix,
    b_tilde: DenseVector,
    col_scale: DenseVector,
    b_total: f64,
}

impl NonnegativeSystem {
    pub fn a_tilde(&self) -> &SparseMatrix {
        &self.a_tilde
    }

    pub fn b_tilde(&self) -> &DenseVector {
        &self.b_tilde
    }

    /// The original column sums `a_{·j}`.
    pub fn col_scale(&self) -> &DenseVector {
        &self.col_scale
    }

    /// `b_· = Σ_i b_i`.
    pub fn b_total(&self) -> f64 {
        self.b_total
    }

    /// `x̃_j = x_j a_{·j} / b_·`.
    pub fn to_rescaled(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.col_scale.iter())
            .map(|(xj, s)| xj * s / self.b_total)
            .collect()
    }

    /// `x_j = x̃_j b_· / a_{·j}`.
    pub fn recover_x(&self, x_tilde: &[f64]) -> Vec<f64> {
        x_tilde
            .iter()
            .zip(self.col_scale.iter())
            .map(|(xj, s)| xj * self.b_total / s)
            .collect()
    }

    /// `D(b̃, Ã x̃)`, the objective NNA minimises.
    pub fn objective(&self, x_tilde: &[f64]) -> Result<Divergence> {
        let image = self.a_tilde.spmv(x_tilde)?;
        kl_divergence(&self.b_tilde, &image)
    }

    fn zero_row_with_mass(&self) -> Option<usize> {
        let mut has_entry = vec![false; self.a_tilde.nrows()];
        for &i in self.a_tilde.row_indices() {
            has_entry[i] = true;
        }
        (0..has_entry.len()).find(|&i| !has_entry[i] && self.b_tilde[i] > 0.0)
    }
}

fn check_nonnegative(a: &SparseMatrix) -> Result<()> {
    match a.entries().find(|e| e.2 < 0.0) {
        Some((row, col, _)) => Err(Error::NegativeEntry { row, col }),
        None => Ok(()),
    }
}

/// Rescales `A x = b` into column-stochastic form.
///
/// Zero entries of `b` are accepted; they carry no mass and contribute nothing
/// to the update. Negative entries, an all-zero `b`, and zero columns are rejected.
pub fn rescale(a: &SparseMatrix, b: &[f64]) -> Result<NonnegativeSystem> {
    check_len(b, a.nrows())?;
    check_finite(b)?;
    check_nonnegative(a)?;
    if let Some(j) = a.column_sums().iter().position(|&s| s == 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    if let Some(i) = b.iter().position(|&v| v < 0.0) {
        return Err(Error::NonPositiveRhs(i));
    }
    let b_total: f64 = b.iter().sum();
    if !(b_total > 0.0) {
        return Err(Error::NonPositiveRhs(0));
    }
    let col_scale = a.column_sums().to_vec();
    Ok(NonnegativeSystem {
        a_tilde: a.divide_columns(&col_scale),
        b_tilde: DenseVector::new(b.iter().map(|v| v / b_total).collect())?,
        col_scale: DenseVector::new(col_scale)?,
        b_total,
    })
}

/// `A x_t = b_t` with `x_t = x + t·1` and `b_t = b + t·A·1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSystem {
    pub t: f64,
    pub b_shifted: DenseVector,
    pub a_row_sums: DenseVector,
}

/// Chooses (or applies) the shift `t`.
///
/// `Shift::Auto` starts from `t = 2·max(0, max_i (ε_b − b_i)/(A·1)_i)` over rows
/// with `(A·1)_i > 0`, where `ε_b = 10⁻³·max(1, ‖b‖_∞)`. When that is positive it
/// is doubled until it also covers twice the solution scale estimate
/// `max_i |b_i| / (A·1)_i`, so `x* + t·1` keeps a margin above zero. A right-hand
/// side that is already comfortably positive gets `t = 0`.
pub fn shift(a: &SparseMatrix, b: &[f64], t: Shift) -> Result<ShiftedSystem> {
    check_len(b, a.nrows())?;
    check_finite(b)?;
    check_nonnegative(a)?;
    let row_sums = a.row_sums();
    for (i, (&r, &bi)) in row_sums.iter().zip(b).enumerate() {
        if r == 0.0 && bi <= 0.0 {
            return Err(Error::UnshiftableRow(i));
        }
    }
    let t = match t {
        Shift::Fixed(t) => {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidConfig("shift must be finite and nonnegative"));
            }
            t
        }
        Shift::Auto => auto_shift(&row_sums, b),
    };
    let b_shifted: Vec<f64> = b.iter().zip(&row_sums).map(|(bi, r)| bi + t * r).collect();
    if let Some(i) = b_shifted.iter().position(|&v| v < 0.0) {
        return Err(Error::NonPositiveRhs(i));
    }
    Ok(ShiftedSystem {
        t,
        b_shifted: DenseVector::new(b_shifted)?,
        a_row_sums: DenseVector::new(row_sums)?,
    })
}

fn auto_shift(row_sums: &[f64], b: &[f64]) -> f64 {
    let eps_b = 1e-3 * norm_inf(b).max(1.0);
    let rows = || row_sums.iter().zip(b).filter(|(r, _)| **r > 0.0);
    let need = rows().map(|(r, bi)| (eps_b - bi) / r).fold(0.0, f64::max);
    let mut t = 2.0 * need;
    if t > 0.0 {
        let x_hat = rows().map(|(r, bi)| abs(*bi) / r).fold(0.0, f64::max);
        while t < 2.0 * x_hat {
            t *= 2.0;
        }
        while rows().any(|(r, bi)| bi + t * r <= 0.0) {
            t *= 2.0;
        }
    }
    t
}

/// One EM update `x̃_{n+1} = (Ãᵀ (b̃ / Ã x̃_n)) ∘ x̃_n`.
pub fn nna_step(sys: &NonnegativeSystem, x: &[f64]) -> Result<DenseVector> {
    nna_step_counted(sys, x, &mut ())
}

/// [`nna_step`] with every floating-point operation reported to `flops`.
///
/// The count is `4𝒩_A + m₁ + m₂`: two sparse products plus one division per
/// row and one multiplication per column.
pub fn nna_step_counted<F: Flops>(sys: &NonnegativeSystem, x: &[f64], flops: &mut F) -> Result<DenseVector> {
    let a = &sys.a_tilde;
    check_len(x, a.ncols())?;
    let mut image = vec![0.0; a.nrows()];
    a.spmv_into(x, &mut image, flops);
    let mut ratio = vec![0.0; a.nrows()];
    let mut out = vec![0.0; a.ncols()];
    update_from_image(sys, x, &image, &mut ratio, &mut out, flops)?;
    Ok(DenseVector::from_vec_unchecked(out))
}

fn update_from_image<F: Flops>(
    sys: &NonnegativeSystem,
    x: &[f64],
    image: &[f64],
    ratio: &mut [f64],
    out: &mut [f64],
    flops: &mut F,
) -> Result<()> {
    for (i, (c, (&bi, &bn))) in ratio.iter_mut().zip(sys.b_tilde.iter().zip(image)).enumerate() {
        *c = if bi == 0.0 {
            0.0
        } else if bn > 0.0 {
            bi / bn
        } else {
            return Err(Error::ZeroDenominator(i));
        };
    }
    flops.add(ratio.len() as u64);
    sys.a_tilde.spmv_transpose_into(ratio, out, flops);
    for (o, xj) in out.iter_mut().zip(x) {
        *o *= xj;
    }
    flops.add(out.len() as u64);
    Ok(())
}

/// Residual evaluation used by the NNA driver.
pub(crate) enum ResidualMode<'a> {
    /// `b_· ‖Ã x̃ − b̃‖₂`, free given the image `Ã x̃`; equals `‖Ax − b‖₂`.
    Shifted,
    /// A caller-supplied residual of the unshifted iterate.
    Custom(&'a mut dyn FnMut(&[f64]) -> f64),
}

struct Attempt {
    report: SolveReport,
    /// Iterate in shifted coordinates, `x + t·1`.
    x_shifted: Vec<f64>,
}

fn setup_breakdown(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
    t: f64,
    e: &Error,
    mode: &mut ResidualMode<'_>,
) -> Result<Attempt> {
    let reason = Breakdown::from_error(e).ok_or_else(|| e.clone())?;
    let mut rec = Recorder::new(cfg);
    let res = match mode {
        ResidualMode::Shifted => dist2(&a.spmv(x0)?, b),
        ResidualMode::Custom(f) => f(x0),
    };
    rec.push(res, 1);
    Ok(Attempt {
        report: rec.finish(Status::Breakdown(reason), DenseVector::new(x0.to_vec())?, Some(t)),
        x_shifted: x0.iter().map(|v| v + t).collect(),
    })
}

/// Runs NNA for one fixed shift.
fn attempt(
    a: &SparseMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
    eps: f64,
    t: f64,
    mode: &mut ResidualMode<'_>,
) -> Result<Attempt> {
    let shifted = match shift(a, b, Shift::Fixed(t)) {
        Ok(s) => s,
        Err(e) => return setup_breakdown(a, b, x0, cfg, t, &e, mode),
    };
    let x0_shifted: Vec<f64> = x0.iter().map(|v| v + t).collect();
    if let Some(j) = x0_shifted.iter().position(|&v| !(v > 0.0)) {
        return setup_breakdown(a, b, x0, cfg, t, &Error::NonPositiveStart(j), mode);
    }
    let sys = match rescale(a, &shifted.b_shifted) {
        Ok(s) => s,
        Err(e) => return setup_breakdown(a, b, x0, cfg, t, &e, mode),
    };
    if let Some(i) = sys.zero_row_with_mass() {
        return setup_breakdown(a, b, x0, cfg, t, &Error::ZeroDenominator(i), mode);
    }

    let (m1, m2) = (a.nrows(), a.ncols());
    // The update is invariant to scaling x̃, so start on the simplex.
    let mut x = sys.to_rescaled(&x0_shifted);
    let mass: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= mass);
    let mut next = vec![0.0; m2];
    let mut image = vec![0.0; m1];
    let mut ratio = vec![0.0; m1];
    let mut rec = Recorder::new(cfg);
    let mut matvecs = 0u64;
    let unshift =
        |sys: &NonnegativeSystem, x: &[f64]| -> Vec<f64> { sys.recover_x(x).into_iter().map(|v| v - t).collect() };

    let status = loop {
        let n = rec.residuals.len();
        sys.a_tilde.spmv_into(&x, &mut image, &mut ());
        matvecs += 1;
        let residual = match mode {
            ResidualMode::Shifted => sys.b_total * dist2(&image, &sys.b_tilde),
            ResidualMode::Custom(f) => f(&unshift(&sys, &x)),
        };
        let kl = i_divergence(&sys.b_tilde, &image)?;
        rec.push_kl(residual, kl, matvecs);

        if !residual.is_finite() {
            break Status::Breakdown(Breakdown::NonFinite { iteration: n });
        }
        if residual <= eps {
            break Status::Converged;
        }
        if n >= cfg.max_iter {
            break Status::MaxIterations;
        }
        if n >= cfg.stagnation_window {
            if let (Divergence::Finite(now), Divergence::Finite(then)) = (kl, rec.kl[n - cfg.stagnation_window]) {
                if then - now <= cfg.stagnation_rel_delta * now {
                    break Status::StagnatedMinKL;
                }
            }
        }
        if let Err(e) = update_from_image(&sys, &x, &image, &mut ratio, &mut next, &mut ()) {
            match e {
                Error::ZeroDenominator(i) => break Status::Breakdown(Breakdown::ZeroDenominator(i)),
                other => return Err(other),
            }
        }
        matvecs += 1;
        core::mem::swap(&mut x, &mut next);
    };

    let x_shifted = sys.recover_x(&x);
    let x_out = DenseVector::new(x_shifted.iter().map(|v| v - t).collect())?;
    Ok(Attempt {
        report: rec.finish(status, x_out, Some(t)),
        x_shifted,
    })
}

const AUTO_SHIFT_RETRIES: usize = 8;

/// Whether a non-converged limit is drifting to the boundary of the positive
/// orthant, i.e. the shift was too small for `x* + t·1 > 0`.
fn near_boundary(x_shifted: &[f64]) -> bool {
    let hi = x_shifted.iter().copied().fold(0.0, f64::max);
    x_shifted.iter().any(|&v| v < 1e-3 * hi)
}

/// Shared NNA driver for [`nna_solve`] and the embedding.
pub(crate) fn solve_with(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
    eps: f64,
    mut mode: ResidualMode<'_>,
) -> Result<SolveReport> {
    cfg.validate()?;
    check_len(b, a.nrows())?;
    check_finite(b)?;
    check_nonnegative(a)?;
    let x0 = match x0 {
        Some(x) => {
            check_len(x, a.ncols())?;
            check_finite(x)?;
            x.to_vec()
        }
        None => vec![1.0; a.ncols()],
    };

    match cfg.t_shift {
        Shift::Fixed(t) => Ok(attempt(a, b, &x0, cfg, eps, t, &mut mode)?.report),
        Shift::Auto => {
            let mut t = match shift(a, b, Shift::Auto) {
                Ok(s) => s.t,
                Err(e) => return Ok(setup_breakdown(a, b, &x0, cfg, 0.0, &e, &mut mode)?.report),
            };
            // x0 + t·1 must be positive as well.
            let lowest = x0.iter().copied().fold(f64::INFINITY, f64::min);
            if lowest + t <= 0.0 {
                t = 2.0 * (-lowest).max(t);
            }
            let first = attempt(a, b, &x0, cfg, eps, t, &mut mode)?;
            let stalled = |run: &Attempt| {
                matches!(run.report.status, Status::MaxIterations | Status::StagnatedMinKL)
                    && near_boundary(&run.x_shifted)
            };
            if !stalled(&first) {
                return Ok(first.report);
            }
            // A stall on the boundary is either a solution with components
            // below -t or an inconsistent system whose minimal-KL point lies
            // on the boundary. Larger shifts only help the former, and change
            // the objective of the latter, so a retry is kept only if it
            // converges.
            let mut run_x = first.report.x.clone();
            for _ in 0..AUTO_SHIFT_RETRIES {
                t = if t > 0.0 {
                    2.0 * t
                } else {
                    2.0 * norm_inf(&run_x).max(1.0)
                };
                let run = attempt(a, b, &x0, cfg, eps, t, &mut mode)?;
                if run.report.status == Status::Converged {
                    return Ok(run.report);
                }
                if !stalled(&run) {
                    break;
                }
                run_x = run.report.x;
            }
            Ok(first.report)
        }
    }
}

/// Solves `A x = b` for `A ≥ 0` with the nonnegative algorithm.
///
/// `b` may have any sign; the shift makes it positive. The default `x0` is all
/// ones. Stops on `‖Ax_n − b‖₂ ≤ ε_tol`, on `max_iter`, or when the divergence
/// `D(b̃, b̃_n)` decreased by less than `stagnation_rel_delta` (relative) over
/// `stagnation_window` iterations, which identifies the minimal-KL limit of an
/// inconsistent system. With [`Shift::Auto`] a run that stalls next to the
/// boundary is retried with a doubled `t`, and the retry is returned only if
/// it converges. Setup failures are reported through
/// [`Status::Breakdown`]; only malformed input returns `Err`.
pub fn nna_solve(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<SolveReport> {
    let eps = cfg.tolerance_for(b);
    solve_with(a, b, x0, cfg, eps, ResidualMode::Shifted)
}

/// Geometric-rate constant `δ = min_j x̃*_j / (3 ‖Ã⁻¹‖₁²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCertificate {
    pub delta: f64,
    pub a_inv_norm1: f64,
    pub min_xstar: f64,
}

pub const DEFAULT_DENSE_LIMIT: usize = 200;

/// Computes `δ` from an explicit dense inverse of the rescaled matrix.
///
/// Meant for test harnesses on small systems; dimensions above
/// [`DEFAULT_DENSE_LIMIT`] are refused.
pub fn rate_certificate(a: &SparseMatrix, x_star: &[f64]) -> Result<RateCertificate> {
    rate_certificate_with_limit(a, x_star, DEFAULT_DENSE_LIMIT)
}

pub fn rate_certificate_with_limit(a: &SparseMatrix, x_star: &[f64], limit: usize) -> Result<RateCertificate> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    if a.nrows() > limit {
        return Err(Error::TooLargeForDense { dim: a.nrows(), limit });
    }
    check_len(x_star, a.ncols())?;
    check_nonnegative(a)?;
    let sums = a.column_sums();
    if let Some(j) = sums.iter().position(|&s| s == 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    if let Some(j) = x_star.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NegativeInput(j));
    }
    let total: f64 = x_star.iter().zip(sums).map(|(x, s)| x * s).sum();
    let min_xstar = x_star
        .iter()
        .zip(sums)
        .map(|(x, s)| x * s / total)
        .fold(f64::INFINITY, f64::min);
    let a_tilde = a.divide_columns(sums);
    let a_inv_norm1 = Dense::from_sparse(&a_tilde).inverse()?.norm1();
    Ok(RateCertificate {
        delta: min_xstar / (3.0 * a_inv_norm1 * a_inv_norm1),
        a_inv_norm1,
        min_xstar,
    })
}
