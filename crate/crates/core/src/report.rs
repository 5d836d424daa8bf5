use alloc::vec::Vec;

use crate::error::Error;
use crate::math::norm2;
use crate::metrics::Divergence;
use crate::vector::DenseVector;

/// Shift `t` applied to the unknowns before running NNA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    /// Data-driven choice, see [`crate::nna::shift`].
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Absolute tolerance on `‖Ax − b‖₂`. `None` means `1e-8 · (1 + ‖b‖₂)`.
    pub eps_tol: Option<f64>,
    pub t_shift: Shift,
    pub max_iter: usize,
    pub stagnation_window: usize,
    pub stagnation_rel_delta: f64,
    /// Skip the symmetry check of CG and MINRES.
    pub assume_symmetric: bool,
    /// Monotonic nanosecond clock for the elapsed-time trace. `None` records zeros.
    pub clock: Option<fn() -> u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_tol: None,
            t_shift: Shift::Auto,
            max_iter: 10_000,
            stagnation_window: 50,
            stagnation_rel_delta: 1e-12,
            assume_symmetric: false,
            clock: None,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, eps_tol: f64) -> Self {
        self.eps_tol = Some(eps_tol);
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_shift(mut self, t_shift: Shift) -> Self {
        self.t_shift = t_shift;
        self
    }

    /// The tolerance for a right-hand side `b`.
    pub fn tolerance_for(&self, b: &[f64]) -> f64 {
        self.eps_tol.unwrap_or_else(|| 1e-8 * (1.0 + norm2(b)))
    }

    pub(crate) fn validate(&self) -> Result<(), Error> {
        if let Some(t) = self.eps_tol {
            if !(t > 0.0) {
                return Err(Error::InvalidConfig("eps_tol must be positive"));
            }
        }
        if let Shift::Fixed(t) = self.t_shift {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidConfig("shift must be finite and nonnegative"));
            }
        }
        if self.stagnation_window == 0 {
            return Err(Error::InvalidConfig("stagnation_window must be positive"));
        }
        if !(self.stagnation_rel_delta >= 0.0) {
            return Err(Error::InvalidConfig("stagnation_rel_delta must be nonnegative"));
        }
        Ok(())
    }
}

/// Why a solve stopped without converging or stagnating.
#[derive(Debug, Clone, PartialEq)]
pub enum Breakdown {
    ZeroColumn(usize),
    UnshiftableRow(usize),
    ZeroDenominator(usize),
    NonPositiveStart(usize),
    NonPositiveRhs(usize),
    /// The iteration produced a non-finite residual; `x` is the last finite iterate.
    NonFinite {
        iteration: usize,
    },
}

impl Breakdown {
    pub(crate) fn from_error(e: &Error) -> Option<Self> {
        Some(match *e {
            Error::ZeroColumn(j) => Breakdown::ZeroColumn(j),
            Error::UnshiftableRow(i) => Breakdown::UnshiftableRow(i),
            Error::ZeroDenominator(i) => Breakdown::ZeroDenominator(i),
            Error::NonPositiveStart(i) => Breakdown::NonPositiveStart(i),
            Error::NonPositiveRhs(i) => Breakdown::NonPositiveRhs(i),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Converged,
    MaxIterations,
    /// The KL objective stopped decreasing while the residual stayed above
    /// tolerance: the limit is a minimal-divergence point of an inconsistent system.
    StagnatedMinKL,
    Breakdown(Breakdown),
}

impl Status {
    pub fn is_success(&self) -> bool {
        matches!(self, Status::Converged | Status::StagnatedMinKL)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIterations => "MaxIterations",
            Status::StagnatedMinKL => "StagnatedMinKL",
            Status::Breakdown(_) => "Breakdown",
        }
    }
}

/// Outcome of one solve.
///
/// All traces are indexed by iteration and include iterate 0, so they hold
/// `iterations + 1` entries. `kl_trace` is empty for solvers that do not
/// track a divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: Status,
    pub iterations: usize,
    pub x: DenseVector,
    /// `‖A x_n − b‖₂` on the original system.
    pub residual_trace: Vec<f64>,
    /// `D(b̃, Ã x̃_n)` on the rescaled system (NNA paths only), evaluated as
    /// [`crate::metrics::i_divergence`] so values near zero stay accurate.
    pub kl_trace: Vec<Divergence>,
    /// Nanoseconds since the solve started, per iterate.
    pub elapsed_trace: Vec<u64>,
    /// Cumulative matrix–vector products, per iterate.
    pub matvec_trace: Vec<u64>,
    pub elapsed_ns: u64,
    /// The shift `t` actually used (NNA paths only).
    pub shift: Option<f64>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_trace.last().copied().unwrap_or(f64::NAN)
    }

    pub fn total_matvecs(&self) -> u64 {
        self.matvec_trace.last().copied().unwrap_or(0)
    }

    /// Cumulative matrix–vector products when the residual first dropped to `tol`.
    pub fn matvecs_to_reach(&self, tol: f64) -> Option<u64> {
        self.residual_trace
            .iter()
            .position(|&r| r <= tol)
            .map(|n| self.matvec_trace[n])
    }
}

/// Accumulates the per-iterate traces shared by all solvers.
pub(crate) struct Recorder {
    clock: Option<fn() -> u64>,
    start: u64,
    pub(crate) residuals: Vec<f64>,
    pub(crate) kl: Vec<Divergence>,
    elapsed: Vec<u64>,
    matvecs: Vec<u64>,
}

impl Recorder {
    pub(crate) fn new(cfg: &SolverConfig) -> Self {
        let start = cfg.clock.map_or(0, |c| c());
        Self {
            clock: cfg.clock,
            start,
            residuals: Vec::new(),
            kl: Vec::new(),
            elapsed: Vec::new(),
            matvecs: Vec::new(),
        }
    }

    fn now(&self) -> u64 {
        self.clock.map_or(0, |c| c().saturating_sub(self.start))
    }

    pub(crate) fn push(&mut self, residual: f64, matvecs: u64) {
        self.residuals.push(residual);
        self.elapsed.push(self.now());
        self.matvecs.push(matvecs);
    }

    pub(crate) fn push_kl(&mut self, residual: f64, kl: Divergence, matvecs: u64) {
        self.push(residual, matvecs);
        self.kl.push(kl);
    }

    /// Overwrites the latest residual, e.g. with a recomputed true residual.
    pub(crate) fn replace_last(&mut self, residual: f64, matvecs: u64) {
        if let Some(r) = self.residuals.last_mut() {
            *r = residual;
        }
        if let Some(m) = self.matvecs.last_mut() {
            *m = matvecs;
        }
    }

    pub(crate) fn iterations(&self) -> usize {
        self.residuals.len().saturating_sub(1)
    }

    pub(crate) fn finish(self, status: Status, x: DenseVector, shift: Option<f64>) -> SolveReport {
        let elapsed_ns = self.now();
        SolveReport {
            status,
            iterations: self.iterations(),
            x,
            residual_trace: self.residuals,
            kl_trace: self.kl,
            elapsed_trace: self.elapsed,
            matvec_trace: self.matvecs,
            elapsed_ns,
            shift,
        }
    }
}
