//! Probability divergences used to monitor and certify NNA convergence.

use core::fmt;

use crate::error::{Error, Result};
use crate::math::{abs, ln, log1p};
use crate::vector::check_len;

/// Value of a divergence; `+∞` is a tag rather than a float so traces never
/// carry an IEEE infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    /// The value as an `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// 17 significant digits for finite values, `inf` otherwise.
impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => write!(f, "{:.16e}", v),
            Divergence::Infinite => f.write_str("inf"),
        }
    }
}

/// `D(u, v) = Σ u_i log(u_i / v_i)` with `0 log(0/·) = 0` and `D = ∞` when some
/// `u_i > 0` meets `v_i = 0`.
pub fn kl_divergence(u: &[f64], v: &[f64]) -> Result<Divergence> {
    check_len(v, u.len())?;
    if let Some(i) = u.iter().position(|&x| !(x >= 0.0)) {
        return Err(Error::NegativeInput(i));
    }
    if let Some(i) = v.iter().position(|&x| !(x >= 0.0)) {
        return Err(Error::NegativeInput(i));
    }
    let mut sum = 0.0;
    for (&ui, &vi) in u.iter().zip(v) {
        if ui == 0.0 {
            continue;
        }
        if vi == 0.0 {
            return Ok(Divergence::Infinite);
        }
        sum += ui * ln(ui / vi);
    }
    Ok(Divergence::Finite(sum))
}

/// Generalized divergence `Σ u_i log(u_i / v_i) − u_i + v_i`, summed as
/// `u_i (ρ_i − log(1 + ρ_i))` with `ρ_i = (v_i − u_i)/u_i` so every term is
/// nonnegative and small values keep their relative accuracy. Equal to
/// [`kl_divergence`] when `u` and `v` have the same mass.
pub fn i_divergence(u: &[f64], v: &[f64]) -> Result<Divergence> {
    check_len(v, u.len())?;
    if let Some(i) = u.iter().position(|&x| !(x >= 0.0)) {
        return Err(Error::NegativeInput(i));
    }
    if let Some(i) = v.iter().position(|&x| !(x >= 0.0)) {
        return Err(Error::NegativeInput(i));
    }
    let mut sum = 0.0;
    for (&ui, &vi) in u.iter().zip(v) {
        if ui == 0.0 {
            sum += vi;
            continue;
        }
        if vi == 0.0 {
            return Ok(Divergence::Infinite);
        }
        let rho = (vi - ui) / ui;
        sum += ui * (rho - log1p(rho));
    }
    Ok(Divergence::Finite(sum))
}

/// `V(u, v) = Σ |u_i − v_i|`, the un-halved ℓ₁ distance.
pub fn total_variation(u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(v, u.len())?;
    Ok(u.iter().zip(v).map(|(a, b)| abs(a - b)).sum())
}

const SIMPLEX_TOL: f64 = 1e-9;

fn check_simplex(u: &[f64]) -> Result<()> {
    let s: f64 = u.iter().sum();
    if abs(s - 1.0) > SIMPLEX_TOL {
        return Err(Error::NotOnSimplex(s));
    }
    Ok(())
}

/// Whether Pinsker's inequality `D(u, v) ≥ V²(u, v)/2` holds at the computed
/// values. A rounding allowance of a few ulps absorbs the case `u ≈ v`.
pub fn pinsker_check(u: &[f64], v: &[f64]) -> Result<bool> {
    check_len(v, u.len())?;
    check_simplex(u)?;
    check_simplex(v)?;
    let tv = total_variation(u, v)?;
    Ok(match kl_divergence(u, v)? {
        Divergence::Infinite => true,
        Divergence::Finite(d) => d + 64.0 * f64::EPSILON >= 0.5 * tv * tv,
    })
}

/// Euclidean certificate `‖x_n − x*‖₂² ≤ 2‖x*‖₁² D(x̃*, x̃_n)`.
pub fn l2_bridge(x_star: &[f64], kl: Divergence) -> Result<f64> {
    let d = kl.finite().ok_or(Error::InfiniteDivergence)?;
    let l1: f64 = x_star.iter().map(|v| abs(*v)).sum();
    Ok(2.0 * l1 * l1 * d)
}
