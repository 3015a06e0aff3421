//! `A = d/dx` on `]0, 1[` with `u(1) = 0`.
//!
//! The spectrum is empty and `S(t)` is the left shift, so `‖S(t)‖ = 1` for
//! `t < 1` and `S(t) = 0` afterwards. The resolvent norm depends only on
//! `Re z = ω` and equals `1/r(ω)` with `r(ω)² = ω² + ν(ω)²`, where
//! `-ν cot ν = ω` (`ν` real in `]0, π[` for `ω > -1`, `ν = iη` for `ω < -1`).

use serde::{Deserialize, Serialize};

use super::bisect_increasing;
use crate::bound::PiecewiseLogAffineBound;
use crate::error::{Error, Result};
use crate::riccati::{a_star, OmegaRPair};

/// Which branch of `ν(ω)` applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum NuRoot {
    /// `ν ∈ ]0, π[`, for `ω > -1`.
    Real(f64),
    /// `ν = 0` at `ω = -1`.
    Zero,
    /// `ν = iη` with `η > 0`, for `ω < -1`.
    Imaginary(f64),
}

/// `ν(ω)`, stored as the signed square `ν²` plus the root itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuValue {
    pub omega: f64,
    pub nu_sq: f64,
    pub root: NuRoot,
}

impl NuValue {
    /// `-ν cot ν - ω`, evaluated in the real form matching the branch.
    pub fn residual(&self) -> f64 {
        match self.root {
            NuRoot::Real(nu) => -nu / nu.tan() - self.omega,
            NuRoot::Zero => -1.0 - self.omega,
            NuRoot::Imaginary(eta) => -eta / eta.tanh() - self.omega,
        }
    }
}

fn check_finite(omega: f64) -> Result<()> {
    if omega.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("omega must be finite, got {omega}")))
    }
}

/// Solves `-ν cot ν = ω` by bisection.
pub fn diffop_nu(omega: f64) -> Result<NuValue> {
    check_finite(omega)?;
    let root = if omega == -1.0 {
        NuRoot::Zero
    } else if omega > -1.0 {
        // -ν cot ν increases from -1 to +∞ on ]0, π[
        let nu = bisect_increasing(|nu| -nu / nu.tan(), omega, 0.0, std::f64::consts::PI);
        NuRoot::Real(nu)
    } else {
        // η coth η increases from 1 to +∞ on ]0, ∞[, and
        // x coth x < x + 1 for x > 0 keeps -ω - 1 below the root.
        let lo = (-omega - 1.0).max(0.0);
        let hi = 1.0 - omega;
        let eta = bisect_increasing(|eta| eta / eta.tanh(), -omega, lo, hi);
        NuRoot::Imaginary(eta)
    };
    let nu_sq = match root {
        NuRoot::Real(nu) => nu * nu,
        NuRoot::Zero => 0.0,
        NuRoot::Imaginary(eta) => -eta * eta,
    };
    Ok(NuValue { omega, nu_sq, root })
}

/// `r(ω) = √(ω² + ν²)`, evaluated as `ν / sin ν` (or `η / sinh η`), which is
/// the same quantity without the cancellation of `ω² + ν²` for `ω ≪ -1`.
pub fn diffop_r(omega: f64) -> Result<f64> {
    Ok(match diffop_nu(omega)?.root {
        NuRoot::Real(nu) => nu / nu.sin(),
        NuRoot::Zero => 1.0,
        NuRoot::Imaginary(eta) => eta / eta.sinh(),
    })
}

/// `ω - r(ω)`, which equals `-ν cot(ν/2)`; `-2` at `ω = -1`.
pub fn diffop_omega_minus_r(omega: f64) -> Result<f64> {
    Ok(match diffop_nu(omega)?.root {
        NuRoot::Real(nu) => -nu / (0.5 * nu).tan(),
        NuRoot::Zero => -2.0,
        NuRoot::Imaginary(eta) => -eta / (0.5 * eta).tanh(),
    })
}

/// `‖(z - A)^{-1}‖` for any `z` with `Re z = z_re`.
pub fn diffop_resolvent_norm(z_re: f64) -> Result<f64> {
    Ok(1.0 / diffop_r(z_re)?)
}

/// `‖S(t)‖`: 1 on `[0, 1[`, 0 from `t = 1` on.
pub fn diffop_true_norm(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    Ok(if t < 1.0 { 1.0 } else { 0.0 })
}

/// `r*(α, ω) = r(2αω) / (2α)`: the `r` for which `a*(1, ω, r) = α`.
pub fn rstar(alpha: f64, omega: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(diffop_r(2.0 * alpha * omega)? / (2.0 * alpha))
}

/// `a*(1, ω, r(ω))`, which is `1/2` for every `ω`.
pub fn diffop_astar(omega: f64) -> Result<f64> {
    let pair = OmegaRPair::new(omega, diffop_r(omega)?)?;
    Ok(a_star(&PiecewiseLogAffineBound::one(), pair))
}

/// `a*(e^{δt}, ω, r)` for the generator `γA + δ`, whose profile is
/// `γ r((ω - δ)/γ)`. Equals `1/(2γ)`.
pub fn diffop_scaled_astar(gamma: f64, delta: f64, omega: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    check_finite(delta)?;
    let r = gamma * diffop_r((omega - delta) / gamma)?;
    let pair = OmegaRPair::new(omega, r)?;
    Ok(a_star(&PiecewiseLogAffineBound::exponential(delta), pair))
}
