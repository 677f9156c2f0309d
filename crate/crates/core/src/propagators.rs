//! Pulse propagators for the anti-Stokes (state-swap) and Stokes
//! (two-mode squeezing) interactions after adiabatic elimination of the
//! driven cavity.
//!
//! A flattop pulse with effective coupling `G` on a cavity of linewidth `κ`
//! acts on the matter mode and the pulse's temporal mode at the rate
//! `𝒢 = 2G²/κ`. The swap has efficiency `η = 1 - exp(-2𝒢τ)` and is applied
//! as the exact beamsplitter `exp(-iθ(a†b + ab†))` with `sin²θ = η`; the
//! squeezer has `cosh r = exp(𝒢τ)` and is applied as
//! `exp(-ir(a†b† + ab))`. The normal-ordered three-factor form of the same
//! propagators (with `η exp(2𝒢τ)` in the exponents) is algebraically
//! equivalent but grows like `exp(2𝒢τ)` in intermediate terms, so it is not
//! used numerically.

use std::f64::consts::PI;

use crate::error::{positive, unit_interval, Result};
use crate::fock::{FockDensityMatrix, FockKet, Generator, DEFAULT_LEAK_TOL};

/// A flattop optical pulse driving one cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    coupling: f64,
    linewidth: f64,
    duration: f64,
}

impl PulseSpec {
    /// `coupling` and `linewidth` in rad/s, `duration` in s.
    pub fn new(coupling: f64, linewidth: f64, duration: f64) -> Result<Self> {
        Ok(Self {
            coupling: positive("effective coupling", coupling)?,
            linewidth: positive("cavity linewidth", linewidth)?,
            duration: positive("pulse duration", duration)?,
        })
    }

    /// Same as [`PulseSpec::new`] with frequencies given as `ω/2π` in Hz.
    pub fn from_hz(coupling_hz: f64, linewidth_hz: f64, duration: f64) -> Result<Self> {
        Self::new(2.0 * PI * coupling_hz, 2.0 * PI * linewidth_hz, duration)
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Adiabatic rate `𝒢 = 2G²/κ` in 1/s.
    pub fn rate(&self) -> f64 {
        2.0 * self.coupling * self.coupling / self.linewidth
    }

    /// Dimensionless `𝒢τ`.
    pub fn exponent(&self) -> f64 {
        self.rate() * self.duration
    }

    /// `G/κ`; adiabatic elimination needs this to be small.
    pub fn weak_coupling_ratio(&self) -> f64 {
        self.coupling / self.linewidth
    }
}

/// Phase picked up per transferred excitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// `|n⟩ → (-i)ⁿ|n⟩`, from `exp(-iθ(a†b + ab†))`.
    MinusIPerExcitation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapResult {
    pub efficiency: f64,
    pub exponent: f64,
    pub phase: PhaseConvention,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeResult {
    pub squeezing: f64,
    pub exponent: f64,
}

pub fn conversion_efficiency(pulse: &PulseSpec) -> SwapResult {
    let x = pulse.exponent();
    SwapResult {
        efficiency: -(-2.0 * x).exp_m1(),
        exponent: x,
        phase: PhaseConvention::MinusIPerExcitation,
    }
}

pub fn squeezing_parameter(pulse: &PulseSpec) -> SqueezeResult {
    let x = pulse.exponent();
    SqueezeResult {
        squeezing: squeezing_from_exponent(x),
        exponent: x,
    }
}

/// `r` with `tanh r = sqrt(1 - exp(-2x))`, i.e. `cosh r = exp(x)`.
pub fn squeezing_from_exponent(x: f64) -> f64 {
    (-(-2.0 * x).exp_m1()).sqrt().atanh()
}

/// Beamsplitter angle with `sin²θ = η`.
pub fn swap_angle(efficiency: f64) -> Result<f64> {
    unit_interval("conversion efficiency", efficiency)?;
    Ok(efficiency.sqrt().asin())
}

/// Partial swap between `source` and `field` with efficiency `η`.
///
/// With the field in vacuum the output field carries `c_{n,s} η^{(n+s)/2}`
/// on the branch where the source is emptied.
pub fn apply_antistokes_swap(
    rho: &FockDensityMatrix,
    source: usize,
    field: usize,
    efficiency: f64,
) -> Result<FockDensityMatrix> {
    let theta = swap_angle(efficiency)?;
    let (out, _) =
        rho.apply_two_mode_exponential(source, field, Generator::BeamSplitter, theta, DEFAULT_LEAK_TOL)?;
    Ok(out)
}

pub fn apply_antistokes_swap_ket(
    ket: &FockKet,
    source: usize,
    field: usize,
    efficiency: f64,
) -> Result<FockKet> {
    let theta = swap_angle(efficiency)?;
    let (out, _) =
        ket.apply_two_mode_exponential(source, field, Generator::BeamSplitter, theta, DEFAULT_LEAK_TOL)?;
    Ok(out)
}

/// Two-mode squeeze with parameter `r`; returns the state and the weight
/// lost past the truncation.
pub fn apply_stokes_squeeze(
    rho: &FockDensityMatrix,
    magnon: usize,
    field: usize,
    r: f64,
    leak_tol: f64,
) -> Result<(FockDensityMatrix, f64)> {
    crate::error::non_negative("squeezing", r)?;
    rho.apply_two_mode_exponential(magnon, field, Generator::TwoModeSqueeze, r, leak_tol)
}

pub fn apply_stokes_squeeze_ket(
    ket: &FockKet,
    magnon: usize,
    field: usize,
    r: f64,
    leak_tol: f64,
) -> Result<(FockKet, f64)> {
    crate::error::non_negative("squeezing", r)?;
    ket.apply_two_mode_exponential(magnon, field, Generator::TwoModeSqueeze, r, leak_tol)
}

/// How the emptied source mode is discarded after a swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SwapReadout {
    /// Keep only the branch where the source ends in vacuum (trace of the
    /// result = probability of that branch).
    Heralded,
    /// Trace the source out.
    Traced,
}

/// Swaps a single-mode `source` state onto a single-mode `target` state and
/// returns the target afterwards.
pub fn swap_into(
    source: &FockDensityMatrix,
    target: &FockDensityMatrix,
    efficiency: f64,
    readout: SwapReadout,
) -> Result<FockDensityMatrix> {
    let joint = source.tensor(target);
    let out = apply_antistokes_swap(&joint, 0, 1, efficiency)?;
    match readout {
        SwapReadout::Heralded => out.project(0, 0),
        SwapReadout::Traced => out.partial_trace(0),
    }
}
