//! One pulse of the linearized dynamics, with the pulse's output temporal
//! mode captured by a cascaded filter.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::covariance::CovarianceState;
use super::drift::{build_drift, QleParams, SystemKind, TemporalMode, CAVITY, MATTER};
use super::integrate::{default_step, integrate};
use crate::error::{non_negative, positive, Result};

/// Minimum number of steps per pulse.
const MIN_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct PulseRun {
    pub kind: SystemKind,
    /// Adiabatic rate `2G²/κ`, 1/s.
    pub rate: f64,
    pub duration: f64,
    pub steps_dt: f64,
    pub matter_occupation: f64,
    pub output_occupation: f64,
    /// Two-mode state of (matter, output temporal mode).
    pub state: CovarianceState,
}

impl PulseRun {
    pub fn exponent(&self) -> f64 {
        self.rate * self.duration
    }
}

/// Integrates one pulse from cavity vacuum and a thermal matter mode of
/// occupation `n0`. `dt = None` picks the default resolution.
pub fn simulate_pulse(
    kind: SystemKind,
    params: &QleParams,
    duration: f64,
    n0: f64,
    dt: Option<f64>,
) -> Result<PulseRun> {
    let duration = positive("pulse duration", duration)?;
    let n0 = non_negative("initial occupation", n0)?;
    let base = build_drift(kind, params)?;
    let rate = 2.0 * params.coupling.powi(2) / params.cavity_linewidth;
    let mode = TemporalMode::output(kind, rate, duration);
    let dd = base.with_output_filter(CAVITY, mode.filter_sigma())?;
    let filter = dd.modes() - 1;

    let mut cm = DMatrix::identity(2 * dd.modes(), 2 * dd.modes());
    for q in [2 * MATTER, 2 * MATTER + 1] {
        cm[(q, q)] = 2.0 * n0 + 1.0;
    }
    for q in [2 * filter, 2 * filter + 1] {
        cm[(q, q)] = 0.0;
    }
    let start = CovarianceState::unchecked(DVector::zeros(2 * dd.modes()), cm)?;
    let dt = dt.unwrap_or_else(|| default_step(&dd, duration, MIN_STEPS));
    let end = integrate(&start, &dd, 0.0, duration, dt)?;

    let state = end
        .scale_mode(filter, mode.filter_scale())?
        .reduced(&[MATTER, filter])?;
    Ok(PulseRun {
        kind,
        rate,
        duration,
        steps_dt: dt,
        matter_occupation: state.occupation(0)?,
        output_occupation: state.occupation(1)?,
        state: CovarianceState::new(state.mean().clone(), state.cm().clone())?,
    })
}

/// One row of the adiabatic-elimination check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRow {
    pub g_over_kappa: f64,
    pub eta_integrated: f64,
    pub eta_closed: f64,
    pub rel_err: f64,
    /// Residual matter occupation over its initial value.
    pub residual_integrated: f64,
    pub residual_closed: f64,
}

/// Swap efficiency from the full two-mode dynamics (cavity not eliminated)
/// against `1 - e^{-2𝒢τ}`, holding `𝒢τ` fixed while `G/κ` varies.
pub fn validate_adiabatic(
    exponent: f64,
    cavity_linewidth: f64,
    ratios: &[f64],
) -> Result<Vec<AdiabaticRow>> {
    let exponent = positive("pulse exponent", exponent)?;
    let kappa = positive("cavity linewidth", cavity_linewidth)?;
    ratios
        .par_iter()
        .map(|&ratio| {
            let g = positive("G/kappa", ratio)? * kappa;
            let duration = exponent * kappa / (2.0 * g * g);
            let run = simulate_pulse(
                SystemKind::MagnonicAntiStokes,
                &QleParams::new(g, kappa),
                duration,
                1.0,
                None,
            )?;
            let residual_closed = (-2.0 * exponent).exp();
            let eta_closed = -(-2.0 * exponent).exp_m1();
            let eta_integrated = 1.0 - run.matter_occupation;
            Ok(AdiabaticRow {
                g_over_kappa: ratio,
                eta_integrated,
                eta_closed,
                rel_err: (eta_integrated - eta_closed).abs() / eta_closed,
                residual_integrated: run.matter_occupation,
                residual_closed,
            })
        })
        .collect()
}
