use rayon::prelude::*;

use super::scenario::{ScenarioConfig, SQUEEZE_TRUNCATION};
use super::validate::validate;
use crate::error::{non_negative, unit_interval, Error, Result};
use crate::fock::{FockKet, Generator, ModeDims};
use crate::metrics::{
    closed_form_log_negativity, effective_squeezing, log_negativity_fock, log_negativity_pure,
};
use crate::propagators::{conversion_efficiency, squeezing_parameter, swap_angle};

/// Settings of one entanglement run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangleSettings {
    pub r: f64,
    pub w: f64,
    /// Fiber transmittance applied between the two nodes; 1 skips it.
    pub t: f64,
    pub truncation: usize,
    pub leak_tol: f64,
    /// Also compute the unconditional (pulse traced out) state.
    pub unconditional: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntangleReport {
    pub r: f64,
    pub r_eff: f64,
    pub w: f64,
    pub t: f64,
    pub truncation: usize,
    /// Weight lost past the truncation by the squeezer.
    pub leak: f64,
    /// Probability that the pulse ends in vacuum.
    pub herald_probability: f64,
    /// Magnon-phonon log negativity on the heralded branch.
    pub en_fock: f64,
    pub en_closed: f64,
    /// With the pulse traced out instead.
    pub en_unconditional: Option<f64>,
    pub warnings: Vec<String>,
}

// Mode order of the joint ket.
const MAGNON: usize = 0;
const PULSE: usize = 1;
const PHONON: usize = 2;
const FIBER_ENV: usize = 3;

/// Squeeze magnon and pulse, optionally attenuate the pulse, swap it into
/// the phonon, and quantify magnon-phonon entanglement.
pub fn entangle(settings: &EntangleSettings) -> Result<EntangleReport> {
    let r = non_negative("squeezing", settings.r)?;
    let w = unit_interval("conversion efficiency", settings.w)?;
    let t = unit_interval("transmittance", settings.t)?;
    let d = settings.truncation;
    let lossy = t < 1.0;
    let modes = if lossy { 4 } else { 3 };
    let dims = ModeDims::uniform(modes, d)?;

    let (ket, leak) = FockKet::vacuum(dims).apply_two_mode_exponential(
        MAGNON,
        PULSE,
        Generator::TwoModeSqueeze,
        r,
        settings.leak_tol,
    )?;
    let ket = if lossy {
        ket.apply_two_mode_exponential(
            PULSE,
            FIBER_ENV,
            Generator::BeamSplitter,
            swap_angle(1.0 - t)?,
            settings.leak_tol,
        )?
        .0
    } else {
        ket
    };
    let (ket, _) = ket.apply_two_mode_exponential(
        PULSE,
        PHONON,
        Generator::BeamSplitter,
        swap_angle(w)?,
        settings.leak_tol,
    )?;

    // Heralded branch: pulse in vacuum. Modes are now [magnon, phonon(, env)].
    let branch = ket.project(PULSE, 0)?;
    let herald_probability = branch.norm_sqr();
    if herald_probability <= 0.0 {
        return Err(Error::Trace(herald_probability));
    }
    let en_fock = if lossy {
        let rho = branch.partial_trace(&[2])?;
        log_negativity_fock(&rho, &[1])?.log_negativity
    } else {
        log_negativity_pure(&branch, &[1])?.log_negativity
    };

    let en_unconditional = if settings.unconditional {
        let mut traced = vec![PULSE];
        if lossy {
            traced.push(FIBER_ENV);
        }
        let rho = ket.partial_trace(&traced)?;
        Some(log_negativity_fock(&rho, &[1])?.log_negativity)
    } else {
        None
    };

    let r_eff = effective_squeezing(r, w)?;
    Ok(EntangleReport {
        r,
        r_eff,
        w,
        t,
        truncation: d,
        leak,
        herald_probability,
        en_fock,
        en_closed: closed_form_log_negativity(r, w)?.log_negativity,
        en_unconditional,
        warnings: Vec::new(),
    })
}

/// Entanglement pipeline for a scenario. Fiber loss is applied only when
/// the scenario asks for it.
pub fn run_entanglement(scenario: &ScenarioConfig) -> Result<EntangleReport> {
    let checks = validate(scenario)?;
    let r = squeezing_parameter(&scenario.stokes_pulse()?).squeezing;
    let w = conversion_efficiency(&scenario.mechanical_pulse()?).efficiency;
    let t = if scenario.include_loss_in_entanglement {
        scenario.fiber.transmittance()
    } else {
        1.0
    };
    let mut report = entangle(&EntangleSettings {
        r,
        w,
        t,
        truncation: scenario.truncation.unwrap_or(SQUEEZE_TRUNCATION),
        leak_tol: scenario.leak_tol,
        unconditional: true,
    })?;
    report.warnings = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} = {:.6e} fails {} {:.3e}", c.name, c.measured, c.relation, c.limit))
        .collect();
    if scenario.include_loss_in_entanglement {
        report
            .warnings
            .push("fiber loss applied to the entanglement pulse (extension)".into());
    }
    Ok(report)
}

/// How rows of the log-negativity grid pick their truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationPolicy {
    Fixed(usize),
    /// At least `min`, grown until `tanh(r)^{2d}` is within the leak budget.
    Adaptive { min: usize },
}

impl TruncationPolicy {
    pub fn truncation(&self, r: f64, leak_tol: f64) -> usize {
        match *self {
            TruncationPolicy::Fixed(d) => d,
            TruncationPolicy::Adaptive { min } => {
                let x = r.tanh();
                if x <= 0.0 {
                    return min;
                }
                // Half the budget leaves room for round-off.
                let need = (0.5 * leak_tol).ln() / (2.0 * x.ln());
                min.max(need.ceil() as usize + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig5Row {
    pub r: f64,
    pub w: f64,
    pub en_closed: f64,
    pub en_fock: f64,
    pub truncation: usize,
    pub leak: f64,
}

/// `r` grid `0, 0.05, …, 1.5`.
pub fn fig5_r_grid() -> Vec<f64> {
    (0..=30).map(|i| i as f64 * 0.05).collect()
}

pub const FIG5_EFFICIENCIES: [f64; 4] = [1.0, 0.8, 0.5, 0.2];

/// Heralded lossless E_N over the grid, rows ordered by W descending then
/// r ascending.
pub fn fig5_curves(
    r_grid: &[f64],
    efficiencies: &[f64],
    policy: TruncationPolicy,
    leak_tol: f64,
) -> Result<Vec<Fig5Row>> {
    for &r in r_grid {
        if !(0.0..=1.5).contains(&r) {
            return Err(Error::Parameter {
                name: "squeezing",
                value: r,
                reason: "grid lies in [0, 1.5]",
            });
        }
    }
    let mut ws: Vec<f64> = efficiencies.to_vec();
    for &w in &ws {
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::Parameter {
                name: "conversion efficiency",
                value: w,
                reason: "efficiencies lie in (0, 1]",
            });
        }
    }
    ws.sort_by(|a, b| b.total_cmp(a));
    let mut rs = r_grid.to_vec();
    rs.sort_by(f64::total_cmp);

    let jobs: Vec<(f64, f64)> = ws.iter().flat_map(|&w| rs.iter().map(move |&r| (w, r))).collect();
    jobs.par_iter()
        .map(|&(w, r)| {
            let rep = entangle(&EntangleSettings {
                r,
                w,
                t: 1.0,
                truncation: policy.truncation(r, leak_tol),
                leak_tol,
                unconditional: false,
            })?;
            Ok(Fig5Row {
                r,
                w,
                en_closed: rep.en_closed,
                en_fock: rep.en_fock,
                truncation: rep.truncation,
                leak: rep.leak,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DEFAULT_LEAK_TOL;

    fn settings(r: f64, w: f64) -> EntangleSettings {
        EntangleSettings {
            r,
            w,
            t: 1.0,
            truncation: 30,
            leak_tol: DEFAULT_LEAK_TOL,
            unconditional: true,
        }
    }

    #[test]
    fn perfect_swap_keeps_full_entanglement() {
        let rep = entangle(&settings(0.39, 1.0)).unwrap();
        assert!((rep.en_fock - 0.78).abs() < 1e-3);
        assert!((rep.en_fock - 2.0 * 0.39).abs() < 1e-10);
        assert!((rep.en_unconditional.unwrap() - rep.en_fock).abs() < 1e-8);
        assert!((rep.herald_probability - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_swap_matches_effective_squeezing() {
        let rep = entangle(&settings(0.39, 0.93)).unwrap();
        assert!((rep.en_fock - rep.en_closed).abs() < 1e-3);
        assert!((rep.en_closed - 0.75).abs() < 0.005);
        // The unconditional state also carries the leftover pulse excitations.
        assert!(rep.en_unconditional.unwrap() < rep.en_fock);
    }

    #[test]
    fn no_squeezing_no_entanglement() {
        let rep = entangle(&settings(0.0, 0.93)).unwrap();
        assert_eq!(rep.en_fock, 0.0);
        assert_eq!(rep.en_unconditional.unwrap(), 0.0);
    }

    #[test]
    fn small_truncation_exceeds_leak_budget() {
        let mut s = settings(1.2, 1.0);
        s.truncation = 8;
        assert!(matches!(entangle(&s), Err(Error::LeakBudget { .. })));
    }

    #[test]
    fn loss_lowers_entanglement() {
        let mut s = settings(0.39, 0.93);
        s.truncation = 12;
        s.leak_tol = 1e-6;
        let clean = entangle(&s).unwrap();
        s.t = 0.631;
        let lossy = entangle(&s).unwrap();
        assert!(lossy.en_fock < clean.en_fock);
        assert!(lossy.en_fock > 0.0);
    }

    #[test]
    fn scenario_defaults() {
        let rep = run_entanglement(&ScenarioConfig::reference()).unwrap();
        assert!((rep.r - 0.39).abs() < 0.005);
        assert!(rep.warnings.is_empty());
        assert!((rep.en_fock - rep.en_closed).abs() < 1e-3);
    }

    #[test]
    fn adaptive_truncation_meets_budget() {
        let p = TruncationPolicy::Adaptive { min: 30 };
        assert_eq!(p.truncation(0.39, 1e-8), 30);
        let d = p.truncation(1.5, 1e-8);
        assert!(1.5f64.tanh().powi(2 * d as i32) < 1e-8);
    }

    #[test]
    fn fig5_small_grid_is_ordered() {
        let rows = fig5_curves(&[0.0, 0.5, 1.0], &[0.2, 1.0], TruncationPolicy::Adaptive { min: 30 }, 1e-8)
            .unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].w, 1.0);
        assert_eq!(rows[3].w, 0.2);
        for row in &rows {
            // Truncation error of E_N scales as tanh(r)^d.
            assert!((row.en_fock - row.en_closed).abs() < 1e-3, "{row:?}");
        }
        assert!(fig5_curves(&[2.0], &[1.0], TruncationPolicy::Fixed(30), 1e-8).is_err());
        assert!(fig5_curves(&[0.1], &[0.0], TruncationPolicy::Fixed(30), 1e-8).is_err());
    }
}
