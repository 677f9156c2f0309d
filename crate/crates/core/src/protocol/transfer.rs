use nalgebra::DMatrix;
use num_complex::Complex64;

use super::scenario::{ScenarioConfig, StateDescriptor, TRANSFER_TRUNCATION};
use super::validate::validate;
use crate::channels::{apply_loss, post_loss_pulse_state, LossMethod};
use crate::error::{unit_interval, Error, Result};
use crate::fock::{phase_rotation, FockDensityMatrix, ModeDims};
use crate::metrics::fidelity_pure_target;
use crate::propagators::{conversion_efficiency, swap_into, SwapReadout};

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub state: String,
    pub s: f64,
    pub w: f64,
    pub t: f64,
    pub readout_exponent: f64,
    pub mechanical_exponent: f64,
    pub truncation: usize,
    /// Phonon state on the branch where magnon and pulse end empty, with
    /// the swap phases removed. Its trace is the branch probability.
    pub phonon_state: FockDensityMatrix,
    pub fidelity: f64,
    pub fidelity_uncompensated: f64,
    /// Against the phonon state with magnon and pulse traced out.
    pub fidelity_unconditional: f64,
    /// `None` when the phonon does not start in its ground state.
    pub fidelity_closed: Option<f64>,
    pub warnings: Vec<String>,
}

/// Removes the `(-i)ⁿ` left by each of `swaps` swaps.
fn compensate(rho: &FockDensityMatrix, swaps: u32) -> Result<FockDensityMatrix> {
    let d = rho.dims().dim(0);
    let phi = std::f64::consts::FRAC_PI_2 * swaps as f64;
    rho.apply_local(0, &phase_rotation(d, phi))
}

/// `Tr(ρ₀ρ)`, equal to `⟨φ|ρ|φ⟩` for a pure target.
fn overlap(target: &StateDescriptor, rho: &FockDensityMatrix) -> Result<f64> {
    let d = rho.dims().dim(0);
    if let Some(ket) = target.ket(d)? {
        return Ok(fidelity_pure_target(&ket, rho)?.value);
    }
    let c = target.coefficients()?;
    let mut total = Complex64::new(0.0, 0.0);
    for n in 0..c.nrows() {
        for s in 0..c.ncols() {
            total += c[(n, s)] * rho.matrix()[(s, n)];
        }
    }
    Ok(total.re)
}

fn initial_magnon(state: &StateDescriptor, dim: usize) -> Result<FockDensityMatrix> {
    let c = state.coefficients()?;
    let k = c.nrows();
    if k > dim {
        return Err(Error::Occupation {
            mode: 0,
            occupation: k - 1,
            dim,
        });
    }
    let mut m = DMatrix::zeros(dim, dim);
    m.view_mut((0, 0), (k, k)).copy_from(&c);
    FockDensityMatrix::from_matrix(ModeDims::new(vec![dim])?, m)
}

/// Phonon state from the closed-form double sum followed by the
/// optomechanical swap `c → c (-i)ⁿ iˢ W^{(n+s)/2}`, phases removed.
pub fn closed_form_phonon_state(
    state: &StateDescriptor,
    s: f64,
    w: f64,
    t: f64,
    dim: usize,
) -> Result<FockDensityMatrix> {
    let w = unit_interval("conversion efficiency", w)?;
    let pulse = post_loss_pulse_state(&state.coefficients()?, s, t, dim)?;
    let phase = |n: usize| Complex64::new(0.0, -1.0).powu(n as u32);
    let m = DMatrix::from_fn(dim, dim, |n, k| {
        pulse.matrix()[(n, k)] * phase(n) * phase(k).conj() * w.powf((n + k) as f64 / 2.0)
    });
    compensate(&FockDensityMatrix::from_matrix(pulse.dims().clone(), m)?, 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormTransfer {
    pub fidelity: f64,
    pub populations: Vec<f64>,
}

pub fn closed_form_transfer(
    state: &StateDescriptor,
    s: f64,
    w: f64,
    t: f64,
) -> Result<ClosedFormTransfer> {
    let dim = (state.max_level() + 1).max(2);
    let rho = closed_form_phonon_state(state, s, w, t, dim)?;
    Ok(ClosedFormTransfer {
        fidelity: overlap(state, &rho)?,
        populations: rho.populations(0)?,
    })
}

/// Runs swap (S), fiber loss (T), swap (W) for one initial magnon state.
pub fn run_transfer(scenario: &ScenarioConfig, state: &StateDescriptor) -> Result<TransferReport> {
    let checks = validate(scenario)?;
    let warnings = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} = {:.6e} fails {} {:.3e}", c.name, c.measured, c.relation, c.limit))
        .collect();

    let d = scenario.truncation.unwrap_or(TRANSFER_TRUNCATION);
    let readout = conversion_efficiency(&scenario.readout_pulse()?);
    let mech = conversion_efficiency(&scenario.mechanical_pulse()?);
    let (s, w) = (readout.efficiency, mech.efficiency);
    let t = scenario.fiber.transmittance();

    let dims = ModeDims::new(vec![d])?;
    let magnon = initial_magnon(state, d)?;
    let vacuum = FockDensityMatrix::vacuum(dims.clone());
    let nbar = scenario.mechanical.thermal_occupation;
    let phonon0 = if nbar > 0.0 {
        FockDensityMatrix::thermal(d, nbar)?
    } else {
        vacuum.clone()
    };

    let run = |readout_mode: SwapReadout| -> Result<FockDensityMatrix> {
        let pulse = swap_into(&magnon, &vacuum, s, readout_mode)?;
        let pulse = apply_loss(&pulse, 0, t, LossMethod::Ancilla)?;
        swap_into(&pulse, &phonon0, w, readout_mode)
    };
    let heralded_raw = run(SwapReadout::Heralded)?;
    let heralded = compensate(&heralded_raw, 2)?;
    let traced = compensate(&run(SwapReadout::Traced)?, 2)?;

    let fidelity_closed = if nbar > 0.0 {
        None
    } else {
        Some(overlap(state, &closed_form_phonon_state(state, s, w, t, d)?)?)
    };

    Ok(TransferReport {
        state: state.label(),
        s,
        w,
        t,
        readout_exponent: readout.exponent,
        mechanical_exponent: mech.exponent,
        truncation: d,
        fidelity: overlap(state, &heralded)?,
        fidelity_uncompensated: overlap(state, &heralded_raw)?,
        fidelity_unconditional: overlap(state, &traced)?,
        fidelity_closed,
        phonon_state: heralded,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::FiberSpec;

    fn scenario(km: f64) -> ScenarioConfig {
        let mut s = ScenarioConfig::reference();
        s.fiber = FiberSpec::new(km, 0.2).unwrap();
        s
    }

    #[test]
    fn single_magnon_fidelity_matches_product() {
        for (km, expect) in [(1.0, 0.1617), (10.0, 0.1069)] {
            let r = run_transfer(&scenario(km), &StateDescriptor::Fock(1)).unwrap();
            assert!((r.fidelity - expect).abs() < 1e-4, "{km} km: {}", r.fidelity);
            assert!((r.fidelity - r.s * r.t * r.w).abs() < 1e-12);
            assert!((r.fidelity - r.fidelity_closed.unwrap()).abs() < 1e-10);
            assert!(r.warnings.is_empty());
        }
    }

    #[test]
    fn lossless_fock_fidelity() {
        let s = scenario(0.0);
        for n in 0..4 {
            let r = run_transfer(&s, &StateDescriptor::Fock(n)).unwrap();
            assert!((r.fidelity - (r.s * r.w).powi(n as i32)).abs() < 1e-10);
        }
    }

    #[test]
    fn superposition_fidelity_needs_phase_compensation() {
        let s = scenario(0.0);
        let state = StateDescriptor::Superposition(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let r = run_transfer(&s, &state).unwrap();
        let sw = r.s * r.w;
        assert!((r.fidelity - 0.25 * (1.0 + sw.sqrt()).powi(2)).abs() < 1e-10);
        assert!((r.fidelity_uncompensated - 0.25 * (1.0 - sw.sqrt()).powi(2)).abs() < 1e-10);
        // Tracing the emptied modes keeps the vacuum weight of every branch.
        assert!((r.fidelity_unconditional - 0.5 * (1.0 + sw.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn lossy_superposition_closed_form() {
        let state = StateDescriptor::Superposition(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let r = run_transfer(&scenario(10.0), &state).unwrap();
        let (s, t, w) = (r.s, r.t, r.w);
        let expect = 0.25 * (1.0 + s * (1.0 - t) + 2.0 * (s * t * w).sqrt() + s * t * w);
        assert!((r.fidelity - expect).abs() < 1e-10);
        assert!((r.fidelity_closed.unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn fock_input_stays_diagonal() {
        let r = run_transfer(&scenario(10.0), &StateDescriptor::Fock(1)).unwrap();
        let m = r.phonon_state.matrix();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    assert!(m[(i, j)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_magnons_closed_form() {
        let (s, w, t) = (0.18, 0.93, 0.955);
        let c = closed_form_transfer(&StateDescriptor::Fock(2), s, w, t).unwrap();
        assert!((c.fidelity - (s * t * w).powi(2)).abs() < 1e-15);
        let lossless = closed_form_transfer(&StateDescriptor::Fock(2), s, w, 1.0).unwrap();
        assert!((lossless.fidelity - (s * w).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn thermal_phonon_has_no_closed_form() {
        let mut s = scenario(1.0);
        s.mechanical.thermal_occupation = 0.1;
        let r = run_transfer(&s, &StateDescriptor::Fock(1)).unwrap();
        assert!(r.fidelity_closed.is_none());
        assert!(r.fidelity > 0.0 && r.fidelity < 1.0);
    }

    #[test]
    fn oversized_state_rejected() {
        let mut s = scenario(1.0);
        s.truncation = Some(3);
        assert!(run_transfer(&s, &StateDescriptor::Fock(3)).is_err());
    }
}
