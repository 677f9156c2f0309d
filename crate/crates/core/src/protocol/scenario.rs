use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::FiberSpec;
use crate::error::{Error, Result};
use crate::fock::{FockKet, ModeDims, DEFAULT_LEAK_TOL};
use crate::propagators::PulseSpec;

fn hz(f: f64) -> f64 {
    2.0 * PI * f
}

/// Optomagnonic node. Frequencies and rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnonicNodeSpec {
    /// Optical mode driven for the Stokes (entangling) pulse.
    pub omega_1: f64,
    /// Optical mode driven for the anti-Stokes (readout) pulse.
    pub omega_2: f64,
    pub omega_m: f64,
    pub kappa_1: f64,
    pub kappa_2: f64,
    pub kappa_m: f64,
}

/// Optomechanical node. Frequencies and rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalNodeSpec {
    pub omega_c: f64,
    pub omega_mech: f64,
    pub kappa_c: f64,
    pub gamma: f64,
    /// Effective cavity detuning `Δ̃_c`.
    pub detuning: f64,
    /// Initial phonon occupation; 0 is the ground state.
    pub thermal_occupation: f64,
}

/// Effective coupling (rad/s) and duration (s) of one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseStage {
    pub coupling: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePlan {
    /// Magnon-photon squeezing pulse.
    pub stokes: PulseStage,
    /// Magnon-to-photon swap pulse.
    pub readout: PulseStage,
    /// Photon-to-phonon swap pulse.
    pub mechanical: PulseStage,
}

/// Initial magnon state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateDescriptor {
    Fock(usize),
    /// `c₀|0⟩ + c₁|1⟩`, normalized on use.
    Superposition(Complex64, Complex64),
    /// Density-matrix elements `c_{n,s}`.
    General(DMatrix<Complex64>),
}

impl StateDescriptor {
    pub fn label(&self) -> String {
        match self {
            StateDescriptor::Fock(n) => format!("fock_{n}"),
            StateDescriptor::Superposition(..) => "superposition".to_string(),
            StateDescriptor::General(c) => format!("general_{}", c.nrows()),
        }
    }

    /// Highest occupied level.
    pub fn max_level(&self) -> usize {
        match self {
            StateDescriptor::Fock(n) => *n,
            StateDescriptor::Superposition(..) => 1,
            StateDescriptor::General(c) => c.nrows().saturating_sub(1),
        }
    }

    /// Target ket when the state is pure and given as one.
    pub fn ket(&self, dim: usize) -> Result<Option<FockKet>> {
        let dims = ModeDims::new(vec![dim])?;
        match self {
            StateDescriptor::Fock(n) => Ok(Some(FockKet::number(dims, &[*n])?)),
            StateDescriptor::Superposition(c0, c1) => {
                if dim < 2 {
                    return Err(Error::Occupation { mode: 0, occupation: 1, dim });
                }
                let mut amps = vec![Complex64::new(0.0, 0.0); dim];
                amps[0] = *c0;
                amps[1] = *c1;
                Ok(Some(FockKet::normalized(dims, amps)?))
            }
            StateDescriptor::General(_) => Ok(None),
        }
    }

    /// `c_{n,s}` as a square table of size `max_level + 1` (at least 2).
    pub fn coefficients(&self) -> Result<DMatrix<Complex64>> {
        match self {
            StateDescriptor::General(c) => {
                if c.nrows() != c.ncols() || c.nrows() == 0 {
                    return Err(Error::Scenario("coefficient table must be square and non-empty".into()));
                }
                Ok(c.clone())
            }
            _ => {
                let k = (self.max_level() + 1).max(2);
                let ket = self.ket(k)?.expect("pure descriptor");
                let v = ket.amplitudes();
                Ok(v * v.adjoint())
            }
        }
    }
}

/// A full two-node network run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub magnonic: MagnonicNodeSpec,
    pub mechanical: MechanicalNodeSpec,
    pub pulses: PulsePlan,
    pub fiber: FiberSpec,
    /// Per-mode truncation; `None` uses the pipeline default.
    pub truncation: Option<usize>,
    pub leak_tol: f64,
    pub states: Vec<StateDescriptor>,
    /// Apply the fiber loss in the entanglement pipeline too (off in the
    /// reference protocol).
    pub include_loss_in_entanglement: bool,
}

/// Default truncation for state transfer.
pub const TRANSFER_TRUNCATION: usize = 12;
/// Default truncation for squeezed states.
pub const SQUEEZE_TRUNCATION: usize = 30;

impl ScenarioConfig {
    /// Reference parameters: 500 MHz magnonic cavities with 10 MHz pulses,
    /// 5.3 GHz mechanics with a 1.3 GHz cavity, 1 km of 0.2 dB/km fiber.
    pub fn reference() -> Self {
        let omega_m = hz(7.0e9);
        let omega_1 = hz(193.4e12);
        Self {
            magnonic: MagnonicNodeSpec {
                omega_1,
                omega_2: omega_1 + omega_m,
                omega_m,
                kappa_1: hz(500e6),
                kappa_2: hz(500e6),
                kappa_m: hz(1e6),
            },
            mechanical: MechanicalNodeSpec {
                omega_c: hz(193.4e12),
                omega_mech: hz(5.3e9),
                kappa_c: hz(1.3e9),
                gamma: hz(4.8e3),
                detuning: hz(5.3e9),
                thermal_occupation: 0.0,
            },
            pulses: PulsePlan {
                stokes: PulseStage { coupling: hz(10e6), duration: 30e-9 },
                readout: PulseStage { coupling: hz(10e6), duration: 40e-9 },
                mechanical: PulseStage { coupling: hz(50e6), duration: 55e-9 },
            },
            fiber: FiberSpec::new(1.0, 0.2).expect("valid fiber"),
            truncation: None,
            leak_tol: DEFAULT_LEAK_TOL,
            states: vec![
                StateDescriptor::Fock(1),
                StateDescriptor::Superposition(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            ],
            include_loss_in_entanglement: false,
        }
    }

    pub fn stokes_pulse(&self) -> Result<PulseSpec> {
        let p = self.pulses.stokes;
        PulseSpec::new(p.coupling, self.magnonic.kappa_1, p.duration)
    }

    pub fn readout_pulse(&self) -> Result<PulseSpec> {
        let p = self.pulses.readout;
        PulseSpec::new(p.coupling, self.magnonic.kappa_2, p.duration)
    }

    pub fn mechanical_pulse(&self) -> Result<PulseSpec> {
        let p = self.pulses.mechanical;
        PulseSpec::new(p.coupling, self.mechanical.kappa_c, p.duration)
    }
}
