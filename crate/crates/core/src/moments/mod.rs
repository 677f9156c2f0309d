//! Gaussian moment dynamics of the linearized Langevin equations.

mod covariance;
mod drift;
mod integrate;
mod pulse;

pub use covariance::{symplectic_form, symplectic_spectrum, CovarianceState, PHYSICALITY_TOL};
pub use drift::{
    build_drift, drive_amplitude, effective_coupling, Direction, DriftDiffusion, DriveAmplitude,
    DriveSpec, QleParams, SystemKind, TemporalMode, CAVITY, HBAR, MATTER,
};
pub use integrate::{default_step, integrate, MAX_CM_NORM, MAX_STEP_RATE_PRODUCT};
pub use pulse::{simulate_pulse, validate_adiabatic, AdiabaticRow, PulseRun};
