//! Two-node protocols: magnon-to-phonon state transfer over fiber and
//! magnon-phonon entanglement.

mod entangle;
mod scenario;
mod transfer;
mod validate;

pub use entangle::{
    entangle, fig5_curves, fig5_r_grid, run_entanglement, EntangleReport, EntangleSettings,
    Fig5Row, TruncationPolicy, FIG5_EFFICIENCIES,
};
pub use scenario::{
    MagnonicNodeSpec, MechanicalNodeSpec, PulsePlan, PulseStage, ScenarioConfig, StateDescriptor,
    SQUEEZE_TRUNCATION, TRANSFER_TRUNCATION,
};
pub use transfer::{
    closed_form_phonon_state, closed_form_transfer, run_transfer, ClosedFormTransfer,
    TransferReport,
};
pub use validate::{
    validate, Check, FREQUENCY_SEPARATION_MAX, MAGNON_LIFETIME_MAX, PHONON_LIFETIME_MAX,
    RESONANCE_TOL, SIDEBAND_MAX, WEAK_COUPLING_MAX,
};
