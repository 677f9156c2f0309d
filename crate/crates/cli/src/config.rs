//! Scenario files. Every section and key is optional; anything left out
//! keeps the reference value. Frequencies are `ω/2π` in Hz, durations in
//! seconds, attenuation in dB/km.

use std::f64::consts::PI;

use magnonet::channels::FiberSpec;
use magnonet::protocol::{ScenarioConfig, StateDescriptor};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    magnonic: Magnonic,
    #[serde(default)]
    mechanical: Mechanical,
    #[serde(default)]
    pulses: Pulses,
    #[serde(default)]
    fiber: Fiber,
    #[serde(default)]
    numerics: Numerics,
    #[serde(default)]
    states: Option<Vec<State>>,
    #[serde(default)]
    pub entangle: Entangle,
    #[serde(default)]
    pub qle: Qle,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Magnonic {
    omega_1_over_2pi_hz: Option<f64>,
    omega_2_over_2pi_hz: Option<f64>,
    omega_m_over_2pi_hz: Option<f64>,
    kappa_1_over_2pi_hz: Option<f64>,
    kappa_2_over_2pi_hz: Option<f64>,
    kappa_m_over_2pi_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Mechanical {
    omega_c_over_2pi_hz: Option<f64>,
    omega_mech_over_2pi_hz: Option<f64>,
    kappa_c_over_2pi_hz: Option<f64>,
    gamma_over_2pi_hz: Option<f64>,
    detuning_over_2pi_hz: Option<f64>,
    thermal_occupation: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Pulses {
    #[serde(default)]
    stokes: Stage,
    #[serde(default)]
    readout: Stage,
    #[serde(default)]
    mechanical: Stage,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Stage {
    coupling_over_2pi_hz: Option<f64>,
    duration_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fiber {
    length_km: Option<f64>,
    attenuation_db_per_km: Option<f64>,
    extra_loss_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Numerics {
    truncation: Option<usize>,
    leak_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum State {
    Fock { n: usize },
    /// Amplitudes as `[re, im]`.
    Superposition { c0: [f64; 2], c1: [f64; 2] },
    /// `c_{n,s}` split into real and imaginary tables.
    General { re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>> },
}

/// Overrides for the entanglement run.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entangle {
    pub include_loss: Option<bool>,
    /// Squeezing `r`, replacing the value implied by the Stokes pulse.
    pub r: Option<f64>,
    /// Conversion efficiency, replacing the mechanical pulse value.
    pub w: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Qle {
    pub g_over_kappa: Option<Vec<f64>>,
    /// `𝒢τ`; defaults to the readout pulse.
    pub exponent: Option<f64>,
    pub kappa_over_2pi_hz: Option<f64>,
}

pub const DEFAULT_QLE_RATIOS: [f64; 3] = [0.005, 0.02, 0.1];

fn rad(hz: Option<f64>, fallback: f64) -> f64 {
    hz.map_or(fallback, |f| 2.0 * PI * f)
}

fn table(rows: &[Vec<f64>], key: &str) -> Result<(usize, Vec<f64>), String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(format!("states.{key} must be a non-empty square table"));
    }
    Ok((n, rows.iter().flatten().copied().collect()))
}

impl State {
    fn descriptor(&self) -> Result<StateDescriptor, String> {
        Ok(match self {
            State::Fock { n } => StateDescriptor::Fock(*n),
            State::Superposition { c0, c1 } => StateDescriptor::Superposition(
                Complex64::new(c0[0], c0[1]),
                Complex64::new(c1[0], c1[1]),
            ),
            State::General { re, im } => {
                let (n, re) = table(re, "re")?;
                let im = match im {
                    Some(im) => {
                        let (m, im) = table(im, "im")?;
                        if m != n {
                            return Err("states.im must match states.re in size".into());
                        }
                        im
                    }
                    None => vec![0.0; n * n],
                };
                StateDescriptor::General(DMatrix::from_row_iterator(
                    n,
                    n,
                    re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)),
                ))
            }
        })
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn scenario(&self) -> Result<ScenarioConfig, String> {
        let mut s = ScenarioConfig::reference();
        let m = &self.magnonic;
        s.magnonic.omega_1 = rad(m.omega_1_over_2pi_hz, s.magnonic.omega_1);
        s.magnonic.omega_m = rad(m.omega_m_over_2pi_hz, s.magnonic.omega_m);
        s.magnonic.omega_2 = rad(m.omega_2_over_2pi_hz, s.magnonic.omega_1 + s.magnonic.omega_m);
        s.magnonic.kappa_1 = rad(m.kappa_1_over_2pi_hz, s.magnonic.kappa_1);
        s.magnonic.kappa_2 = rad(m.kappa_2_over_2pi_hz, s.magnonic.kappa_2);
        s.magnonic.kappa_m = rad(m.kappa_m_over_2pi_hz, s.magnonic.kappa_m);

        let o = &self.mechanical;
        s.mechanical.omega_c = rad(o.omega_c_over_2pi_hz, s.mechanical.omega_c);
        s.mechanical.omega_mech = rad(o.omega_mech_over_2pi_hz, s.mechanical.omega_mech);
        s.mechanical.kappa_c = rad(o.kappa_c_over_2pi_hz, s.mechanical.kappa_c);
        s.mechanical.gamma = rad(o.gamma_over_2pi_hz, s.mechanical.gamma);
        s.mechanical.detuning = rad(o.detuning_over_2pi_hz, s.mechanical.omega_mech);
        s.mechanical.thermal_occupation = o.thermal_occupation.unwrap_or(s.mechanical.thermal_occupation);

        for (stage, given) in [
            (&mut s.pulses.stokes, &self.pulses.stokes),
            (&mut s.pulses.readout, &self.pulses.readout),
            (&mut s.pulses.mechanical, &self.pulses.mechanical),
        ] {
            stage.coupling = rad(given.coupling_over_2pi_hz, stage.coupling);
            stage.duration = given.duration_s.unwrap_or(stage.duration);
        }

        let f = &self.fiber;
        let mut fiber = FiberSpec::new(
            f.length_km.unwrap_or(s.fiber.length_km()),
            f.attenuation_db_per_km.unwrap_or(s.fiber.attenuation_db_per_km()),
        )
        .map_err(|e| format!("fiber: {e}"))?;
        if let Some(db) = f.extra_loss_db {
            fiber = fiber.with_extra_loss(db).map_err(|e| format!("fiber.extra_loss_db: {e}"))?;
        }
        s.fiber = fiber;

        s.truncation = self.numerics.truncation.or(s.truncation);
        s.leak_tol = self.numerics.leak_tol.unwrap_or(s.leak_tol);
        if !(s.leak_tol.is_finite() && s.leak_tol > 0.0) {
            return Err(format!("numerics.leak_tol must be positive, got {}", s.leak_tol));
        }
        if let Some(states) = &self.states {
            if states.is_empty() {
                return Err("states must list at least one state".into());
            }
            s.states = states.iter().map(State::descriptor).collect::<Result<_, _>>()?;
        }
        s.include_loss_in_entanglement = self.entangle.include_loss.unwrap_or(false);
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference_scenario() {
        let s = ConfigFile::parse("").unwrap().scenario().unwrap();
        assert_eq!(s, ScenarioConfig::reference());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ConfigFile::parse("[fiber]\nlenght_km = 3\n").unwrap_err();
        assert!(err.contains("lenght_km"), "{err}");
    }

    #[test]
    fn frequencies_become_angular() {
        let text = "[pulses.readout]\ncoupling_over_2pi_hz = 5e6\nduration_s = 8e-8\n";
        let s = ConfigFile::parse(text).unwrap().scenario().unwrap();
        assert!((s.pulses.readout.coupling - 2.0 * PI * 5e6).abs() < 1e-6);
        assert_eq!(s.pulses.readout.duration, 8e-8);
    }

    #[test]
    fn state_families() {
        let text = r#"
[[states]]
kind = "fock"
n = 2

[[states]]
kind = "superposition"
c0 = [1.0, 0.0]
c1 = [0.0, 1.0]

[[states]]
kind = "general"
re = [[0.5, 0.5], [0.5, 0.5]]
"#;
        let s = ConfigFile::parse(text).unwrap().scenario().unwrap();
        assert_eq!(s.states.len(), 3);
        assert_eq!(s.states[0], StateDescriptor::Fock(2));
        assert_eq!(s.states[2].max_level(), 1);
    }

    #[test]
    fn ragged_table_rejected() {
        let text = "[[states]]\nkind = \"general\"\nre = [[1.0], [0.0, 0.0]]\n";
        assert!(ConfigFile::parse(text).unwrap().scenario().is_err());
    }
}
