use super::scenario::ScenarioConfig;
use crate::error::{Error, Result};

/// Relative tolerance for resonance conditions.
pub const RESONANCE_TOL: f64 = 1e-6;
/// Largest `G/κ` accepted as weak coupling.
pub const WEAK_COUPLING_MAX: f64 = 0.1;
/// Largest magnon frequency over optical frequency.
pub const FREQUENCY_SEPARATION_MAX: f64 = 1e-2;
/// Largest pulse duration over magnon lifetime `2π/κ_m`.
pub const MAGNON_LIFETIME_MAX: f64 = 0.1;
/// Largest pulse duration over phonon lifetime `2π/γ`.
pub const PHONON_LIFETIME_MAX: f64 = 0.01;
/// Largest `κ_c/ω_M`, `γ/ω_M` or `G/ω_M` counted as resolved sideband.
pub const SIDEBAND_MAX: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
    /// Comparison the limit uses, for display.
    pub relation: &'static str,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, limit: f64) -> Self {
        Self {
            name,
            passed: measured <= limit,
            measured,
            limit,
            relation: "<=",
        }
    }

    fn below(name: &'static str, measured: f64, limit: f64) -> Self {
        Self {
            name,
            passed: measured < limit,
            measured,
            limit,
            relation: "<",
        }
    }
}

fn rates(s: &ScenarioConfig) -> [(&'static str, f64); 17] {
    let (m, o, p) = (&s.magnonic, &s.mechanical, &s.pulses);
    [
        ("omega_1", m.omega_1),
        ("omega_2", m.omega_2),
        ("omega_m", m.omega_m),
        ("kappa_1", m.kappa_1),
        ("kappa_2", m.kappa_2),
        ("kappa_m", m.kappa_m),
        ("omega_c", o.omega_c),
        ("omega_mech", o.omega_mech),
        ("kappa_c", o.kappa_c),
        ("gamma", o.gamma),
        ("thermal_occupation", o.thermal_occupation),
        ("stokes coupling", p.stokes.coupling),
        ("stokes duration", p.stokes.duration),
        ("readout coupling", p.readout.coupling),
        ("readout duration", p.readout.duration),
        ("mechanical coupling", p.mechanical.coupling),
        ("mechanical duration", p.mechanical.duration),
    ]
}

/// Regime checks for a scenario. Negative or non-finite rates are errors;
/// everything else is reported as a check that may fail.
pub fn validate(s: &ScenarioConfig) -> Result<Vec<Check>> {
    for (name, v) in rates(s) {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Scenario(format!("{name} must be finite and non-negative, got {v}")));
        }
    }
    if !s.mechanical.detuning.is_finite() {
        return Err(Error::Scenario("detuning must be finite".into()));
    }
    let (m, o, p) = (&s.magnonic, &s.mechanical, &s.pulses);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
    let magnon_lifetime = ratio(2.0 * std::f64::consts::PI, m.kappa_m);
    let phonon_lifetime = ratio(2.0 * std::f64::consts::PI, o.gamma);

    Ok(vec![
        Check::at_most(
            "triple_resonance",
            ratio(((m.omega_1 - m.omega_2).abs() - m.omega_m).abs(), m.omega_m),
            RESONANCE_TOL,
        ),
        Check::at_most(
            "magnon_below_optical",
            ratio(m.omega_m, m.omega_1.min(m.omega_2)),
            FREQUENCY_SEPARATION_MAX,
        ),
        Check::at_most("weak_coupling_stokes", ratio(p.stokes.coupling, m.kappa_1), WEAK_COUPLING_MAX),
        Check::at_most("weak_coupling_readout", ratio(p.readout.coupling, m.kappa_2), WEAK_COUPLING_MAX),
        Check::at_most(
            "weak_coupling_mechanical",
            ratio(p.mechanical.coupling, o.kappa_c),
            WEAK_COUPLING_MAX,
        ),
        Check::at_most(
            "stokes_pulse_vs_magnon_lifetime",
            ratio(p.stokes.duration, magnon_lifetime),
            MAGNON_LIFETIME_MAX,
        ),
        Check::at_most(
            "readout_pulse_vs_magnon_lifetime",
            ratio(p.readout.duration, magnon_lifetime),
            MAGNON_LIFETIME_MAX,
        ),
        Check::at_most(
            "mechanical_pulse_vs_phonon_lifetime",
            ratio(p.mechanical.duration, phonon_lifetime),
            PHONON_LIFETIME_MAX,
        ),
        Check::below("sideband_kappa_c", ratio(o.kappa_c, o.omega_mech), SIDEBAND_MAX),
        Check::below("sideband_gamma", ratio(o.gamma, o.omega_mech), SIDEBAND_MAX),
        Check::below("sideband_coupling", ratio(p.mechanical.coupling, o.omega_mech), SIDEBAND_MAX),
        Check::at_most(
            "red_detuning",
            ratio((o.detuning - o.omega_mech).abs(), o.omega_mech),
            RESONANCE_TOL,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let checks = validate(&ScenarioConfig::reference()).unwrap();
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
        let weak = checks.iter().find(|c| c.name == "weak_coupling_readout").unwrap();
        assert!((weak.measured - 0.02).abs() < 1e-12);
        let life = checks.iter().find(|c| c.name == "readout_pulse_vs_magnon_lifetime").unwrap();
        assert!((life.measured - 0.04).abs() < 1e-9);
    }

    #[test]
    fn detuned_triple_resonance_warns() {
        let mut s = ScenarioConfig::reference();
        s.magnonic.omega_2 = s.magnonic.omega_1 + 1.01 * s.magnonic.omega_m;
        let checks = validate(&s).unwrap();
        let tr = checks.iter().find(|c| c.name == "triple_resonance").unwrap();
        assert!(!tr.passed);
        assert!((tr.measured - 0.01).abs() < 1e-6);
        assert_eq!(checks.iter().filter(|c| !c.passed).count(), 1);
    }

    #[test]
    fn negative_rate_is_structural() {
        let mut s = ScenarioConfig::reference();
        s.mechanical.gamma = -1.0;
        assert!(matches!(validate(&s), Err(Error::Scenario(_))));
    }
}
