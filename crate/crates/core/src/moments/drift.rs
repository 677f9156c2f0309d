use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{non_negative, positive, Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// A classical drive on one cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Power in W.
    pub power: f64,
    /// Drive frequency in rad/s.
    pub frequency: f64,
    /// External (coupling) linewidth in rad/s.
    pub external_linewidth: f64,
    /// Effective detuning in rad/s.
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveAmplitude {
    /// Drive rate `E = √(Pκᵉ/ħω)` in 1/s.
    pub rate: f64,
    /// Steady-state intracavity amplitude `E / (κ/2 + iΔ)`.
    pub intracavity: Complex64,
}

pub fn drive_amplitude(drive: &DriveSpec, total_linewidth: f64) -> Result<DriveAmplitude> {
    let power = non_negative("drive power", drive.power)?;
    let omega = positive("drive frequency", drive.frequency)?;
    let ke = non_negative("external linewidth", drive.external_linewidth)?;
    let kappa = positive("total linewidth", total_linewidth)?;
    let rate = (power * ke / (HBAR * omega)).sqrt();
    Ok(DriveAmplitude {
        rate,
        intracavity: Complex64::new(rate, 0.0) / Complex64::new(kappa / 2.0, drive.detuning),
    })
}

/// Linearized coupling `G = g₀|α|`.
pub fn effective_coupling(single_photon_coupling: f64, amplitude: &DriveAmplitude) -> f64 {
    single_photon_coupling * amplitude.intracavity.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    MagnonicAntiStokes,
    MagnonicStokes,
    OptomechRedRwa,
    OptomechBlueRwa,
    OptomechFull,
}

impl SystemKind {
    pub const ALL: [SystemKind; 5] = [
        SystemKind::MagnonicAntiStokes,
        SystemKind::MagnonicStokes,
        SystemKind::OptomechRedRwa,
        SystemKind::OptomechBlueRwa,
        SystemKind::OptomechFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::MagnonicAntiStokes => "magnonic_antistokes",
            SystemKind::MagnonicStokes => "magnonic_stokes",
            SystemKind::OptomechRedRwa => "optomech_red_rwa",
            SystemKind::OptomechBlueRwa => "optomech_blue_rwa",
            SystemKind::OptomechFull => "optomech_full",
        }
    }

    /// Whether the matter mode is swapped (beamsplitter) rather than
    /// squeezed with the cavity.
    pub fn is_swap(self) -> bool {
        matches!(
            self,
            SystemKind::MagnonicAntiStokes | SystemKind::OptomechRedRwa | SystemKind::OptomechFull
        )
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Scenario(format!("unknown system kind `{s}`")))
    }
}

/// Parameters of a cavity coupled to one matter mode (magnon or phonon).
/// All rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QleParams {
    pub coupling: f64,
    pub cavity_linewidth: f64,
    pub matter_linewidth: f64,
    /// Bath occupation of the matter mode.
    pub matter_bath_occupation: f64,
    /// Needed by the full optomechanical model.
    pub mechanical_frequency: Option<f64>,
    /// Effective cavity detuning; needed by the full optomechanical model.
    pub detuning: Option<f64>,
}

impl QleParams {
    pub fn new(coupling: f64, cavity_linewidth: f64) -> Self {
        Self {
            coupling,
            cavity_linewidth,
            matter_linewidth: 0.0,
            matter_bath_occupation: 0.0,
            mechanical_frequency: None,
            detuning: None,
        }
    }
}

/// Mode index of the cavity in every built system.
pub const CAVITY: usize = 0;
/// Mode index of the matter mode in every built system.
pub const MATTER: usize = 1;

/// Coefficients of `ȧ = K a + L a†` oscillating as `e^{iωt}`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    frequency: f64,
    k: DMatrix<Complex64>,
    l: DMatrix<Complex64>,
}

/// Linear drift `A(t)` and diffusion `D` in interleaved quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    modes: usize,
    /// Amplitude decay rate `κ` per mode; filters carry 0.
    linewidths: Vec<f64>,
    constant: DMatrix<f64>,
    /// `(ω, cos part, sin part)`.
    oscillating: Vec<(f64, DMatrix<f64>, DMatrix<f64>)>,
    diffusion: DMatrix<f64>,
    /// Number of leading modes that are physical bosonic modes.
    physical_modes: usize,
}

/// Real 2×2 block of `ȧ = k a + l a†` in `(x, p)`.
fn realify_entry(k: Complex64, l: Complex64) -> [[f64; 2]; 2] {
    let (s, d) = (k + l, k - l);
    [[s.re, -d.im], [s.im, d.re]]
}

fn realify(k: &DMatrix<Complex64>, l: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = k.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let b = realify_entry(k[(i, j)], l[(i, j)]);
            for (r, row) in b.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    out[(2 * i + r, 2 * j + c)] = v;
                }
            }
        }
    }
    out
}

impl DriftDiffusion {
    fn from_terms(linewidths: Vec<f64>, occupations: Vec<f64>, terms: Vec<Term>) -> Self {
        let n = linewidths.len();
        let mut constant = DMatrix::zeros(2 * n, 2 * n);
        let mut diffusion = DMatrix::zeros(2 * n, 2 * n);
        for (j, (&kappa, &nbar)) in linewidths.iter().zip(&occupations).enumerate() {
            for q in [2 * j, 2 * j + 1] {
                constant[(q, q)] = -kappa / 2.0;
                diffusion[(q, q)] = kappa * (2.0 * nbar + 1.0);
            }
        }
        let mut oscillating = Vec::new();
        for t in terms {
            // Resonant terms of the full model land here too.
            if t.frequency == 0.0 {
                constant += realify(&t.k, &t.l);
            } else {
                let i = Complex64::new(0.0, 1.0);
                let cos = realify(&t.k, &t.l);
                let sin = realify(&t.k.map(|z| z * i), &t.l.map(|z| z * i));
                oscillating.push((t.frequency, cos, sin));
            }
        }
        Self {
            modes: n,
            linewidths,
            constant,
            oscillating,
            diffusion,
            physical_modes: n,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn physical_modes(&self) -> usize {
        self.physical_modes
    }

    pub fn is_time_dependent(&self) -> bool {
        !self.oscillating.is_empty()
    }

    /// Largest oscillation frequency in the drift, rad/s.
    pub fn max_frequency(&self) -> f64 {
        self.oscillating.iter().map(|o| o.0.abs()).fold(0.0, f64::max)
    }

    pub fn max_linewidth(&self) -> f64 {
        self.linewidths.iter().copied().fold(0.0, f64::max)
    }

    pub fn drift(&self, t: f64) -> DMatrix<f64> {
        let mut a = self.constant.clone();
        for (w, cos, sin) in &self.oscillating {
            let (s, c) = (w * t).sin_cos();
            a += cos * c + sin * s;
        }
        a
    }

    pub fn diffusion(&self) -> &DMatrix<f64> {
        &self.diffusion
    }

    /// Appends a filter mode `ḟ = -σf + √κ a - a_in` fed by the output of
    /// `mode`. Filter amplitudes are integrals of the output field, so the
    /// filter mode is not a physical mode until rescaled.
    pub fn with_output_filter(&self, mode: usize, sigma: f64) -> Result<Self> {
        if mode >= self.physical_modes {
            return Err(Error::ModeIndex {
                index: mode,
                modes: self.physical_modes,
            });
        }
        let n = self.modes + 1;
        let f = self.modes;
        let kappa = self.linewidths[mode];
        let grow = |m: &DMatrix<f64>| {
            let mut out = DMatrix::zeros(2 * n, 2 * n);
            out.view_mut((0, 0), (2 * self.modes, 2 * self.modes)).copy_from(m);
            out
        };
        let mut constant = grow(&self.constant);
        let mut diffusion = grow(&self.diffusion);
        let rk = kappa.sqrt();
        for q in 0..2 {
            constant[(2 * f + q, 2 * f + q)] = -sigma;
            constant[(2 * f + q, 2 * mode + q)] = rk;
            diffusion[(2 * f + q, 2 * f + q)] = 1.0;
            diffusion[(2 * f + q, 2 * mode + q)] = -rk;
            diffusion[(2 * mode + q, 2 * f + q)] = -rk;
        }
        let mut linewidths = self.linewidths.clone();
        linewidths.push(0.0);
        Ok(Self {
            modes: n,
            linewidths,
            constant,
            oscillating: self
                .oscillating
                .iter()
                .map(|(w, c, s)| (*w, grow(c), grow(s)))
                .collect(),
            diffusion,
            physical_modes: self.physical_modes,
        })
    }
}

/// Drift and diffusion for `[cavity, matter]` in the frame rotating with
/// the resonant interaction.
pub fn build_drift(kind: SystemKind, params: &QleParams) -> Result<DriftDiffusion> {
    let g = non_negative("coupling", params.coupling)?;
    let kappa = positive("cavity linewidth", params.cavity_linewidth)?;
    let gamma = non_negative("matter linewidth", params.matter_linewidth)?;
    let nbar = non_negative("matter bath occupation", params.matter_bath_occupation)?;
    let zero = || DMatrix::<Complex64>::zeros(2, 2);
    let ig = Complex64::new(0.0, -g);

    let mut swap = zero();
    swap[(CAVITY, MATTER)] = ig;
    swap[(MATTER, CAVITY)] = ig;

    let terms = match kind {
        SystemKind::MagnonicAntiStokes | SystemKind::OptomechRedRwa => vec![Term {
            frequency: 0.0,
            k: swap,
            l: zero(),
        }],
        SystemKind::MagnonicStokes | SystemKind::OptomechBlueRwa => vec![Term {
            frequency: 0.0,
            k: zero(),
            l: swap,
        }],
        SystemKind::OptomechFull => {
            let wm = positive("mechanical frequency", param(params.mechanical_frequency, "mechanical frequency")?)?;
            let det = param(params.detuning, "detuning")?;
            let (minus, plus) = (det - wm, det + wm);
            // ȧ_c = -iG(e^{iΔ₋t} b + e^{iΔ₊t} b†),
            // ȧ_b = -iG(e^{-iΔ₋t} c + e^{iΔ₊t} c†).
            let single = |i: usize, j: usize| {
                let mut m = zero();
                m[(i, j)] = ig;
                m
            };
            vec![
                Term { frequency: minus, k: single(CAVITY, MATTER), l: zero() },
                Term { frequency: -minus, k: single(MATTER, CAVITY), l: zero() },
                Term { frequency: plus, k: zero(), l: swap },
            ]
        }
    };
    Ok(DriftDiffusion::from_terms(vec![kappa, gamma], vec![0.0, nbar], terms))
}

fn param(value: Option<f64>, name: &'static str) -> Result<f64> {
    value.ok_or(Error::Parameter {
        name,
        value: f64::NAN,
        reason: "required by the full optomechanical model",
    })
}

/// Normalized exponential pulse mode `∝ e^{w s}` on `[0, τ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalMode {
    pub rate: f64,
    pub duration: f64,
    pub direction: Direction,
    /// `+1` for `e^{𝒢s}`, `-1` for `e^{-𝒢s}`.
    pub sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

impl TemporalMode {
    /// Output mode that carries the matter mode away: decaying profile for
    /// a swap, growing profile for a squeezer.
    pub fn output(kind: SystemKind, rate: f64, duration: f64) -> Self {
        Self {
            rate,
            duration,
            direction: Direction::Out,
            sign: if kind.is_swap() { -1.0 } else { 1.0 },
        }
    }

    pub fn exponent(&self) -> f64 {
        self.sign * self.rate
    }

    /// `(∫₀^τ e^{2ws} ds)^{-1/2}`.
    pub fn normalization(&self) -> f64 {
        let w = self.exponent();
        (2.0 * w / (2.0 * w * self.duration).exp_m1()).sqrt()
    }

    pub fn weight(&self, s: f64) -> f64 {
        self.normalization() * (self.exponent() * s).exp()
    }

    /// Decay constant of the cascaded filter whose value at `τ` is
    /// proportional to the mode.
    pub fn filter_sigma(&self) -> f64 {
        self.exponent()
    }

    /// Factor turning the filter amplitude at `τ` into the mode operator.
    pub fn filter_scale(&self) -> f64 {
        self.normalization() * (self.exponent() * self.duration).exp()
    }
}
