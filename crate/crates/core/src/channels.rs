//! Fiber attenuation as a pure-loss channel.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{non_negative, unit_interval, Error, Result};
use crate::fock::{FockDensityMatrix, Generator, ModeDims, DEFAULT_LEAK_TOL};

/// A fiber link. Transit time is carried for reporting only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    length_km: f64,
    attenuation_db_per_km: f64,
    extra_loss_db: f64,
    transit_time: Option<f64>,
}

impl FiberSpec {
    pub fn new(length_km: f64, attenuation_db_per_km: f64) -> Result<Self> {
        Ok(Self {
            length_km: non_negative("fiber length", length_km)?,
            attenuation_db_per_km: non_negative("fiber attenuation", attenuation_db_per_km)?,
            extra_loss_db: 0.0,
            transit_time: None,
        })
    }

    pub fn with_extra_loss(mut self, extra_loss_db: f64) -> Result<Self> {
        self.extra_loss_db = non_negative("extra loss", extra_loss_db)?;
        Ok(self)
    }

    pub fn with_transit_time(mut self, seconds: f64) -> Result<Self> {
        self.transit_time = Some(non_negative("transit time", seconds)?);
        Ok(self)
    }

    pub fn length_km(&self) -> f64 {
        self.length_km
    }

    pub fn attenuation_db_per_km(&self) -> f64 {
        self.attenuation_db_per_km
    }

    pub fn transit_time(&self) -> Option<f64> {
        self.transit_time
    }

    pub fn total_loss_db(&self) -> f64 {
        self.attenuation_db_per_km * self.length_km + self.extra_loss_db
    }

    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.total_loss_db() / 10.0)
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.transmittance()
    }
}

pub fn transmittance(fiber: &FiberSpec) -> f64 {
    fiber.transmittance()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossMethod {
    /// Beamsplitter against a vacuum ancilla, ancilla traced out.
    Ancilla,
    /// Operator-sum form.
    Kraus,
}

/// Kraus operators `A_k = R^{k/2}/√k! aᵏ T^{n̂/2}` for `k < dim`; complete
/// on the truncated space.
pub fn loss_kraus_operators(dim: usize, transmittance: f64) -> Result<Vec<DMatrix<Complex64>>> {
    let t = unit_interval("transmittance", transmittance)?;
    let r = 1.0 - t;
    Ok((0..dim)
        .map(|k| {
            DMatrix::from_fn(dim, dim, |row, col| {
                if col >= k && row == col - k {
                    let amp = (binomial(col, k) * r.powi(k as i32) * t.powi(row as i32)).sqrt();
                    Complex64::new(amp, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Attenuates `mode` to transmittance `T`.
pub fn apply_loss(
    rho: &FockDensityMatrix,
    mode: usize,
    transmittance: f64,
    method: LossMethod,
) -> Result<FockDensityMatrix> {
    let t = unit_interval("transmittance", transmittance)?;
    rho.dims().check_mode(mode)?;
    let d = rho.dims().dim(mode);
    match method {
        LossMethod::Ancilla => {
            let ancilla = FockDensityMatrix::vacuum(ModeDims::new(vec![d])?);
            let joint = rho.tensor(&ancilla);
            let anc = joint.dims().modes() - 1;
            let theta = (1.0 - t).sqrt().asin();
            let (out, _) = joint.apply_two_mode_exponential(
                mode,
                anc,
                Generator::BeamSplitter,
                theta,
                DEFAULT_LEAK_TOL,
            )?;
            out.partial_trace(anc)
        }
        LossMethod::Kraus => rho.apply_kraus(mode, &loss_kraus_operators(d, t)?),
    }
}

/// Pulse state after a swap of efficiency `S` from a matter mode with
/// density-matrix elements `c_{n,s}` and a loss of transmittance `T`,
/// evaluated term by term:
///
/// `Σ c_{n,s} (-i)ⁿ iˢ S^{(n+s)/2} Σ_m √(C(n,m) C(s,m)) Rᵐ T^{(n+s)/2-m} |n-m⟩⟨s-m|`.
pub fn post_loss_pulse_state(
    coefficients: &DMatrix<Complex64>,
    efficiency: f64,
    transmittance: f64,
    dim: usize,
) -> Result<FockDensityMatrix> {
    let out = post_loss_coefficients(coefficients, efficiency, transmittance, dim)?;
    FockDensityMatrix::from_matrix(ModeDims::new(vec![dim])?, out)
}

/// The same sum for any table `c_{n,s}`, not only a density matrix. Being
/// linear, it also acts on off-diagonal blocks of multimode states.
pub fn post_loss_coefficients(
    coefficients: &DMatrix<Complex64>,
    efficiency: f64,
    transmittance: f64,
    dim: usize,
) -> Result<DMatrix<Complex64>> {
    let s_eff = unit_interval("conversion efficiency", efficiency)?;
    let t = unit_interval("transmittance", transmittance)?;
    let r = 1.0 - t;
    let k = coefficients.nrows();
    if coefficients.ncols() != k {
        return Err(Error::DimMismatch {
            expected: k,
            found: coefficients.ncols(),
        });
    }
    if k > dim {
        return Err(Error::Occupation {
            mode: 0,
            occupation: k - 1,
            dim,
        });
    }
    let phase = |n: usize, s: usize| {
        Complex64::new(0.0, -1.0).powu(n as u32) * Complex64::new(0.0, 1.0).powu(s as u32)
    };

    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..k {
        for s in 0..k {
            let c = coefficients[(n, s)];
            if c.norm() == 0.0 {
                continue;
            }
            let half = (n + s) as f64 / 2.0;
            let prefactor = c * phase(n, s) * s_eff.powf(half);
            for m in 0..=n.min(s) {
                let weight = (binomial(n, m) * binomial(s, m)).sqrt()
                    * r.powi(m as i32)
                    * t.powf(half - m as f64);
                out[(n - m, s - m)] += prefactor * weight;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockKet;
    use crate::linalg::max_abs_diff;

    fn single(d: usize) -> ModeDims {
        ModeDims::new(vec![d]).unwrap()
    }

    #[test]
    fn fiber_transmittance_values() {
        let t1 = FiberSpec::new(1.0, 0.2).unwrap().transmittance();
        let t10 = FiberSpec::new(10.0, 0.2).unwrap().transmittance();
        assert!((t1 - 0.955).abs() < 0.001);
        assert!((t10 - 0.631).abs() < 0.001);
        assert_eq!(FiberSpec::new(0.0, 0.2).unwrap().transmittance(), 1.0);
        let f = FiberSpec::new(10.0, 0.2).unwrap();
        assert!((f.transmittance() + f.reflectance() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn extra_loss_adds_in_db() {
        let f = FiberSpec::new(5.0, 0.2).unwrap().with_extra_loss(1.0).unwrap();
        assert!((f.transmittance() - 10f64.powf(-0.2)).abs() < 1e-15);
    }

    #[test]
    fn negative_fiber_inputs_rejected() {
        assert!(FiberSpec::new(-1.0, 0.2).is_err());
        assert!(FiberSpec::new(1.0, -0.2).is_err());
        assert!(FiberSpec::new(1.0, 0.2).unwrap().with_extra_loss(-3.0).is_err());
    }

    #[test]
    fn unit_transmittance_is_identity() {
        let ket = FockKet::normalized(
            single(4),
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.2, 0.4),
                Complex64::new(0.0, -0.3),
                Complex64::new(0.1, 0.0),
            ],
        )
        .unwrap();
        let rho = ket.to_density();
        for method in [LossMethod::Ancilla, LossMethod::Kraus] {
            let out = apply_loss(&rho, 0, 1.0, method).unwrap();
            assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-14);
        }
    }

    #[test]
    fn zero_transmittance_empties_mode() {
        let rho = FockKet::number(single(4), &[3]).unwrap().to_density();
        for method in [LossMethod::Ancilla, LossMethod::Kraus] {
            let out = apply_loss(&rho, 0, 0.0, method).unwrap();
            assert!(max_abs_diff(out.matrix(), FockDensityMatrix::vacuum(single(4)).matrix()) < 1e-14);
        }
    }

    #[test]
    fn single_photon_bernoulli() {
        let rho = FockKet::number(single(2), &[1]).unwrap().to_density();
        for method in [LossMethod::Ancilla, LossMethod::Kraus] {
            let out = apply_loss(&rho, 0, 0.631, method).unwrap();
            assert!((out.matrix()[(0, 0)].re - 0.369).abs() < 1e-14);
            assert!((out.matrix()[(1, 1)].re - 0.631).abs() < 1e-14);
        }
    }

    #[test]
    fn transmittance_out_of_range() {
        let rho = FockDensityMatrix::vacuum(single(3));
        assert!(apply_loss(&rho, 0, 1.5, LossMethod::Kraus).is_err());
        assert!(apply_loss(&rho, 0, -0.5, LossMethod::Ancilla).is_err());
    }

    #[test]
    fn kraus_set_is_complete() {
        let ops = loss_kraus_operators(6, 0.37).unwrap();
        let sum = ops.iter().fold(DMatrix::<Complex64>::zeros(6, 6), |acc, a| acc + a.adjoint() * a);
        assert!(max_abs_diff(&sum, &DMatrix::identity(6, 6)) < 1e-14);
    }

    #[test]
    fn single_magnon_pulse_state() {
        let mut c = DMatrix::<Complex64>::zeros(2, 2);
        c[(1, 1)] = Complex64::new(1.0, 0.0);
        let (s, t) = (0.18, 0.955);
        let rho = post_loss_pulse_state(&c, s, t, 4).unwrap();
        // Weight S on the branch that left the magnon, Bernoulli-split by T.
        assert!((rho.matrix()[(1, 1)].re - s * t).abs() < 1e-15);
        assert!((rho.matrix()[(0, 0)].re - s * (1.0 - t)).abs() < 1e-15);
    }

    #[test]
    fn lossless_pulse_state_scales_coefficients() {
        let c = DMatrix::from_fn(3, 3, |n, s| Complex64::new(0.1 * (n + s + 1) as f64, 0.0));
        let s_eff = 0.3f64;
        let rho = post_loss_pulse_state(&c, s_eff, 1.0, 3).unwrap();
        for n in 0..3 {
            for s in 0..3 {
                let expect = c[(n, s)].re * s_eff.powf((n + s) as f64 / 2.0);
                assert!((rho.matrix()[(n, s)].norm() - expect).abs() < 1e-15);
            }
        }
    }

    fn mixed_two_mode() -> FockDensityMatrix {
        let dims = ModeDims::new(vec![4, 5]).unwrap();
        let amps: Vec<Complex64> = (0..20)
            .map(|i| Complex64::new((0.3 * i as f64).sin(), (0.7 * i as f64).cos() * 0.5))
            .collect();
        let a = FockKet::normalized(dims.clone(), amps).unwrap().to_density();
        let b = FockKet::number(dims, &[1, 2]).unwrap().to_density();
        let m = a.matrix() * Complex64::new(0.6, 0.0) + b.matrix() * Complex64::new(0.4, 0.0);
        FockDensityMatrix::from_matrix(a.dims().clone(), m).unwrap()
    }

    #[test]
    fn ancilla_and_kraus_agree() {
        let rho = mixed_two_mode();
        for mode in 0..2 {
            let a = apply_loss(&rho, mode, 0.631, LossMethod::Ancilla).unwrap();
            let k = apply_loss(&rho, mode, 0.631, LossMethod::Kraus).unwrap();
            assert!(max_abs_diff(a.matrix(), k.matrix()) < 1e-12);
            assert!((a.trace() - 1.0).abs() < 1e-12);
            assert!(a.min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn losses_compose() {
        let rho = mixed_two_mode();
        let twice = apply_loss(
            &apply_loss(&rho, 1, 0.8, LossMethod::Kraus).unwrap(),
            1,
            0.7,
            LossMethod::Ancilla,
        )
        .unwrap();
        let once = apply_loss(&rho, 1, 0.56, LossMethod::Kraus).unwrap();
        assert!(max_abs_diff(twice.matrix(), once.matrix()) < 1e-12);
    }

    #[test]
    fn pulse_formula_matches_loss_channel() {
        // A Hermitian coefficient table, already phase-rotated by the swap,
        // attenuated with the channel.
        let k = 4;
        let c = DMatrix::from_fn(k, k, |n, s| {
            let z = Complex64::new(0.05 * (n * s + 1) as f64, 0.02 * (n as f64 - s as f64));
            if n == s { Complex64::new(z.re + 0.1, 0.0) } else { z }
        });
        let (s_eff, t) = (0.18f64, 0.631);
        let d = 6;
        let mut swapped = DMatrix::<Complex64>::zeros(d, d);
        for n in 0..k {
            for s in 0..k {
                let ph = Complex64::new(0.0, -1.0).powu(n as u32) * Complex64::new(0.0, 1.0).powu(s as u32);
                swapped[(n, s)] = c[(n, s)] * ph * s_eff.powf((n + s) as f64 / 2.0);
            }
        }
        let swapped = FockDensityMatrix::from_matrix(single(d), swapped).unwrap();
        let channel = apply_loss(&swapped, 0, t, LossMethod::Kraus).unwrap();
        let formula = post_loss_pulse_state(&c, s_eff, t, d).unwrap();
        assert!(max_abs_diff(channel.matrix(), formula.matrix()) < 1e-14);
    }

    #[test]
    fn pulse_state_needs_room() {
        let c = DMatrix::<Complex64>::identity(5, 5) / Complex64::new(5.0, 0.0);
        assert!(matches!(
            post_loss_pulse_state(&c, 0.5, 0.5, 4),
            Err(Error::Occupation { .. })
        ));
    }
}
