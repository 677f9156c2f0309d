use nalgebra::{DMatrix, DVector};

use super::covariance::{CovarianceState, PHYSICALITY_TOL};
use super::drift::DriftDiffusion;
use crate::error::{positive, Error, Result};

/// Covariance norm treated as a blowup.
pub const MAX_CM_NORM: f64 = 1e12;

/// Largest step accepted, in units of the fastest rate in the drift.
pub const MAX_STEP_RATE_PRODUCT: f64 = 0.05;

/// Step size that resolves the fastest scale of `dd`, shrunk so that it
/// divides the span evenly with at least `min_steps` steps.
pub fn default_step(dd: &DriftDiffusion, span: f64, min_steps: usize) -> f64 {
    let fastest = dd.max_linewidth().max(dd.max_frequency());
    let cap = if fastest > 0.0 {
        MAX_STEP_RATE_PRODUCT / fastest
    } else {
        span
    };
    let steps = ((span / cap).ceil() as usize).max(min_steps).max(1);
    span / steps as f64
}

/// Fixed-step RK4 for `V̇ = AV + VAᵀ + D` and `ẋ = Ax` from `t0` to `t1`.
///
/// The step is `dt` shrunk to divide the span evenly. Physical modes are
/// checked against the uncertainty relation after every step.
pub fn integrate(
    state: &CovarianceState,
    dd: &DriftDiffusion,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<CovarianceState> {
    let dt = positive("time step", dt)?;
    let fastest = dd.max_linewidth().max(dd.max_frequency());
    if dt * fastest > MAX_STEP_RATE_PRODUCT * (1.0 + 1e-12) {
        return Err(Error::Parameter {
            name: "time step",
            value: dt,
            reason: "must be at most 0.05 over the fastest rate",
        });
    }
    if state.modes() != dd.modes() {
        return Err(Error::DimMismatch {
            expected: dd.modes(),
            found: state.modes(),
        });
    }
    let span = t1 - t0;
    if !(span >= 0.0) {
        return Err(Error::Parameter {
            name: "time span",
            value: span,
            reason: "end must not precede start",
        });
    }
    let steps = (span / dt).ceil() as usize;
    if steps == 0 {
        return Ok(state.clone());
    }
    let h = span / steps as f64;
    let d = dd.diffusion();
    let physical: Vec<usize> = (0..dd.physical_modes()).collect();

    let rhs = |a: &DMatrix<f64>, v: &DMatrix<f64>, x: &DVector<f64>| {
        let av = a * v;
        (&av + av.transpose() + d, a * x)
    };

    let mut v = state.cm().clone();
    let mut x = state.mean().clone();
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let a0 = dd.drift(t);
        let am = dd.drift(t + h / 2.0);
        let a1 = dd.drift(t + h);

        let (k1v, k1x) = rhs(&a0, &v, &x);
        let (k2v, k2x) = rhs(&am, &(&v + &k1v * (h / 2.0)), &(&x + &k1x * (h / 2.0)));
        let (k3v, k3x) = rhs(&am, &(&v + &k2v * (h / 2.0)), &(&x + &k2x * (h / 2.0)));
        let (k4v, k4x) = rhs(&a1, &(&v + &k3v * h), &(&x + &k3x * h));
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        // Remove round-off asymmetry.
        v = (&v + v.transpose()) * 0.5;

        let norm = v.amax();
        if !norm.is_finite() || norm > MAX_CM_NORM {
            return Err(Error::Unstable { t: t + h, norm });
        }
        let step = CovarianceState::unchecked(x.clone(), v.clone())?;
        let defect = step.reduced(&physical)?.physicality_defect();
        if defect < -PHYSICALITY_TOL {
            return Err(Error::Unphysical(defect));
        }
    }
    CovarianceState::unchecked(x, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::drift::{build_drift, QleParams, SystemKind};

    #[test]
    fn vacuum_is_a_fixed_point() {
        let dd = build_drift(SystemKind::OptomechRedRwa, &{
            let mut p = QleParams::new(0.0, 2.0);
            p.matter_linewidth = 2.0;
            p
        })
        .unwrap();
        let out = integrate(&CovarianceState::vacuum(2), &dd, 0.0, 250.0, 0.025).unwrap();
        assert!((out.cm() - DMatrix::identity(4, 4)).amax() < 1e-10);
    }

    #[test]
    fn thermal_relaxes_to_bath() {
        let mut p = QleParams::new(0.0, 1.0);
        p.matter_linewidth = 1.0;
        p.matter_bath_occupation = 3.0;
        let dd = build_drift(SystemKind::OptomechRedRwa, &p).unwrap();
        let out = integrate(&CovarianceState::vacuum(2), &dd, 0.0, 5.0, 0.01).unwrap();
        let expect = 3.0 * (1.0 - (-5.0f64).exp());
        assert!((out.occupation(1).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn coarse_step_rejected() {
        let dd = build_drift(SystemKind::MagnonicAntiStokes, &QleParams::new(0.1, 1.0)).unwrap();
        assert!(integrate(&CovarianceState::vacuum(2), &dd, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn instability_is_reported() {
        let mut p = QleParams::new(1.0, 1.0);
        p.matter_linewidth = 0.01;
        let dd = build_drift(SystemKind::OptomechBlueRwa, &p).unwrap();
        let err = integrate(&CovarianceState::vacuum(2), &dd, 0.0, 1e3, 0.05).unwrap_err();
        assert!(matches!(err, Error::Unstable { .. }));
    }

    #[test]
    fn mismatched_modes_rejected() {
        let dd = build_drift(SystemKind::MagnonicStokes, &QleParams::new(0.1, 1.0)).unwrap();
        assert!(integrate(&CovarianceState::vacuum(3), &dd, 0.0, 1.0, 0.01).is_err());
    }
}
