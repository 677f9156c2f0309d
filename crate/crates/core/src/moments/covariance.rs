use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{non_negative, Error, Result};
use crate::linalg::hermitian_eigenvalues;

/// Tolerance on `V + iΩ ⪰ 0`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Gaussian state in interleaved quadratures `(x₁, p₁, x₂, p₂, …)` with
/// `x = a + a†`, `p = -i(a - a†)`; vacuum covariance is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    mean: DVector<f64>,
    cm: DMatrix<f64>,
}

/// Symplectic form `⊕ [[0, 1], [-1, 0]]`.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

impl CovarianceState {
    /// Validated constructor: symmetric within 1e-10 and physical.
    pub fn new(mean: DVector<f64>, cm: DMatrix<f64>) -> Result<Self> {
        let state = Self::unchecked(mean, cm)?;
        let defect = state.physicality_defect();
        if defect < -PHYSICALITY_TOL {
            return Err(Error::Unphysical(defect));
        }
        Ok(state)
    }

    /// Shape and symmetry checks only. Used for auxiliary filter modes,
    /// which start from zero variance.
    pub fn unchecked(mean: DVector<f64>, cm: DMatrix<f64>) -> Result<Self> {
        let n = cm.nrows();
        if cm.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: cm.ncols(),
            });
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::DimMismatch {
                expected: n + n % 2,
                found: n,
            });
        }
        if mean.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: mean.len(),
            });
        }
        let asym = (&cm - cm.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self { mean, cm })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * modes),
            cm: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// Product of thermal states with the given mean occupations.
    pub fn thermal(occupations: &[f64]) -> Result<Self> {
        let mut state = Self::vacuum(occupations.len());
        for (k, &n) in occupations.iter().enumerate() {
            let v = 2.0 * non_negative("thermal occupation", n)? + 1.0;
            state.cm[(2 * k, 2 * k)] = v;
            state.cm[(2 * k + 1, 2 * k + 1)] = v;
        }
        Ok(state)
    }

    /// Two-mode squeezed vacuum with the phase of `exp(-ir(a†b† + ab))`.
    pub fn tmsv(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        #[rustfmt::skip]
        let cm = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, 0.0, -s,
            0.0, c, -s, 0.0,
            0.0, -s, c, 0.0,
            -s, 0.0, 0.0, c,
        ]);
        Self {
            mean: DVector::zeros(4),
            cm,
        }
    }

    pub fn modes(&self) -> usize {
        self.cm.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes() {
            Ok(())
        } else {
            Err(Error::ModeIndex {
                index: mode,
                modes: self.modes(),
            })
        }
    }

    /// `⟨a†a⟩` including the coherent part.
    pub fn occupation(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let (x, p) = (2 * mode, 2 * mode + 1);
        let fluct = (self.cm[(x, x)] + self.cm[(p, p)] - 2.0) / 4.0;
        let coherent = (self.mean[x].powi(2) + self.mean[p].powi(2)) / 4.0;
        Ok(fluct + coherent)
    }

    /// Marginal on `modes`, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        for &m in modes {
            self.check_mode(m)?;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(Self {
            mean: DVector::from_fn(idx.len(), |i, _| self.mean[idx[i]]),
            cm: DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cm[(idx[i], idx[j])]),
        })
    }

    /// Rescales the quadratures of `mode` by `factor`.
    pub fn scale_mode(&self, mode: usize, factor: f64) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = self.clone();
        for q in [2 * mode, 2 * mode + 1] {
            out.mean[q] *= factor;
            for j in 0..out.cm.nrows() {
                out.cm[(q, j)] *= factor;
            }
            for i in 0..out.cm.nrows() {
                out.cm[(i, q)] *= factor;
            }
        }
        Ok(out)
    }

    /// Smallest eigenvalue of `V + iΩ`; negative means unphysical.
    pub fn physicality_defect(&self) -> f64 {
        let omega = symplectic_form(self.modes());
        let m = DMatrix::from_fn(self.cm.nrows(), self.cm.ncols(), |i, j| {
            Complex64::new(self.cm[(i, j)], omega[(i, j)])
        });
        hermitian_eigenvalues(&m)[0]
    }

    /// Symplectic eigenvalues, ascending.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_spectrum(&self.cm)
    }

    /// Covariance of the partial transpose on `modes` (p flipped).
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<DMatrix<f64>> {
        for &m in modes {
            self.check_mode(m)?;
        }
        let mut out = self.cm.clone();
        for &m in modes {
            let p = 2 * m + 1;
            for j in 0..out.ncols() {
                out[(p, j)] = -out[(p, j)];
            }
            for i in 0..out.nrows() {
                out[(i, p)] = -out[(i, p)];
            }
        }
        Ok(out)
    }
}

/// Symplectic eigenvalues of a positive-definite covariance matrix: the
/// positive eigenvalues of `V^{1/2} iΩ V^{1/2}`.
pub fn symplectic_spectrum(cm: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = cm.nrows();
    let eig = cm.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min <= 0.0 {
        return Err(Error::NotPositive(min));
    }
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let omega = symplectic_form(n / 2);
    let m = &root * &omega * &root;
    let herm = DMatrix::from_fn(n, n, |i, j| Complex64::new(0.0, m[(i, j)]));
    let spectrum = hermitian_eigenvalues(&herm);
    Ok(spectrum[n / 2..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_pure_and_empty() {
        let v = CovarianceState::vacuum(2);
        assert_eq!(v.occupation(1).unwrap(), 0.0);
        for nu in v.symplectic_eigenvalues().unwrap() {
            assert!((nu - 1.0).abs() < 1e-12);
        }
        assert!(v.physicality_defect().abs() < 1e-12);
    }

    #[test]
    fn thermal_spectrum() {
        let t = CovarianceState::thermal(&[0.5, 2.0]).unwrap();
        assert!((t.occupation(1).unwrap() - 2.0).abs() < 1e-15);
        let nu = t.symplectic_eigenvalues().unwrap();
        assert!((nu[0] - 2.0).abs() < 1e-12 && (nu[1] - 5.0).abs() < 1e-12);
        assert!(CovarianceState::thermal(&[-0.1]).is_err());
    }

    #[test]
    fn tmsv_marginals_and_purity() {
        let r = 0.39f64;
        let s = CovarianceState::tmsv(r);
        assert!((s.occupation(0).unwrap() - r.sinh().powi(2)).abs() < 1e-12);
        for nu in s.symplectic_eigenvalues().unwrap() {
            assert!((nu - 1.0).abs() < 1e-10);
        }
        let pt = s.partial_transpose(&[1]).unwrap();
        let nu = symplectic_spectrum(&pt).unwrap();
        assert!((nu[0] - (-2.0 * r).exp()).abs() < 1e-10);
    }

    #[test]
    fn rejects_squeezing_below_vacuum() {
        let mut cm = DMatrix::identity(2, 2);
        cm[(0, 0)] = 0.5;
        cm[(1, 1)] = 0.5;
        assert!(matches!(
            CovarianceState::new(DVector::zeros(2), cm),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn rejects_asymmetric() {
        let mut cm = DMatrix::identity(2, 2);
        cm[(0, 1)] = 0.1;
        assert!(CovarianceState::new(DVector::zeros(2), cm).is_err());
    }

    #[test]
    fn coherent_part_counts() {
        let s = CovarianceState::new(DVector::from_vec(vec![2.0, 0.0]), DMatrix::identity(2, 2)).unwrap();
        assert!((s.occupation(0).unwrap() - 1.0).abs() < 1e-15);
    }
}
