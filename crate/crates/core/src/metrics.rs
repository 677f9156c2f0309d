//! Fidelities and logarithmic negativity.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{non_negative, unit_interval, Error, Result};
use crate::fock::{FockDensityMatrix, FockKet};
use crate::linalg::{hermitian_eigenvalues, hermitian_function};
use crate::moments::{symplectic_spectrum, CovarianceState, PHYSICALITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FidelityDefinition {
    /// `⟨φ|ρ|φ⟩`.
    PureTargetOverlap,
    /// `(Tr √(√ρ σ √ρ))²`.
    Uhlmann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityValue {
    pub value: f64,
    pub definition: FidelityDefinition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntanglementMethod {
    FockPpt,
    FockSchmidt,
    GaussianSymplectic,
    ClosedForm,
}

impl fmt::Display for EntanglementMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntanglementMethod::FockPpt => "fock_ppt",
            EntanglementMethod::FockSchmidt => "fock_schmidt",
            EntanglementMethod::GaussianSymplectic => "gaussian_symplectic",
            EntanglementMethod::ClosedForm => "closed_form",
        })
    }
}

/// Log negativity in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementValue {
    pub log_negativity: f64,
    pub method: EntanglementMethod,
}

/// `⟨φ|ρ|φ⟩`. For a sub-normalized `ρ` this is the joint probability of the
/// branch and the target.
pub fn fidelity_pure_target(target: &FockKet, rho: &FockDensityMatrix) -> Result<FidelityValue> {
    if target.dims() != rho.dims() {
        return Err(Error::DimMismatch {
            expected: rho.dims().total(),
            found: target.dims().total(),
        });
    }
    let phi = target.amplitudes();
    let value = (phi.adjoint() * rho.matrix() * phi)[(0, 0)].re;
    Ok(FidelityValue {
        value,
        definition: FidelityDefinition::PureTargetOverlap,
    })
}

pub fn uhlmann_fidelity(rho: &FockDensityMatrix, sigma: &FockDensityMatrix) -> Result<FidelityValue> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimMismatch {
            expected: rho.dims().total(),
            found: sigma.dims().total(),
        });
    }
    let root = hermitian_function(rho.matrix(), |x| x.max(0.0).sqrt());
    let mut inner = &root * sigma.matrix() * &root;
    inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let spectrum = hermitian_eigenvalues(&inner);
    // Round-off eigenvalues of a rank-deficient product would otherwise
    // contribute their square roots.
    let floor = spectrum.last().copied().unwrap_or(0.0).abs() * 1e-12;
    let trace: f64 = spectrum
        .into_iter()
        .filter(|&x| x > floor)
        .map(f64::sqrt)
        .sum();
    Ok(FidelityValue {
        value: trace * trace,
        definition: FidelityDefinition::Uhlmann,
    })
}

/// `ln ‖ρ^{T_B}‖₁ / Tr ρ`, clamped at 0. `party_b` lists the modes of the
/// transposed party.
pub fn log_negativity_fock(rho: &FockDensityMatrix, party_b: &[usize]) -> Result<EntanglementValue> {
    let trace = rho.trace();
    if trace <= 0.0 {
        return Err(Error::Trace(trace));
    }
    let pt = rho.partial_transpose_modes(party_b)?;
    let norm: f64 = hermitian_eigenvalues(&pt).iter().map(|x| x.abs()).sum();
    Ok(EntanglementValue {
        log_negativity: (norm / trace).ln().max(0.0),
        method: EntanglementMethod::FockPpt,
    })
}

/// Log negativity of a pure state from its Schmidt coefficients:
/// `2 ln Σσᵢ - ln Σσᵢ²`. The ket need not be normalized.
pub fn log_negativity_pure(ket: &FockKet, party_b: &[usize]) -> Result<EntanglementValue> {
    let m: DMatrix<Complex64> = ket.bipartite_matrix(party_b)?;
    let sv = m.singular_values();
    let (sum, sq) = sv.iter().fold((0.0, 0.0), |(s, q), &x| (s + x, q + x * x));
    if sq <= 0.0 {
        return Err(Error::NotNormalized(0.0));
    }
    Ok(EntanglementValue {
        log_negativity: (2.0 * sum.ln() - sq.ln()).max(0.0),
        method: EntanglementMethod::FockSchmidt,
    })
}

/// `Σ max(0, -ln ν̃)` over the symplectic spectrum of the partial
/// transpose.
pub fn log_negativity_gaussian(
    state: &CovarianceState,
    party_b: &[usize],
) -> Result<EntanglementValue> {
    let defect = state.physicality_defect();
    if defect < -PHYSICALITY_TOL {
        return Err(Error::Unphysical(defect));
    }
    let pt = state.partial_transpose(party_b)?;
    let value = symplectic_spectrum(&pt)?
        .into_iter()
        .map(|nu| (-nu.ln()).max(0.0))
        .sum();
    Ok(EntanglementValue {
        log_negativity: value,
        method: EntanglementMethod::GaussianSymplectic,
    })
}

/// `r′ = artanh(√W tanh r)`.
pub fn effective_squeezing(r: f64, efficiency: f64) -> Result<f64> {
    let r = non_negative("squeezing", r)?;
    let w = unit_interval("conversion efficiency", efficiency)?;
    Ok((w.sqrt() * r.tanh()).atanh())
}

/// `E_N = 2r′` for a pure two-mode squeezed state.
pub fn closed_form_log_negativity(r: f64, efficiency: f64) -> Result<EntanglementValue> {
    Ok(EntanglementValue {
        log_negativity: 2.0 * effective_squeezing(r, efficiency)?,
        method: EntanglementMethod::ClosedForm,
    })
}
