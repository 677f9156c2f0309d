//! Truncated multi-mode Fock-space states and operations on them.

mod dims;
mod exponential;

pub use dims::ModeDims;
pub use exponential::Generator;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use exponential::{apply_single_mode_columns, apply_two_mode_columns, local_support, TwoModeOp};

/// Default budget for trace lost through the truncation boundary.
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

const KET_NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Lowering operator truncated to `dim` levels.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            zero()
        }
    })
}

/// `exp(iφ n̂)` truncated to `dim` levels.
pub fn phase_rotation(dim: usize, phi: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, phi * i as f64)
        } else {
            zero()
        }
    })
}

/// Pure state in a truncated multi-mode Fock space.
///
/// Constructors require unit norm; projections and leaky exponentials may
/// return sub-normalized kets whose squared norm is the retained weight.
#[derive(Debug, Clone, PartialEq)]
pub struct FockKet {
    dims: ModeDims,
    amplitudes: DVector<Complex64>,
}

impl FockKet {
    pub fn new(dims: ModeDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        let ket = Self::raw(dims, amplitudes)?;
        let norm = ket.norm_sqr().sqrt();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(ket)
    }

    /// Scales `amplitudes` to unit norm.
    pub fn normalized(dims: ModeDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::raw(dims, amplitudes)?.renormalized()
    }

    fn raw(dims: ModeDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimMismatch {
                expected: dims.total(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            dims,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn number(dims: ModeDims, occupations: &[usize]) -> Result<Self> {
        let idx = dims.index(occupations)?;
        let mut amps = vec![zero(); dims.total()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            dims,
            amplitudes: DVector::from_vec(amps),
        })
    }

    pub fn vacuum(dims: ModeDims) -> Self {
        let n = dims.modes();
        Self::number(dims, &vec![0; n]).expect("vacuum always fits")
    }

    pub fn dims(&self) -> &ModeDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.dims.index(occupations)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn renormalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        self.amplitudes /= Complex64::new(norm, 0.0);
        Ok(self)
    }

    pub fn tensor(&self, other: &FockKet) -> FockKet {
        FockKet {
            dims: self.dims.concat(&other.dims),
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn inner(&self, other: &FockKet) -> Result<Complex64> {
        self.same_dims(other.dims())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    fn same_dims(&self, dims: &ModeDims) -> Result<()> {
        if &self.dims != dims {
            return Err(Error::DimMismatch {
                expected: self.dims.total(),
                found: dims.total(),
            });
        }
        Ok(())
    }

    /// Applies a two-mode exponential; returns the new ket and the weight
    /// that left the truncation.
    pub fn apply_two_mode_exponential(
        &self,
        mode_a: usize,
        mode_b: usize,
        generator: Generator,
        angle: f64,
        leak_tol: f64,
    ) -> Result<(FockKet, f64)> {
        self.dims.check_distinct(mode_a, mode_b)?;
        finite_angle(angle)?;
        let src = self.amplitudes.as_slice();
        let support = local_support(&self.dims, mode_a, mode_b, src, 1);
        let op = TwoModeOp::build(
            generator,
            angle,
            self.dims.dim(mode_a),
            self.dims.dim(mode_b),
            &support,
        );
        let out = apply_two_mode_columns(&op, &self.dims, mode_a, mode_b, src, 1);
        let next = FockKet {
            dims: self.dims.clone(),
            amplitudes: DVector::from_vec(out),
        };
        let leak = (self.norm_sqr() - next.norm_sqr()).max(0.0);
        check_leak(leak, leak_tol)?;
        Ok((next, leak))
    }

    /// Applies a single-mode operator (not necessarily unitary).
    pub fn apply_local(&self, mode: usize, op: &DMatrix<Complex64>) -> Result<FockKet> {
        self.dims.check_mode(mode)?;
        check_local_shape(&self.dims, mode, op)?;
        let out = apply_single_mode_columns(op, &self.dims, mode, self.amplitudes.as_slice(), 1);
        Ok(FockKet {
            dims: self.dims.clone(),
            amplitudes: DVector::from_vec(out),
        })
    }

    /// `⟨n|_mode ψ⟩` with that mode removed. The squared norm of the result is
    /// the probability of finding `n` quanta in `mode`.
    pub fn project(&self, mode: usize, n: usize) -> Result<FockKet> {
        self.dims.check_mode(mode)?;
        let d = self.dims.dim(mode);
        if n >= d {
            return Err(Error::Occupation {
                mode,
                occupation: n,
                dim: d,
            });
        }
        let reduced = self.dims.without(&[mode]).ok_or(Error::NoModes)?;
        let shift = n * self.dims.stride(mode);
        let amps = self
            .dims
            .bases_without(&[mode])
            .into_iter()
            .map(|b| self.amplitudes[b + shift])
            .collect();
        Ok(FockKet {
            dims: reduced,
            amplitudes: DVector::from_vec(amps),
        })
    }

    /// Amplitudes arranged as a matrix with rows over the modes *not* in
    /// `modes` and columns over `modes`.
    pub(crate) fn bipartite_matrix(&self, modes: &[usize]) -> Result<DMatrix<Complex64>> {
        for &m in modes {
            self.dims.check_mode(m)?;
        }
        let rest = self.dims.without(modes).ok_or(Error::NoModes)?;
        let complement: Vec<usize> = (0..self.dims.modes())
            .filter(|m| !modes.contains(m))
            .collect();
        let row_bases = self.dims.bases_without(modes);
        let col_bases = self.dims.bases_without(&complement);
        debug_assert_eq!(row_bases.len(), rest.total());
        Ok(DMatrix::from_fn(row_bases.len(), col_bases.len(), |i, j| {
            self.amplitudes[row_bases[i] + col_bases[j]]
        }))
    }

    /// Reduced density matrix on the modes that are not traced out.
    pub fn partial_trace(&self, modes: &[usize]) -> Result<FockDensityMatrix> {
        let m = self.bipartite_matrix(modes)?;
        let dims = self.dims.without(modes).ok_or(Error::NoModes)?;
        Ok(FockDensityMatrix {
            dims,
            matrix: &m * m.adjoint(),
        })
    }

    pub fn to_density(&self) -> FockDensityMatrix {
        FockDensityMatrix {
            dims: self.dims.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Density operator on a truncated multi-mode Fock space.
///
/// Always Hermitian with trace in `[0, 1]`. A trace below one marks either
/// truncation leak or a conditional (projected) branch whose trace is its
/// probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dims: ModeDims,
    matrix: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    pub fn vacuum(dims: ModeDims) -> Self {
        FockKet::vacuum(dims).to_density()
    }

    pub fn from_ket(ket: &FockKet) -> Self {
        ket.to_density()
    }

    /// Validates shape, Hermiticity and trace range. Positivity is checked
    /// separately by [`Self::check_positive`] since it needs a spectrum.
    pub fn from_matrix(dims: ModeDims, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let rho = Self { dims, matrix };
        let tr = rho.trace();
        if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&tr) {
            return Err(Error::Trace(tr));
        }
        Ok(rho)
    }

    /// Thermal state of a single mode with mean occupation `nbar`,
    /// renormalized inside the truncation.
    pub fn thermal(dim: usize, nbar: f64) -> Result<Self> {
        crate::error::non_negative("thermal occupation", nbar)?;
        let dims = ModeDims::new(vec![dim])?;
        let ratio = if nbar == 0.0 { 0.0 } else { nbar / (1.0 + nbar) };
        let weights: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
        let total: f64 = weights.iter().sum();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(weights[i] / total, 0.0)
            } else {
                zero()
            }
        });
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &ModeDims {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn element(&self, row: &[usize], col: &[usize]) -> Result<Complex64> {
        Ok(self.matrix[(self.dims.index(row)?, self.dims.index(col)?)])
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn check_positive(&self, tol: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol {
            Err(Error::NotPositive(min))
        } else {
            Ok(())
        }
    }

    /// Scaled to unit trace; errors on a zero-trace branch.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::Trace(tr));
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix / Complex64::new(tr, 0.0),
        })
    }

    pub fn tensor(&self, other: &FockDensityMatrix) -> FockDensityMatrix {
        FockDensityMatrix {
            dims: self.dims.concat(&other.dims),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Diagonal of the reduced state of `mode`.
    pub fn populations(&self, mode: usize) -> Result<Vec<f64>> {
        self.dims.check_mode(mode)?;
        let mut pops = vec![0.0; self.dims.dim(mode)];
        for i in 0..self.dims.total() {
            pops[self.dims.digit(i, mode)] += self.matrix[(i, i)].re;
        }
        Ok(pops)
    }

    pub fn partial_trace(&self, mode: usize) -> Result<FockDensityMatrix> {
        self.dims.check_mode(mode)?;
        let reduced = self.dims.without(&[mode]).ok_or(Error::NoModes)?;
        let bases = self.dims.bases_without(&[mode]);
        let stride = self.dims.stride(mode);
        let d = self.dims.dim(mode);
        let n = bases.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            (0..d)
                .map(|k| self.matrix[(bases[i] + k * stride, bases[j] + k * stride)])
                .sum()
        });
        Ok(FockDensityMatrix {
            dims: reduced,
            matrix,
        })
    }

    /// Traces out several modes; indices refer to the original ordering.
    pub fn partial_trace_modes(&self, modes: &[usize]) -> Result<FockDensityMatrix> {
        let mut sorted = modes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut rho = self.clone();
        for &m in sorted.iter().rev() {
            rho = rho.partial_trace(m)?;
        }
        Ok(rho)
    }

    /// `⟨n|_mode ρ |n⟩_mode` with that mode removed; trace is the
    /// probability of the outcome.
    pub fn project(&self, mode: usize, n: usize) -> Result<FockDensityMatrix> {
        self.dims.check_mode(mode)?;
        let d = self.dims.dim(mode);
        if n >= d {
            return Err(Error::Occupation {
                mode,
                occupation: n,
                dim: d,
            });
        }
        let reduced = self.dims.without(&[mode]).ok_or(Error::NoModes)?;
        let shift = n * self.dims.stride(mode);
        let bases = self.dims.bases_without(&[mode]);
        let k = bases.len();
        let matrix = DMatrix::from_fn(k, k, |i, j| self.matrix[(bases[i] + shift, bases[j] + shift)]);
        Ok(FockDensityMatrix {
            dims: reduced,
            matrix,
        })
    }

    pub fn partial_transpose(&self, mode: usize) -> Result<DMatrix<Complex64>> {
        self.partial_transpose_modes(&[mode])
    }

    /// Transposes the subsystem made of `modes`.
    pub fn partial_transpose_modes(&self, modes: &[usize]) -> Result<DMatrix<Complex64>> {
        if self.dims.modes() < 2 {
            return Err(Error::ModeIndex {
                index: modes.first().copied().unwrap_or(0),
                modes: self.dims.modes(),
            });
        }
        for &m in modes {
            self.dims.check_mode(m)?;
        }
        let n = self.dims.total();
        let part: Vec<usize> = (0..n)
            .map(|i| {
                modes
                    .iter()
                    .map(|&m| self.dims.digit(i, m) * self.dims.stride(m))
                    .sum()
            })
            .collect();
        let mut out = DMatrix::zeros(n, n);
        for c in 0..n {
            for r in 0..n {
                let z = self.matrix[(r, c)];
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                out[(r - part[r] + part[c], c - part[c] + part[r])] = z;
            }
        }
        Ok(out)
    }

    /// `U ρ U†` for a two-mode exponential. Returns the state and the trace
    /// that left the truncation.
    pub fn apply_two_mode_exponential(
        &self,
        mode_a: usize,
        mode_b: usize,
        generator: Generator,
        angle: f64,
        leak_tol: f64,
    ) -> Result<(FockDensityMatrix, f64)> {
        self.dims.check_distinct(mode_a, mode_b)?;
        finite_angle(angle)?;
        let n = self.dims.total();
        let support = local_support(&self.dims, mode_a, mode_b, self.matrix.as_slice(), n);
        let op = TwoModeOp::build(
            generator,
            angle,
            self.dims.dim(mode_a),
            self.dims.dim(mode_b),
            &support,
        );
        let left = |m: &DMatrix<Complex64>| {
            DMatrix::from_vec(
                n,
                n,
                apply_two_mode_columns(&op, &self.dims, mode_a, mode_b, m.as_slice(), n),
            )
        };
        let half = left(&self.matrix);
        let matrix = left(&half.adjoint()).adjoint();
        let next = FockDensityMatrix {
            dims: self.dims.clone(),
            matrix,
        };
        let leak = (self.trace() - next.trace()).max(0.0);
        check_leak(leak, leak_tol)?;
        Ok((next, leak))
    }

    /// `A ρ A†` for a single-mode operator `A`.
    pub fn apply_local(&self, mode: usize, op: &DMatrix<Complex64>) -> Result<FockDensityMatrix> {
        self.dims.check_mode(mode)?;
        check_local_shape(&self.dims, mode, op)?;
        let n = self.dims.total();
        let left = |m: &DMatrix<Complex64>| {
            DMatrix::from_vec(
                n,
                n,
                apply_single_mode_columns(op, &self.dims, mode, m.as_slice(), n),
            )
        };
        let half = left(&self.matrix);
        Ok(FockDensityMatrix {
            dims: self.dims.clone(),
            matrix: left(&half.adjoint()).adjoint(),
        })
    }

    /// `Σ_k A_k ρ A_k†` on one mode.
    pub fn apply_kraus(&self, mode: usize, ops: &[DMatrix<Complex64>]) -> Result<FockDensityMatrix> {
        let n = self.dims.total();
        let mut acc = DMatrix::zeros(n, n);
        for op in ops {
            acc += self.apply_local(mode, op)?.matrix;
        }
        Ok(FockDensityMatrix {
            dims: self.dims.clone(),
            matrix: acc,
        })
    }
}

fn finite_angle(angle: f64) -> Result<()> {
    if angle.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: "angle",
            value: angle,
            reason: "must be finite",
        })
    }
}

fn check_leak(leak: f64, budget: f64) -> Result<()> {
    if leak > budget {
        Err(Error::LeakBudget { leak, budget })
    } else {
        Ok(())
    }
}

fn check_local_shape(dims: &ModeDims, mode: usize, op: &DMatrix<Complex64>) -> Result<()> {
    let d = dims.dim(mode);
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            found: op.nrows(),
        });
    }
    Ok(())
}
