//! Two-mode Fock space at fixed total photon number.
//!
//! Kets are ordered by descending horizontal occupation:
//! index `k` holds `|N-k, k⟩` (that is `n_H = N-k`, `n_V = k`). Every matrix
//! and every serialised state in this crate uses that order.

mod json;
mod metrics;
pub mod random;
mod stokes;
mod unitary;

pub use json::StateFile;
pub use metrics::{expectation, fidelity, purity, validate, Diagnostics};
pub use stokes::{levi_civita, stokes_operators, StokesSet};
pub use unitary::{
    lift_mode_unitary, so3_rotation, su2_rotation, unit_direction, ModeUnitary, WaveplateKind,
};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-12;
pub const PSD_FLOOR: f64 = -1e-10;

/// Basis of the symmetric two-mode subspace with `photons` quanta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    photons: usize,
}

impl FockBasis {
    pub fn new(photons: usize) -> Result<Self> {
        if photons == 0 {
            return Err(Error::ZeroPhotons(photons));
        }
        Ok(Self { photons })
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn dim(&self) -> usize {
        self.photons + 1
    }

    /// `(n_H, n_V)` of the ket at `index`.
    pub fn ket(&self, index: usize) -> (usize, usize) {
        assert!(index <= self.photons, "basis index out of range");
        (self.photons - index, index)
    }

    pub fn index_of(&self, n_h: usize, n_v: usize) -> Option<usize> {
        (n_h + n_v == self.photons).then_some(n_v)
    }

    pub fn kets(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).map(|k| self.ket(k))
    }
}

/// Normalised pure state over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: FockBasis,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(photons: usize, amplitudes: CVector) -> Result<Self> {
        let basis = FockBasis::new(photons)?;
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Normalises `amplitudes` before constructing the state.
    pub fn normalized(photons: usize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(photons, amplitudes / linalg::real(norm))
    }

    /// The Fock ket `|n_h, n_v⟩`.
    pub fn fock(n_h: usize, n_v: usize) -> Result<Self> {
        let basis = FockBasis::new(n_h + n_v)?;
        let mut amplitudes = CVector::zeros(basis.dim());
        amplitudes[n_v] = ONE;
        Ok(Self { basis, amplitudes })
    }

    pub fn photons(&self) -> usize {
        self.basis.photons
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn apply(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.basis.dim() || unitary.ncols() != self.basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim(),
                got: unitary.nrows(),
            });
        }
        Self::normalized(self.photons(), unitary * &self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            basis: self.basis,
            matrix: linalg::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    basis: FockBasis,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates `matrix` against the density-operator invariants.
    pub fn new(photons: usize, matrix: CMatrix) -> Result<Self> {
        let basis = FockBasis::new(photons)?;
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: matrix.nrows(),
            });
        }
        let diag = validate(&matrix);
        diag.check()?;
        Ok(Self { basis, matrix })
    }

    /// For matrices that are valid by construction (convex sums, `RρR` iterates).
    /// Hermiticity is restored exactly; nothing else is checked.
    pub(crate) fn from_trusted(basis: FockBasis, matrix: CMatrix) -> Self {
        let matrix = (&matrix + matrix.adjoint()).map(|z| z * 0.5);
        Self { basis, matrix }
    }

    pub fn maximally_mixed(photons: usize) -> Result<Self> {
        let basis = FockBasis::new(photons)?;
        let d = basis.dim();
        Ok(Self {
            basis,
            matrix: CMatrix::identity(d, d) / linalg::real(d as f64),
        })
    }

    /// Diagonal mixture of Fock kets; `weights[k]` multiplies `|N-k,k⟩⟨N-k,k|`.
    pub fn diagonal(photons: usize, weights: &[f64]) -> Result<Self> {
        let basis = FockBasis::new(photons)?;
        if weights.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: weights.len(),
            });
        }
        let matrix = CMatrix::from_diagonal(&CVector::from_iterator(
            weights.len(),
            weights.iter().map(|&w| linalg::real(w)),
        ));
        Self::new(photons, matrix)
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyData)?.1;
        let dim = first.dim();
        let mut matrix = CMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative mixture weight {w}")));
            }
            total += w;
            matrix += &rho.matrix * linalg::real(*w);
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(total));
        }
        Ok(Self::from_trusted(first.basis, matrix))
    }

    pub fn photons(&self) -> usize {
        self.basis.photons
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: unitary.nrows(),
            });
        }
        Ok(Self::from_trusted(
            self.basis,
            unitary * &self.matrix * unitary.adjoint(),
        ))
    }

    /// Population of each basis ket, in basis order.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Whether this state is within `tol` (Frobenius) of `other`.
    pub fn approx_eq(&self, other: &DensityOperator, tol: f64) -> bool {
        self.dim() == other.dim() && (&self.matrix - &other.matrix).norm() <= tol
    }
}
