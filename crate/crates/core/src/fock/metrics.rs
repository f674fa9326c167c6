use serde::Serialize;

use super::{DensityOperator, HERMITIAN_TOL, PSD_FLOOR, TRACE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Numerical health of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub trace: f64,
    pub trace_imag: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    pub fn check(&self) -> Result<()> {
        if self.hermiticity_defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(self.hermiticity_defect));
        }
        if (self.trace - 1.0).abs() > TRACE_TOL || self.trace_imag.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(self.trace));
        }
        if self.min_eigenvalue < PSD_FLOOR {
            return Err(Error::NotPositive(self.min_eigenvalue));
        }
        Ok(())
    }
}

pub fn validate(matrix: &CMatrix) -> Diagnostics {
    let tr = linalg::trace(matrix);
    let (values, _) = linalg::hermitian_eigen(matrix);
    let purity = (matrix * matrix).diagonal().iter().map(|z| z.re).sum();
    Diagnostics {
        hermiticity_defect: linalg::hermiticity_defect(matrix),
        trace: tr.re,
        trace_imag: tr.im,
        min_eigenvalue: values.first().copied().unwrap_or(0.0),
        purity,
    }
}

/// `Tr(A ρ)` for Hermitian `A`.
pub fn expectation(observable: &CMatrix, rho: &DensityOperator) -> Result<f64> {
    if observable.nrows() != rho.dim() || observable.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: observable.nrows(),
        });
    }
    let defect = linalg::hermiticity_defect(observable);
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let value = linalg::trace(&(observable * rho.matrix()));
    Ok(value.re)
}

pub fn purity(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues below this are treated as roundoff in [`fidelity`].
const SPECTRAL_FLOOR: f64 = 1e-14;

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    // restrict to the support of ρ so roundoff in its null space does not
    // surface as spurious √ε contributions
    let (lambda, vectors) = linalg::hermitian_eigen(rho.matrix());
    let support: Vec<usize> = (0..lambda.len()).filter(|&k| lambda[k] > SPECTRAL_FLOOR).collect();
    let k = support.len();
    let half = CMatrix::from_fn(rho.dim(), k, |i, j| {
        vectors[(i, support[j])] * lambda[support[j]].sqrt()
    });
    let inner = half.adjoint() * sigma.matrix() * &half;
    let (values, _) = linalg::hermitian_eigen(&inner);
    let trace: f64 = values
        .iter()
        .filter(|&&v| v > SPECTRAL_FLOOR)
        .map(|v| v.sqrt())
        .sum();
    Ok((trace * trace).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{stokes_operators, PureState};
    use crate::fock::random::{random_density, random_pure};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fidelity_examples() {
        let h3 = PureState::fock(3, 0).unwrap().density();
        let v3 = PureState::fock(0, 3).unwrap().density();
        let mixed = DensityOperator::maximally_mixed(3).unwrap();
        assert_abs_diff_eq!(fidelity(&h3, &h3).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&h3, &v3).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&mixed, &h3).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_matches_pure_overlap_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let psi = random_pure(3, &mut rng);
            let sigma = random_density(3, &mut rng);
            // oracle for pure ρ: F = ⟨ψ|σ|ψ⟩
            let direct = (psi.amplitudes().adjoint() * sigma.matrix() * psi.amplitudes())[(0, 0)].re;
            let f = fidelity(&psi.density(), &sigma).unwrap();
            assert_abs_diff_eq!(f, direct, epsilon = 1e-9);
            let rho = random_density(3, &mut rng);
            let ab = fidelity(&rho, &sigma).unwrap();
            let ba = fidelity(&sigma, &rho).unwrap();
            assert_abs_diff_eq!(ab, ba, epsilon = 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(2).unwrap();
        let b = DensityOperator::maximally_mixed(3).unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn expectation_and_purity() {
        let s = stokes_operators(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(3, &mut rng);
        assert_abs_diff_eq!(expectation(&s.s0, &rho).unwrap(), 3.0, epsilon = 1e-12);
        let mixed = DensityOperator::maximally_mixed(3).unwrap();
        assert_abs_diff_eq!(purity(&mixed), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(purity(&random_pure(3, &mut rng).density()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_observable_flagged() {
        let rho = DensityOperator::maximally_mixed(1).unwrap();
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[linalg::ZERO, linalg::ONE, linalg::ZERO, linalg::ZERO],
        );
        assert!(matches!(expectation(&a, &rho), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn diagnostics_of_valid_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density(3, &mut rng);
        let d = validate(rho.matrix());
        assert!(d.is_valid());
        assert!(d.purity >= 0.25 - 1e-12 && d.purity <= 1.0 + 1e-12);
    }
}
