//! Single-photon polarization unitaries and their lift to `N` photons.
//!
//! Jones conventions: a half-wave plate with fast axis at θ is
//! `R(θ) diag(1, −1) R(−θ)`, a quarter-wave plate is `R(θ) diag(1, i) R(−θ)`,
//! with `R` the real rotation on `(H, V)`. A Jones matrix `J` maps creation
//! operators as `a_j† → Σ_i J_ij a_i†`, so on one photon the lift is `J`
//! itself. Global phases are kept as written; comparisons against reference
//! states are made up to a global phase.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::FockBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ONE, ZERO};
use crate::poly::{self, FockAmplitudes};

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "angle_deg", rename_all = "lowercase")]
pub enum WaveplateKind {
    Hwp(f64),
    Qwp(f64),
    Generic,
}

/// A 2×2 unitary acting on `(a_H, a_V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    matrix: CMatrix,
    label: WaveplateKind,
}

fn rotated(theta_deg: f64, diag: [num_complex::Complex64; 2]) -> CMatrix {
    let t = theta_deg.to_radians();
    let (s, co) = t.sin_cos();
    let r = CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]);
    let d = CMatrix::from_row_slice(2, 2, &[diag[0], ZERO, ZERO, diag[1]]);
    &r * d * r.transpose()
}

impl ModeUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != 2 || matrix.ncols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: matrix.nrows(),
            });
        }
        let defect = linalg::unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self {
            matrix,
            label: WaveplateKind::Generic,
        })
    }

    pub fn identity() -> Self {
        Self {
            matrix: CMatrix::identity(2, 2),
            label: WaveplateKind::Generic,
        }
    }

    pub fn half_wave(theta_deg: f64) -> Self {
        Self {
            matrix: rotated(theta_deg, [ONE, -ONE]),
            label: WaveplateKind::Hwp(theta_deg),
        }
    }

    pub fn quarter_wave(theta_deg: f64) -> Self {
        Self {
            matrix: rotated(theta_deg, [ONE, linalg::I]),
            label: WaveplateKind::Qwp(theta_deg),
        }
    }

    /// `exp(−iθ σ_n / 2)` for unit `n` in Stokes coordinates.
    pub fn rotation(n: [f64; 3], theta: f64) -> Result<Self> {
        let n = unit_direction(n)?;
        let (s, co) = (theta / 2.0).sin_cos();
        // σ_n = [[n3, n1 − i n2], [n1 + i n2, −n3]]
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(co, -s * n[2]),
                c(-s * n[1], -s * n[0]),
                c(s * n[1], -s * n[0]),
                c(co, s * n[2]),
            ],
        );
        Ok(Self {
            matrix: m,
            label: WaveplateKind::Generic,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> WaveplateKind {
        self.label
    }

    pub fn determinant(&self) -> num_complex::Complex64 {
        self.matrix[(0, 0)] * self.matrix[(1, 1)] - self.matrix[(0, 1)] * self.matrix[(1, 0)]
    }

    /// `self` applied after `first`.
    pub fn then_after(&self, first: &ModeUnitary) -> ModeUnitary {
        ModeUnitary {
            matrix: &self.matrix * &first.matrix,
            label: WaveplateKind::Generic,
        }
    }

    /// Single-photon state reached from `|H⟩`.
    pub fn apply_to_jones(&self, jones: [num_complex::Complex64; 2]) -> [num_complex::Complex64; 2] {
        let v = &self.matrix * CVector::from_vec(jones.to_vec());
        [v[0], v[1]]
    }
}

impl fmt::Display for ModeUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            WaveplateKind::Hwp(a) => write!(f, "HWP({a}°)"),
            WaveplateKind::Qwp(a) => write!(f, "QWP({a}°)"),
            WaveplateKind::Generic => write!(f, "U(2)"),
        }
    }
}

pub fn unit_direction(n: [f64; 3]) -> Result<[f64; 3]> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !(norm > 0.0) || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDirection(norm));
    }
    Ok(n)
}

/// Symmetric-power lift of a mode unitary to the `N`-photon subspace.
pub fn lift_mode_unitary(u: &ModeUnitary, photons: usize) -> Result<CMatrix> {
    let basis = FockBasis::new(photons)?;
    let defect = linalg::unitarity_defect(u.matrix());
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let d = basis.dim();
    let mut lifted = CMatrix::zeros(d, d);
    for (col, (n_h, n_v)) in basis.kets().enumerate() {
        let mut ket = FockAmplitudes::new();
        ket.insert(vec![n_h as u8, n_v as u8], ONE);
        for (occ, amp) in poly::transform(&ket, u.matrix()) {
            let row = basis
                .index_of(usize::from(occ[0]), usize::from(occ[1]))
                .expect("photon number conserved");
            lifted[(row, col)] = amp;
        }
    }
    Ok(lifted)
}

/// `exp(−iθ S_n / 2)` on the `N`-photon subspace.
pub fn su2_rotation(n: [f64; 3], theta: f64, photons: usize) -> Result<CMatrix> {
    let u = ModeUnitary::rotation(n, theta)?;
    lift_mode_unitary(&u, photons)
}

/// Rotation of Stokes vectors induced by [`su2_rotation`]: `⟨S⟩ → R ⟨S⟩`.
pub fn so3_rotation(n: [f64; 3], theta: f64) -> Result<[[f64; 3]; 3]> {
    let n = unit_direction(n)?;
    let (s, co) = theta.sin_cos();
    let t = 1.0 - co;
    let [x, y, z] = n;
    Ok([
        [co + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, co + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, co + z * z * t],
    ])
}
