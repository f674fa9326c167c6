use super::FockBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I};

/// The four Stokes operators restricted to the `N`-photon subspace.
///
/// `S1 = a_H a_V† + a_H† a_V`, `S2 = i(a_H a_V† − a_H† a_V)`,
/// `S3 = a_H† a_H − a_V† a_V`; `S0` is the total number operator.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesSet {
    pub photons: usize,
    pub s0: CMatrix,
    pub s1: CMatrix,
    pub s2: CMatrix,
    pub s3: CMatrix,
}

impl StokesSet {
    /// `(S1, S2, S3)`.
    pub fn vector(&self) -> [&CMatrix; 3] {
        [&self.s1, &self.s2, &self.s3]
    }

    /// `S_n = n · (S1, S2, S3)`.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        &self.s1 * linalg::real(n[0]) + &self.s2 * linalg::real(n[1]) + &self.s3 * linalg::real(n[2])
    }

    pub fn dim(&self) -> usize {
        self.photons + 1
    }
}

/// Levi-Civita symbol over indices `0..3`.
pub fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn stokes_operators(photons: usize) -> Result<StokesSet> {
    if photons == 0 {
        return Err(Error::ZeroPhotons(0));
    }
    let basis = FockBasis::new(photons)?;
    let d = basis.dim();
    // raise = a_H† a_V moves |n_H, n_V⟩ (index k) to |n_H+1, n_V−1⟩ (index k−1)
    let mut raise = CMatrix::zeros(d, d);
    for k in 1..d {
        let (n_h, n_v) = basis.ket(k);
        raise[(k - 1, k)] = linalg::real((((n_h + 1) * n_v) as f64).sqrt());
    }
    let lower = raise.adjoint();
    let s1 = &raise + &lower;
    let s2 = (&lower - &raise) * I;
    let s3 = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let (n_h, n_v) = basis.ket(i);
            linalg::real(n_h as f64 - n_v as f64)
        } else {
            linalg::ZERO
        }
    });
    let s0 = CMatrix::identity(d, d) * linalg::real(photons as f64);
    Ok(StokesSet {
        photons,
        s0,
        s1,
        s2,
        s3,
    })
}
