//! Random states for property tests and Monte Carlo studies.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityOperator, FockBasis, PureState};
use crate::linalg::{self, c, CMatrix, CVector};

fn gaussian(rng: &mut impl Rng) -> num_complex::Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure(photons: usize, rng: &mut impl Rng) -> PureState {
    let d = photons + 1;
    let v = CVector::from_iterator(d, (0..d).map(|_| gaussian(rng)));
    PureState::normalized(photons, v).expect("gaussian vector is nonzero")
}

/// Hilbert-Schmidt random mixed state `G G† / Tr(G G†)`.
pub fn random_density(photons: usize, rng: &mut impl Rng) -> DensityOperator {
    let d = photons + 1;
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    let basis = FockBasis::new(photons).expect("photons >= 1");
    DensityOperator::from_trusted(basis, m / linalg::real(tr))
}

/// Haar-random 2×2 unitary.
pub fn random_mode_unitary(rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(2, 2, |_, _| gaussian(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution is Haar
    let mut u = q.clone();
    for j in 0..2 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for i in 0..2 {
            u[(i, j)] = q[(i, j)] * phase;
        }
    }
    u
}
