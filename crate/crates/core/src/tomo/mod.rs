//! Polarization tomography of `N`-photon states.
//!
//! A setting is a QWP followed by a HWP in front of a polarizing splitter;
//! photon-number-resolved detection behind the splitter sorts each event
//! into one of the `N + 1` outcomes `|N−k, k⟩`. Every outcome projector is
//! `U† |k⟩⟨k| U` with `U` the lifted waveplate pair, so a setting realizes a
//! collective projection along one Poincaré direction.

mod mle;
mod simulate;

pub use mle::{evaluate, mle_from_counts, mle_reconstruct, Evaluation, MleConfig, ReconstructionResult};
pub use simulate::{outcome_label, simulate_counts, CountRecord, SimulationConfig};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{lift_mode_unitary, DensityOperator, ModeUnitary};
use crate::linalg::{CMatrix, CVector};

const DIRECTION_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

/// Waveplate angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub qwp2: f64,
    pub hwp3: f64,
}

impl MeasurementSetting {
    pub fn new(qwp2: f64, hwp3: f64) -> Result<Self> {
        if !qwp2.is_finite() || !hwp3.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "waveplate angles must be finite (got {qwp2}, {hwp3})"
            )));
        }
        Ok(Self { qwp2, hwp3 })
    }

    /// Single-photon map in front of the splitter: QWP first, then HWP.
    pub fn jones(&self) -> ModeUnitary {
        ModeUnitary::half_wave(self.hwp3).then_after(&ModeUnitary::quarter_wave(self.qwp2))
    }

    /// Poincaré direction of the polarization sent to the H port.
    pub fn direction(&self) -> [f64; 3] {
        let u = self.jones();
        // ψ = U† |H⟩
        let m = u.matrix();
        let (h, v) = (m[(0, 0)].conj(), m[(0, 1)].conj());
        let cross = h.conj() * v;
        [2.0 * cross.re, 2.0 * cross.im, h.norm_sqr() - v.norm_sqr()]
    }

    /// Waveplate angles whose H port projects along unit `n`.
    pub fn toward(n: [f64; 3]) -> Result<Self> {
        let n = crate::fock::unit_direction(n)?;
        let two_q = n[0].atan2(n[2]);
        let ring = n[0].hypot(n[2]);
        for sign in [1.0, -1.0] {
            let delta = (sign * n[1]).atan2(ring);
            let setting = Self::new(
                two_q.to_degrees() / 2.0,
                (delta + two_q).to_degrees() / 4.0,
            )?;
            let d = setting.direction();
            if (0..3).all(|i| (d[i] - n[i]).abs() < DIRECTION_TOL) {
                return Ok(setting);
            }
        }
        Err(Error::InvalidDirection(n.iter().map(|x| x * x).sum::<f64>().sqrt()))
    }

    /// Lifted unitary on the `photons`-photon space.
    pub fn unitary(&self, photons: usize) -> Result<CMatrix> {
        lift_mode_unitary(&self.jones(), photons)
    }

    /// Outcome vectors `U† |k⟩`; outcome `k` is `|N−k, k⟩`.
    pub(crate) fn outcome_vectors(&self, photons: usize) -> Result<Vec<CVector>> {
        let u = self.unitary(photons)?;
        Ok((0..=photons)
            .map(|k| u.row(k).adjoint())
            .collect())
    }
}

/// Six axis directions, four tetrahedron vertices and six edge midpoints.
pub fn default_directions() -> Vec<[f64; 3]> {
    let t = 1.0 / 3f64.sqrt();
    let e = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [t, t, t],
        [t, -t, -t],
        [-t, t, -t],
        [-t, -t, t],
        [e, e, 0.0],
        [e, 0.0, e],
        [0.0, e, e],
        [e, -e, 0.0],
        [e, 0.0, -e],
        [0.0, e, -e],
    ]
}

/// The sixteen settings; the first is the bare H/V measurement.
pub fn default_settings() -> Vec<MeasurementSetting> {
    default_directions()
        .into_iter()
        .map(|n| MeasurementSetting::toward(n).expect("fixed directions are unit vectors"))
        .collect()
}

/// Outcome probabilities `⟨k|U ρ U†|k⟩`.
pub fn born_probabilities(rho: &DensityOperator, setting: &MeasurementSetting) -> Result<Vec<f64>> {
    let rotated = rho.conjugate(&setting.unitary(rho.photons())?)?;
    Ok(rotated.populations().into_iter().map(|p| p.max(0.0)).collect())
}

/// Rank of the linear map from Hermitian operators to outcome probabilities.
/// Equals `(N+1)²` exactly when the settings are informationally complete.
pub fn design_rank(settings: &[MeasurementSetting], photons: usize) -> Result<usize> {
    let d = photons + 1;
    let mut rows = Vec::new();
    for s in settings {
        for v in s.outcome_vectors(photons)? {
            // Tr(Π X) for a real parametrisation of Hermitian X
            let pi = &v * v.adjoint();
            let mut row = Vec::with_capacity(d * d);
            for i in 0..d {
                row.push(pi[(i, i)].re);
                for j in (i + 1)..d {
                    row.push(2.0 * pi[(i, j)].re);
                    row.push(2.0 * pi[(i, j)].im);
                }
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(0);
    }
    let m = DMatrix::from_fn(rows.len(), d * d, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > RANK_TOL * top.max(1.0)).count())
}

pub fn is_informationally_complete(settings: &[MeasurementSetting], photons: usize) -> Result<bool> {
    let d = photons + 1;
    Ok(design_rank(settings, photons)? == d * d)
}
