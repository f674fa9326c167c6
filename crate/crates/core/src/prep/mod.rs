//! Linear-optics model of heralded three-photon preparation.
//!
//! Four modes are tracked: spatial modes `a` (herald side) and `b` (output
//! side), each with H and V polarization, in the order `(a_H, a_V, b_H, b_V)`.
//! The down-converted pairs enter in mode `b`. States are stored as sparse
//! Fock-amplitude maps whose squared norm is the probability that every
//! non-unitary element so far (polarizers) let the light through.

mod calibrate;
mod chain;
mod noise;
mod states;

pub use calibrate::{calibrate_phase, coincidence_probability, CalibrationConfig, CalibrationReport};
pub use chain::{run_chain, ChainReport, ChainSpec};
pub use noise::{pair_noise_report, PairNoiseReport, DEFAULT_REPETITION_HZ};
pub use states::{named_pure_state, named_state, NAMED_STATES};

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{lift_mode_unitary, ModeUnitary, PureState};
use crate::linalg::{c, real, CMatrix, CVector, ZERO};
use crate::poly::{self, FockAmplitudes};

pub const A_H: usize = 0;
pub const A_V: usize = 1;
pub const B_H: usize = 2;
pub const B_V: usize = 3;
const MODES: usize = 4;

/// Amplitudes below this squared norm count as an empty branch.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Occupation `(n_aH, n_aV, n_bH, n_bV)`.
pub type Occupation = [u8; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeState {
    photons: usize,
    amplitudes: FockAmplitudes,
}

impl MultimodeState {
    pub fn new(amplitudes: BTreeMap<Occupation, Complex64>) -> Result<Self> {
        let mut photons = None;
        for occ in amplitudes.keys() {
            let total: usize = occ.iter().map(|&n| usize::from(n)).sum();
            match photons {
                None => photons = Some(total),
                Some(p) if p != total => {
                    return Err(Error::InvalidParameter(format!(
                        "occupations mix {p} and {total} photons"
                    )))
                }
                Some(_) => {}
            }
        }
        let photons = photons.ok_or(Error::EmptyData)?;
        let state = Self {
            photons,
            amplitudes: amplitudes.into_iter().map(|(k, v)| (k.to_vec(), v)).collect(),
        };
        let norm = state.norm_sqr();
        if norm > 1.0 + 1e-12 {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        Ok(state)
    }

    /// Two photon pairs from the source: `|2,2⟩` in mode `b`, i.e. `½ b_H†² b_V†² |0⟩`.
    pub fn initial() -> Self {
        Self::fock([0, 0, 2, 2])
    }

    /// A single occupation with unit amplitude.
    pub fn fock(occ: Occupation) -> Self {
        let mut amplitudes = FockAmplitudes::new();
        amplitudes.insert(occ.to_vec(), real(1.0));
        Self {
            photons: occ.iter().map(|&n| usize::from(n)).sum(),
            amplitudes,
        }
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn amplitude(&self, occ: Occupation) -> Complex64 {
        self.amplitudes.get(occ.as_slice()).copied().unwrap_or(ZERO)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (Occupation, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .map(|(k, &v)| ([k[0], k[1], k[2], k[3]], v))
    }

    /// Probability retained so far.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Coefficient of the creation-operator monomial `Π a_i†^{n_i}` for `occ`.
    pub fn monomial_coefficient(&self, occ: Occupation) -> Complex64 {
        poly::fock_to_monomial(&occ, self.amplitude(occ))
    }

    pub fn apply(&self, element: &OpticalElement) -> Result<Self> {
        match element {
            OpticalElement::Lp { angle, mode } => Ok(self.polarizer(*angle, *mode)),
            other => Ok(Self {
                photons: self.photons,
                amplitudes: poly::transform(&self.amplitudes, &other.mode_matrix()?),
            }),
        }
    }

    pub fn apply_all(&self, elements: &[OpticalElement]) -> Result<Self> {
        elements.iter().try_fold(self.clone(), |s, e| s.apply(e))
    }

    /// Keeps only light transmitted by a polarizer at `angle` on `mode`.
    fn polarizer(&self, angle_deg: f64, mode: SpatialMode) -> Self {
        // rotate the pass axis onto H, drop anything in V, rotate back
        let to_h = mode.embed(&rotation(-angle_deg));
        let back = mode.embed(&rotation(angle_deg));
        let (_, v) = mode.indices();
        let mut rotated = poly::transform(&self.amplitudes, &to_h);
        rotated.retain(|occ, _| occ[v] == 0);
        Self {
            photons: self.photons,
            amplitudes: poly::transform(&rotated, &back),
        }
    }

    /// Conditions on exactly one photon in mode `a`, which must be H-polarized.
    pub fn herald(&self) -> Result<HeraldedState> {
        if self.photons < 2 {
            return Err(Error::InvalidParameter(format!(
                "heralding needs at least 2 photons (got {})",
                self.photons
            )));
        }
        let out = self.photons - 1;
        let mut branch = CVector::zeros(out + 1);
        let mut v_herald = 0.0;
        for (occ, amp) in self.amplitudes() {
            if usize::from(occ[A_H]) + usize::from(occ[A_V]) != 1 {
                continue;
            }
            if occ[A_V] == 1 {
                v_herald += amp.norm_sqr();
                continue;
            }
            branch[usize::from(occ[B_V])] += amp;
        }
        if v_herald > PROBABILITY_FLOOR {
            return Err(Error::InvalidElement(format!(
                "herald photon is V-polarized with probability {v_herald:.3e}; \
                 the conditional state would be mixed"
            )));
        }
        let probability = branch.norm_squared();
        if probability < PROBABILITY_FLOOR {
            return Err(Error::ZeroProbability);
        }
        Ok(HeraldedState {
            probability,
            state: PureState::normalized(out, branch)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialMode {
    A,
    #[default]
    B,
}

impl SpatialMode {
    fn indices(self) -> (usize, usize) {
        match self {
            SpatialMode::A => (A_H, A_V),
            SpatialMode::B => (B_H, B_V),
        }
    }

    /// Places a 2×2 polarization map on this spatial mode of the 4-mode space.
    fn embed(self, m: &CMatrix) -> CMatrix {
        let (h, v) = self.indices();
        let mut out = CMatrix::identity(MODES, MODES);
        for (i, &row) in [h, v].iter().enumerate() {
            for (j, &col) in [h, v].iter().enumerate() {
                out[(row, col)] = m[(i, j)];
            }
        }
        out
    }
}

fn rotation(angle_deg: f64) -> CMatrix {
    let (s, co) = angle_deg.to_radians().sin_cos();
    CMatrix::from_row_slice(2, 2, &[real(co), real(-s), real(s), real(co)])
}

/// Elements of the chain. Angles and phases are in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    Hwp {
        angle: f64,
        #[serde(default)]
        mode: SpatialMode,
    },
    Qwp {
        angle: f64,
        #[serde(default)]
        mode: SpatialMode,
    },
    /// Partially polarizing splitter fed from mode `b`: V is always reflected
    /// back into `b`; H is reflected with amplitude `e^{iφ}/√3` and
    /// transmitted into `a` with amplitude `√(2/3)`.
    Ppbs { phi: f64 },
    /// Polarizing splitter exchanging the V components of `a` and `b`.
    PbsMerge,
    /// Linear polarizer; passes photons polarized at `angle`.
    Lp {
        angle: f64,
        #[serde(default)]
        mode: SpatialMode,
    },
}

impl OpticalElement {
    /// Creation-operator map (columns are input modes). Polarizers have none.
    pub fn mode_matrix(&self) -> Result<CMatrix> {
        Ok(match *self {
            OpticalElement::Hwp { angle, mode } => mode.embed(ModeUnitary::half_wave(angle).matrix()),
            OpticalElement::Qwp { angle, mode } => {
                mode.embed(ModeUnitary::quarter_wave(angle).matrix())
            }
            OpticalElement::Ppbs { phi } => {
                let t = (2.0f64 / 3.0).sqrt();
                let r = (1.0f64 / 3.0).sqrt();
                let phase = Complex64::from_polar(1.0, phi.to_radians());
                let mut m = CMatrix::identity(MODES, MODES);
                m[(A_H, B_H)] = real(t);
                m[(B_H, B_H)] = phase * r;
                m[(A_H, A_H)] = real(r);
                m[(B_H, A_H)] = -phase * t;
                m
            }
            OpticalElement::PbsMerge => {
                let mut m = CMatrix::identity(MODES, MODES);
                m[(A_V, A_V)] = ZERO;
                m[(B_V, B_V)] = ZERO;
                m[(B_V, A_V)] = c(1.0, 0.0);
                m[(A_V, B_V)] = c(1.0, 0.0);
                m
            }
            OpticalElement::Lp { .. } => {
                return Err(Error::InvalidElement("a polarizer is not a unitary mode map".into()))
            }
        })
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, OpticalElement::Lp { .. })
    }
}

/// A normalized conditional state in mode `b` and the probability of reaching it.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedState {
    pub probability: f64,
    pub state: PureState,
}

/// PPBS with phase `phi_deg` followed by heralding on one photon in mode `a`.
pub fn ppbs_and_herald(s: &MultimodeState, phi_deg: f64) -> Result<HeraldedState> {
    if s.amplitudes().any(|(occ, _)| occ[A_H] + occ[A_V] != 0) {
        return Err(Error::InvalidParameter(
            "the splitter input must have every photon in mode b".into(),
        ));
    }
    s.apply(&OpticalElement::Ppbs { phi: phi_deg })?.herald()
}

/// Applies QWP1 then HWP2 to the heralded state.
pub fn finish_state(h: &HeraldedState, qwp1_deg: f64, hwp2_deg: f64) -> Result<HeraldedState> {
    let jones = ModeUnitary::half_wave(hwp2_deg).then_after(&ModeUnitary::quarter_wave(qwp1_deg));
    let u = lift_mode_unitary(&jones, h.state.photons())?;
    Ok(HeraldedState {
        probability: h.probability,
        state: h.state.apply(&u)?,
    })
}

/// The settings that turn the 22.5° branch into a NOON state: QWP1 at 45°, HWP2 at φ/4.
pub fn finish_noon(h: &HeraldedState, phi_deg: f64) -> Result<HeraldedState> {
    finish_state(h, 45.0, phi_deg / 4.0)
}

/// Projects every photon onto linear polarization at `angle_deg`.
pub fn post_select_lp(h: &HeraldedState, angle_deg: f64) -> Result<HeraldedState> {
    let n = h.state.photons();
    let axis = ModeUnitary::new(rotation(angle_deg))?;
    let pass = PureState::fock(n, 0)?.apply(&lift_mode_unitary(&axis, n)?)?;
    let amplitude = pass.amplitudes().dotc(h.state.amplitudes());
    let p = amplitude.norm_sqr();
    if p < PROBABILITY_FLOOR {
        return Err(Error::ZeroProbability);
    }
    Ok(HeraldedState {
        probability: h.probability * p,
        state: pass,
    })
}
