//! Recovering the splitter phase from a coincidence scan over HWP2.
//!
//! One pair `|1,1⟩` passes HWP1 at 15°, the splitter, QWP1 at 45° and HWP2 at
//! θ, and the output photon is projected on `(H − V)/√2`. The heralded
//! coincidence probability is proportional to `sin²((φ − 4θ)/2)`, so the
//! scan is fitted with `c0 + c1 cos 4θ + c2 sin 4θ` and the phase read off
//! the fitted harmonic.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use super::{MultimodeState, OpticalElement};
use crate::error::{Error, Result};

/// Heralded coincidence probability at splitter phase `phi_deg` and HWP2 angle `theta_deg`.
pub fn coincidence_probability(phi_deg: f64, theta_deg: f64) -> Result<f64> {
    let chain = [
        OpticalElement::Hwp { angle: 15.0, mode: Default::default() },
        OpticalElement::Ppbs { phi: phi_deg },
        OpticalElement::Qwp { angle: 45.0, mode: Default::default() },
        OpticalElement::Hwp { angle: theta_deg, mode: Default::default() },
        OpticalElement::Lp { angle: -45.0, mode: Default::default() },
    ];
    let out = MultimodeState::fock([0, 0, 1, 1]).apply_all(&chain)?;
    match out.herald() {
        Ok(h) => Ok(h.probability),
        Err(Error::ZeroProbability) => Ok(0.0),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    /// HWP2 angles in degrees.
    pub theta_grid: Vec<f64>,
    /// Expected counts at the brightest grid point; `None` for noiseless curves.
    pub peak_counts: Option<f64>,
    pub seed: u64,
}

impl CalibrationConfig {
    /// HWP2 scan over `[−45°, 45°]`, which covers every phase once.
    pub fn uniform(step_deg: f64, peak_counts: Option<f64>, seed: u64) -> Result<Self> {
        if !(step_deg > 0.0) || step_deg > 90.0 {
            return Err(Error::InvalidGrid(format!("scan step must be in (0, 90] (got {step_deg})")));
        }
        let n = (90.0 / step_deg).floor() as usize;
        Ok(Self {
            theta_grid: (0..=n).map(|i| -45.0 + i as f64 * step_deg).collect(),
            peak_counts,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    /// Estimated phase in degrees, wrapped to `(−180, 180]`.
    pub phi_hat: f64,
    /// HWP2 angle that nulls the coincidences, `phi_hat / 4`.
    pub theta_null: f64,
    /// `"fit"` or `"argmin"` (fewer than three distinct harmonics in the grid).
    pub method: &'static str,
    pub theta_grid: Vec<f64>,
    pub expected: Vec<f64>,
    pub counts: Vec<f64>,
}

fn wrap_degrees(x: f64) -> f64 {
    let w = (x + 180.0).rem_euclid(360.0) - 180.0;
    if w <= -180.0 {
        w + 360.0
    } else {
        w
    }
}

pub fn calibrate_phase(true_phi_deg: f64, config: &CalibrationConfig) -> Result<CalibrationReport> {
    let grid = &config.theta_grid;
    if grid.is_empty() {
        return Err(Error::InvalidGrid("calibration grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("calibration angles must be finite".into()));
    }
    let probs = grid
        .iter()
        .map(|&t| coincidence_probability(true_phi_deg, t))
        .collect::<Result<Vec<_>>>()?;
    let (expected, counts) = match config.peak_counts {
        None => (probs.clone(), probs),
        Some(peak) => {
            if !(peak > 0.0) {
                return Err(Error::InvalidParameter(format!("peak counts must be positive (got {peak})")));
            }
            let top = probs.iter().cloned().fold(0.0, f64::max);
            if top <= 0.0 {
                return Err(Error::ZeroProbability);
            }
            let expected: Vec<f64> = probs.iter().map(|p| peak * p / top).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let counts = expected
                .iter()
                .map(|&lambda| {
                    if lambda <= 0.0 {
                        return Ok(0.0);
                    }
                    Poisson::new(lambda)
                        .map(|d| d.sample(&mut rng))
                        .map_err(|e| Error::InvalidParameter(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            (expected, counts)
        }
    };

    let (phi_hat, method) = match harmonic_fit(grid, &counts) {
        Some(phi) => (phi, "fit"),
        None => {
            let (imin, _) = counts
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("grid is non-empty");
            (wrap_degrees(4.0 * grid[imin]), "argmin")
        }
    };
    Ok(CalibrationReport {
        phi_hat,
        theta_null: phi_hat / 4.0,
        method,
        theta_grid: grid.clone(),
        expected,
        counts,
    })
}

/// Least-squares phase of `c0 + c1 cos 4θ + c2 sin 4θ`; `None` if underdetermined.
fn harmonic_fit(grid: &[f64], counts: &[f64]) -> Option<f64> {
    let mut distinct: Vec<f64> = grid.iter().map(|t| (4.0 * t).rem_euclid(360.0)).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if distinct.len() < 3 {
        return None;
    }
    let design = DMatrix::from_fn(grid.len(), 3, |i, j| {
        let x = (4.0 * grid[i]).to_radians();
        match j {
            0 => 1.0,
            1 => x.cos(),
            _ => x.sin(),
        }
    });
    let rhs = DVector::from_column_slice(counts);
    let coef = design.svd(true, true).solve(&rhs, 1e-12).ok()?;
    // sin²((φ − x)/2) = ½ − ½ (cos φ cos x + sin φ sin x)
    let (c1, c2) = (coef[1], coef[2]);
    if c1.hypot(c2) < 1e-12 * coef[0].abs().max(1e-300) {
        return None;
    }
    Some(wrap_degrees((-c2).atan2(-c1).to_degrees()))
}
