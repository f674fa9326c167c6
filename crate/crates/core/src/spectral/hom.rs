use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::{JointSpectralAmplitude, SpectralMatrix};
use crate::error::{Error, Result};

/// Baseline coincidence probability for fully distinguishable photons.
const BASELINE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomMode {
    /// Signal and idler of the same pair meet at the splitter.
    #[default]
    SamePair,
    /// One heralded photon from each of two independent, identical sources.
    IndependentSources,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomCurve {
    pub mode: HomMode,
    pub delays_fs: Vec<f64>,
    /// Coincidence probability at each delay; `½` for distinguishable photons.
    pub rates: Vec<f64>,
    /// Gaussian dip fitted to `rates`.
    pub fit: Vec<f64>,
    /// `1 − R(0)/½`.
    pub visibility: f64,
    /// `(max − min)/max` of the fitted dip over the scanned delays.
    pub fitted_visibility: f64,
    pub fit_center_fs: f64,
    pub fit_sigma_fs: f64,
}

/// Interference term `I(τ)` with `R(τ) = ½ (1 − I(τ))`.
fn overlap(mode: HomMode, f: &SpectralMatrix, omega: &[f64], reduced: Option<&SpectralMatrix>, tau: f64) -> f64 {
    let n = omega.len();
    let phases: Vec<Complex64> = omega.iter().map(|&w| Complex64::from_polar(1.0, w * tau)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    match mode {
        HomMode::SamePair => {
            for s in 0..n {
                for i in 0..n {
                    // f(ω_s, ω_i) f*(ω_i, ω_s) e^{i(ω_s − ω_i)τ}
                    acc += f[(s, i)] * f[(i, s)].conj() * phases[s] * phases[i].conj();
                }
            }
        }
        HomMode::IndependentSources => {
            let rho = reduced.expect("reduced state is computed for independent sources");
            for a in 0..n {
                for b in 0..n {
                    acc += rho[(a, b)].norm_sqr() * phases[a] * phases[b].conj();
                }
            }
        }
    }
    acc.re
}

/// Coincidence probability behind a balanced splitter as a function of delay.
pub fn hom_curve(jsa: &JointSpectralAmplitude, delays_fs: &[f64], mode: HomMode) -> Result<HomCurve> {
    if delays_fs.is_empty() || delays_fs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidGrid("delays must be a non-empty list of finite values".into()));
    }
    let omega = jsa.grid.frequencies();
    let f = &jsa.amplitude;
    let reduced = (mode == HomMode::IndependentSources).then(|| f * f.adjoint());
    let rate = |tau: f64| BASELINE * (1.0 - overlap(mode, f, &omega, reduced.as_ref(), tau));
    let rates: Vec<f64> = delays_fs.iter().map(|&t| rate(t).max(0.0)).collect();
    let visibility = 1.0 - rate(0.0) / BASELINE;
    let (fit, center, sigma) = gaussian_dip_fit(delays_fs, &rates);
    let top = fit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bottom = fit.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(HomCurve {
        mode,
        delays_fs: delays_fs.to_vec(),
        rates,
        fit,
        visibility,
        fitted_visibility: if top > 0.0 { (top - bottom) / top } else { 0.0 },
        fit_center_fs: center,
        fit_sigma_fs: sigma,
    })
}

/// Moment estimate of `B − A exp(−(τ − c)²/(2σ²))` with `B` the analytic baseline.
fn gaussian_dip_fit(delays: &[f64], rates: &[f64]) -> (Vec<f64>, f64, f64) {
    let depth: Vec<f64> = rates.iter().map(|r| (BASELINE - r).max(0.0)).collect();
    let area: f64 = depth.iter().sum();
    if area <= 0.0 || delays.len() < 3 {
        return (vec![BASELINE; delays.len()], 0.0, 0.0);
    }
    let center = depth.iter().zip(delays).map(|(d, t)| d * t).sum::<f64>() / area;
    let var = depth
        .iter()
        .zip(delays)
        .map(|(d, t)| d * (t - center).powi(2))
        .sum::<f64>()
        / area;
    let sigma = var.sqrt();
    let peak = depth.iter().cloned().fold(0.0, f64::max);
    let fit = delays
        .iter()
        .map(|t| {
            if sigma > 0.0 {
                BASELINE - peak * (-(t - center).powi(2) / (2.0 * var)).exp()
            } else {
                BASELINE
            }
        })
        .collect();
    (fit, center, sigma)
}

impl HomCurve {
    /// CSV with columns `delay_fs,rate,fit`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "delay_fs,rate,fit")?;
        for ((t, r), f) in self.delays_fs.iter().zip(&self.rates).zip(&self.fit) {
            writeln!(out, "{t:.3},{r:.9e},{f:.9e}")?;
        }
        Ok(())
    }
}

/// Removes a flat accidental floor of relative height `floor_ratio`
/// (background over true two-photon coincidences at the baseline).
///
/// With `R = S + B`, the raw visibility is `V S₀/(S₀ + B)`, so the corrected
/// value is `V_raw (1 + B/S₀)`.
pub fn subtract_floor(v_raw: f64, floor_ratio: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v_raw) {
        return Err(Error::InvalidParameter(format!("raw visibility must lie in [0, 1] (got {v_raw})")));
    }
    if !(floor_ratio >= 0.0) || !floor_ratio.is_finite() {
        return Err(Error::InvalidParameter(format!("floor ratio must be nonnegative (got {floor_ratio})")));
    }
    let v = v_raw * (1.0 + floor_ratio);
    if v > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "the accidental floor exceeds the dip depth (corrected visibility {v:.4})"
        )));
    }
    Ok(v.min(1.0))
}

/// Visibility corrected for accidental coincidences from extra pairs.
///
/// The floor is `(p2 + p3) / (p1 / 2)`: an extra pair emitted with the
/// detected one supplies an uncorrelated photon to either detector, while a
/// true coincidence behind the splitter occurs with probability `p1/2`.
pub fn noise_subtracted_visibility(v_raw: f64, p1: f64, p2: f64, p3: f64) -> Result<f64> {
    if !(p1 > 0.0) || p2 < 0.0 || p3 < 0.0 || p2 > p1 || p3 > p2 {
        return Err(Error::InvalidParameter(format!(
            "pair probabilities must satisfy p1 > 0 and p1 ≥ p2 ≥ p3 ≥ 0 (got {p1}, {p2}, {p3})"
        )));
    }
    subtract_floor(v_raw, (p2 + p3) / (0.5 * p1))
}
