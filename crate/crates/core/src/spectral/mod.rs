//! Joint spectral amplitudes of degenerate type-I down-conversion, spectral
//! filtering, Schmidt analysis and two-photon interference dips.
//!
//! Both photons share one wavelength grid, so the amplitude is a square
//! matrix `f[(s, i)]` whose transpose is the exchanged amplitude. The array
//! is normalized to unit sum of `|f|²`; each grid point is one spectral mode.
//!
//! The pump envelope is a transform-limited Gaussian of intensity FWHM `τ`,
//! `α(Ω) = exp(−Ω²τ²/(8 ln 2))` with `Ω = ω_s + ω_i − ω_p`. Phase matching
//! is `sinc(Δk L / 2)` with `Δk = g Ω − (k''/4)(Ω² + D²)`, where
//! `D = ω_s − ω_i`, `g` is the pump/down-converted group-delay mismatch and
//! `k''` the group-velocity dispersion of the down-converted light. This is
//! a second-order expansion about degeneracy, not a Sellmeier model.

mod hom;

pub use hom::{hom_curve, noise_subtracted_visibility, subtract_floor, HomCurve, HomMode};

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT: f64 = 299.792_458;
pub const MIN_GRID_POINTS: usize = 128;

pub type SpectralMatrix = DMatrix<Complex64>;

/// Angular frequency in rad/fs of a vacuum wavelength in nm.
pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / wavelength_nm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpParams {
    pub center_nm: f64,
    /// Intensity FWHM of the pulse.
    pub duration_fs: f64,
}

impl Default for PumpParams {
    fn default() -> Self {
        Self {
            center_nm: 390.0,
            duration_fs: 140.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseMatching {
    pub crystal_length_mm: f64,
    /// `1/v_pump − 1/v_down` in fs/mm.
    pub gvm_fs_per_mm: f64,
    /// `d²k/dω²` of the down-converted light in fs²/mm.
    pub gvd_fs2_per_mm: f64,
}

impl Default for PhaseMatching {
    fn default() -> Self {
        Self {
            crystal_length_mm: 0.6,
            gvm_fs_per_mm: 190.0,
            gvd_fs2_per_mm: 75.0,
        }
    }
}

impl PhaseMatching {
    /// `sinc(Δk L/2)` at sum-frequency offset `omega_sum` and difference `omega_diff` (rad/fs).
    pub fn amplitude(&self, omega_sum: f64, omega_diff: f64) -> f64 {
        let dk = self.gvm_fs_per_mm * omega_sum
            - 0.25 * self.gvd_fs2_per_mm * (omega_sum * omega_sum + omega_diff * omega_diff);
        sinc(0.5 * dk * self.crystal_length_mm)
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Uniform wavelength grid shared by both photons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavelengthGrid {
    wavelengths_nm: Vec<f64>,
}

impl WavelengthGrid {
    pub fn uniform(start_nm: f64, stop_nm: f64, points: usize) -> Result<Self> {
        if points < 2 || !(start_nm > 0.0) || !(stop_nm > start_nm) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < start < stop and at least 2 points (got {start_nm}..{stop_nm}, {points})"
            )));
        }
        let step = (stop_nm - start_nm) / (points - 1) as f64;
        Self::from_wavelengths((0..points).map(|k| start_nm + step * k as f64).collect())
    }

    pub fn from_wavelengths(wavelengths_nm: Vec<f64>) -> Result<Self> {
        if wavelengths_nm.windows(2).any(|w| !(w[1] > w[0])) || wavelengths_nm.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidGrid("wavelengths must be positive and strictly increasing".into()));
        }
        Ok(Self { wavelengths_nm })
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths_nm
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.wavelengths_nm.iter().map(|&w| angular_frequency(w)).collect()
    }

    pub fn len(&self) -> usize {
        self.wavelengths_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths_nm.is_empty()
    }
}

impl Default for WavelengthGrid {
    fn default() -> Self {
        Self::uniform(760.0, 800.0, 256).expect("default grid is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    pub grid: WavelengthGrid,
    /// Rows index the signal wavelength, columns the idler wavelength.
    pub amplitude: SpectralMatrix,
    pub pump: PumpParams,
    pub phase_matching: PhaseMatching,
}

pub fn build_jsa(pump: PumpParams, pm: PhaseMatching, grid: WavelengthGrid) -> Result<JointSpectralAmplitude> {
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::InvalidGrid(format!(
            "need at least {MIN_GRID_POINTS} points per axis (got {})",
            grid.len()
        )));
    }
    if !(pump.duration_fs > 0.0) || !(pump.center_nm > 0.0) {
        return Err(Error::InvalidParameter("pump duration and wavelength must be positive".into()));
    }
    let omega = grid.frequencies();
    let omega_p = angular_frequency(pump.center_nm);
    let width = pump.duration_fs * pump.duration_fs / (8.0 * std::f64::consts::LN_2);
    let n = grid.len();
    let amplitude = SpectralMatrix::from_fn(n, n, |s, i| {
        let sum = omega[s] + omega[i] - omega_p;
        let diff = omega[s] - omega[i];
        Complex64::new((-sum * sum * width).exp() * pm.amplitude(sum, diff), 0.0)
    });
    let jsa = JointSpectralAmplitude {
        grid,
        amplitude,
        pump,
        phase_matching: pm,
    };
    jsa.normalized().map(|(j, _)| j)
}

impl JointSpectralAmplitude {
    /// Copy scaled to unit norm, and the squared norm before scaling.
    fn normalized(mut self) -> Result<(Self, f64)> {
        let norm_sqr = self.amplitude.norm_squared();
        if !(norm_sqr > 1e-300) || !norm_sqr.is_finite() {
            return Err(Error::ZeroTransmission);
        }
        self.amplitude /= Complex64::new(norm_sqr.sqrt(), 0.0);
        Ok((self, norm_sqr))
    }

    /// Largest `|f(s,i) − f(i,s)|`.
    pub fn exchange_asymmetry(&self) -> f64 {
        (&self.amplitude - self.amplitude.transpose()).camax()
    }

    /// Marginal spectrum of the signal photon, `Σ_i |f(s,i)|²`.
    pub fn signal_marginal(&self) -> Vec<f64> {
        self.amplitude
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// CSV with columns `wavelength_s,wavelength_i,re,im,abs2`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "wavelength_s,wavelength_i,re,im,abs2")?;
        let w = self.grid.wavelengths();
        for s in 0..w.len() {
            for i in 0..w.len() {
                let z = self.amplitude[(s, i)];
                writeln!(out, "{:.6},{:.6},{:.9e},{:.9e},{:.9e}", w[s], w[i], z.re, z.im, z.norm_sqr())?;
            }
        }
        Ok(())
    }
}

/// Gaussian band-pass filter described by its intensity transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterSpec {
    pub center_nm: f64,
    /// Intensity FWHM; `f64::INFINITY` is an open filter.
    pub fwhm_nm: f64,
}

impl FilterSpec {
    pub fn new(center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        if !(fwhm_nm > 0.0) || !center_nm.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "filter needs a finite centre and positive width (got {center_nm}, {fwhm_nm})"
            )));
        }
        Ok(Self { center_nm, fwhm_nm })
    }

    /// Intensity transmission `exp(−4 ln 2 (λ − λ_c)² / FWHM²)`.
    pub fn transmission(&self, wavelength_nm: f64) -> f64 {
        if self.fwhm_nm.is_infinite() {
            return 1.0;
        }
        let x = (wavelength_nm - self.center_nm) / self.fwhm_nm;
        (-4.0 * std::f64::consts::LN_2 * x * x).exp()
    }
}

/// Multiplies by the filter amplitudes and renormalizes. Also returns the
/// probability that both photons are transmitted.
pub fn apply_filters(
    jsa: &JointSpectralAmplitude,
    signal: FilterSpec,
    idler: FilterSpec,
) -> Result<(JointSpectralAmplitude, f64)> {
    let w = jsa.grid.wavelengths();
    let ts: Vec<f64> = w.iter().map(|&x| signal.transmission(x).sqrt()).collect();
    let ti: Vec<f64> = w.iter().map(|&x| idler.transmission(x).sqrt()).collect();
    let mut filtered = jsa.clone();
    for s in 0..w.len() {
        for i in 0..w.len() {
            filtered.amplitude[(s, i)] *= ts[s] * ti[i];
        }
    }
    let input = jsa.amplitude.norm_squared();
    let (out, kept) = filtered.normalized()?;
    Ok((out, kept / input))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtDecomposition {
    /// Schmidt weights, descending, summing to 1.
    pub lambdas: Vec<f64>,
    /// `1 / Σ λ²`.
    pub k: f64,
    /// `Σ λ²`, the purity of either heralded photon.
    pub purity: f64,
}

pub fn schmidt(jsa: &JointSpectralAmplitude) -> SchmidtDecomposition {
    let sv = jsa.amplitude.clone().singular_values();
    let total: f64 = sv.iter().map(|s| s * s).sum();
    let mut lambdas: Vec<f64> = sv.iter().map(|s| s * s / total).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let purity: f64 = lambdas.iter().map(|l| l * l).sum();
    SchmidtDecomposition {
        lambdas,
        k: 1.0 / purity,
        purity,
    }
}

#[cfg(test)]
mod tests;
