use serde::Serialize;

use crate::error::{Error, Result};

/// Pulse repetition rate of the pump laser.
pub const DEFAULT_REPETITION_HZ: f64 = 80e6;

/// Rates implied by per-pulse single, double and triple pair-emission probabilities.
///
/// Two pairs make the heralded signal; three pairs are the leading source of
/// spurious fourfold events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairNoiseReport {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub repetition_hz: f64,
    pub signal_rate_hz: f64,
    pub noise_rate_hz: f64,
    /// `p2 / p3`; `None` when `p3 = 0`.
    pub snr: Option<f64>,
    pub noise_free: bool,
}

pub fn pair_noise_report(p1: f64, p2: f64, p3: f64, repetition_hz: f64) -> Result<PairNoiseReport> {
    let ordered = (0.0..=1.0).contains(&p3) && p3 <= p2 && p2 <= p1 && p1 <= 1.0;
    if !ordered || !p1.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "pair probabilities must satisfy 1 ≥ p1 ≥ p2 ≥ p3 ≥ 0 (got {p1}, {p2}, {p3})"
        )));
    }
    if !(repetition_hz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "repetition rate must be positive (got {repetition_hz})"
        )));
    }
    let noise_free = p3 == 0.0;
    Ok(PairNoiseReport {
        p1,
        p2,
        p3,
        repetition_hz,
        signal_rate_hz: p2 * repetition_hz,
        noise_rate_hz: p3 * repetition_hz,
        snr: (!noise_free).then(|| p2 / p3),
        noise_free,
    })
}

impl PairNoiseReport {
    /// Rescales the pump power by `factor` under `p_k ∝ P^k`.
    pub fn pump_scaled(&self, factor: f64) -> Result<PairNoiseReport> {
        if !(factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pump scale must be positive (got {factor})"
            )));
        }
        pair_noise_report(
            self.p1 * factor,
            self.p2 * factor.powi(2),
            self.p3 * factor.powi(3),
            self.repetition_hz,
        )
    }
}
