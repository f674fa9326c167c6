//! Maximum-likelihood reconstruction by the iterative `R ρ R` map.
//!
//! With normalized frequencies `f` and current probabilities `p`, the map is
//! `ρ ← R ρ R / Tr(R ρ R)` where `R = Σ (f/p) Π`. Each iterate stays positive
//! and unit-trace by construction. When a full step lowers the likelihood,
//! the step is diluted to `(1 + εR) ρ (1 + εR)` with `ε` halved until the
//! likelihood no longer decreases, which makes the sequence monotone.

use serde::Serialize;

use super::{design_rank, CountRecord, MeasurementSetting};
use crate::error::{Error, Result};
use crate::fock::{fidelity, purity, DensityOperator, FockBasis};
use crate::linalg::{real, CMatrix, CVector};
use crate::moments::{moment_tensors, Sampling};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleConfig {
    pub max_iterations: usize,
    /// Stop once the per-event log-likelihood gain falls below this.
    pub tolerance: f64,
    /// Allow diluted steps when a full step does not increase the likelihood.
    pub dilution: bool,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-10,
            dilution: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub rho_hat: DensityOperator,
    /// Per-event log-likelihood `Σ f ln p` of `rho_hat`.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each accepted iterate, starting with the initial state.
    pub likelihood_trace: Vec<f64>,
    pub warnings: Vec<String>,
}

const MIN_DILUTION: f64 = 1e-12;

struct Problem {
    basis: FockBasis,
    /// Outcome vector and its normalized frequency, zero-frequency outcomes dropped.
    terms: Vec<(CVector, f64)>,
}

impl Problem {
    fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.terms
            .iter()
            .map(|(v, _)| v.dotc(&(rho * v)).re.max(0.0))
            .collect()
    }

    fn log_likelihood(&self, rho: &CMatrix) -> f64 {
        self.probabilities(rho)
            .iter()
            .zip(&self.terms)
            .map(|(&p, (_, f))| f * p.ln())
            .sum()
    }

    fn r_operator(&self, rho: &CMatrix) -> CMatrix {
        let d = self.basis.dim();
        let mut r = CMatrix::zeros(d, d);
        for ((v, f), p) in self.terms.iter().zip(self.probabilities(rho)) {
            if p > 0.0 {
                r += v * v.adjoint() * real(f / p);
            }
        }
        r
    }
}

fn normalized_sandwich(a: &CMatrix, rho: &CMatrix) -> CMatrix {
    let m = a * rho * a.adjoint();
    let t = m.trace().re;
    m / real(t)
}

/// Reconstructs from weighted outcomes `(setting, weights)`; weights may be
/// counts or exact probabilities.
pub fn mle_reconstruct(
    data: &[(MeasurementSetting, Vec<f64>)],
    config: &MleConfig,
) -> Result<ReconstructionResult> {
    let photons = data
        .first()
        .map(|(_, w)| w.len().saturating_sub(1))
        .ok_or(Error::EmptyData)?;
    let basis = FockBasis::new(photons)?;
    if data.iter().any(|(_, w)| w.len() != photons + 1) {
        return Err(Error::Format("records disagree on the number of outcomes".into()));
    }
    if data.iter().flat_map(|(_, w)| w).any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Format("outcome weights must be finite and nonnegative".into()));
    }
    let total: f64 = data.iter().flat_map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::EmptyData);
    }

    let mut warnings = Vec::new();
    let settings: Vec<MeasurementSetting> = data.iter().map(|(s, _)| *s).collect();
    let rank = design_rank(&settings, photons)?;
    if rank < basis.dim() * basis.dim() {
        warnings.push(format!(
            "settings are not informationally complete (rank {rank} < {})",
            basis.dim() * basis.dim()
        ));
    }

    let mut terms = Vec::new();
    for (setting, weights) in data {
        for (v, &w) in setting.outcome_vectors(photons)?.into_iter().zip(weights) {
            if w > 0.0 {
                terms.push((v, w / total));
            }
        }
    }
    let problem = Problem { basis, terms };

    let d = basis.dim();
    let identity = CMatrix::identity(d, d);
    let mut rho = identity.clone() / real(d as f64);
    let mut ll = problem.log_likelihood(&rho);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let r = problem.r_operator(&rho);
        let mut candidate = normalized_sandwich(&r, &rho);
        let mut next_ll = problem.log_likelihood(&candidate);
        if next_ll < ll && config.dilution {
            let mut eps = 1.0;
            loop {
                eps *= 0.5;
                let step = &identity + &r * real(eps);
                candidate = normalized_sandwich(&step, &rho);
                next_ll = problem.log_likelihood(&candidate);
                if next_ll >= ll || eps < MIN_DILUTION {
                    break;
                }
            }
        }
        if next_ll < ll {
            // no ascent direction left at working precision
            converged = true;
            break;
        }
        let gain = next_ll - ll;
        rho = candidate;
        ll = next_ll;
        trace.push(ll);
        if gain < config.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        warnings.push(format!(
            "stopped after {iterations} iterations without meeting the likelihood tolerance"
        ));
    }
    Ok(ReconstructionResult {
        rho_hat: DensityOperator::from_trusted(basis, rho),
        log_likelihood: ll,
        iterations,
        converged,
        likelihood_trace: trace,
        warnings,
    })
}

/// Convenience over [`mle_reconstruct`] for count records.
pub fn mle_from_counts(records: &[CountRecord], config: &MleConfig) -> Result<ReconstructionResult> {
    let data: Vec<(MeasurementSetting, Vec<f64>)> = records.iter().map(|r| (r.setting, r.weights())).collect();
    mle_reconstruct(&data, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub fidelity: f64,
    pub purity: f64,
    /// Sup over sampled directions of `|⟨Δ_n^m⟩_ρ̂ − ⟨Δ_n^m⟩_target|`, for `m = 1, 2, 3`.
    pub moment_deviation: [f64; 3],
}

pub fn evaluate(rho_hat: &DensityOperator, target: &DensityOperator, sampling: Sampling) -> Result<Evaluation> {
    let fidelity = fidelity(rho_hat, target)?;
    let a = moment_tensors(rho_hat);
    let b = moment_tensors(target);
    let mut dev = [0.0f64; 3];
    for n in sampling.directions()? {
        for (m, slot) in dev.iter_mut().enumerate() {
            let order = m as u32 + 1;
            let diff = (a.along(n, order)? - b.along(n, order)?).abs();
            *slot = slot.max(diff);
        }
    }
    Ok(Evaluation {
        fidelity,
        purity: purity(rho_hat),
        moment_deviation: dev,
    })
}
