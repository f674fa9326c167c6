use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{born_probabilities, MeasurementSetting};
use crate::error::{Error, Result};
use crate::fock::DensityOperator;

/// `"30"`, `"21"`, … for outcome `k` of `photons` photons (`n_H` then `n_V`).
pub fn outcome_label(photons: usize, k: usize) -> String {
    format!("{}{}", photons - k, k)
}

/// Counts for one setting; `counts[k]` is the number of `|N−k, k⟩` events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecordFile", into = "RecordFile")]
pub struct CountRecord {
    pub setting: MeasurementSetting,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl CountRecord {
    pub fn new(setting: MeasurementSetting, counts: Vec<u64>, shots: u64) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::Format("a record needs at least two outcomes".into()));
        }
        let total: u64 = counts.iter().sum();
        if total > shots {
            return Err(Error::Format(format!("{total} counts exceed {shots} shots")));
        }
        Ok(Self { setting, counts, shots })
    }

    pub fn photons(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RecordFile {
    qwp2: f64,
    hwp3: f64,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl From<CountRecord> for RecordFile {
    fn from(r: CountRecord) -> Self {
        let n = r.photons();
        RecordFile {
            qwp2: r.setting.qwp2,
            hwp3: r.setting.hwp3,
            shots: r.shots,
            counts: r
                .counts
                .iter()
                .enumerate()
                .map(|(k, &c)| (outcome_label(n, k), c))
                .collect(),
        }
    }
}

impl TryFrom<RecordFile> for CountRecord {
    type Error = Error;

    fn try_from(f: RecordFile) -> Result<Self> {
        let n = f.counts.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::Format("counts must list every outcome of at least one photon".into())
        })?;
        let counts = (0..=n)
            .map(|k| {
                let key = outcome_label(n, k);
                f.counts
                    .get(&key)
                    .copied()
                    .ok_or_else(|| Error::Format(format!("missing outcome \"{key}\"")))
            })
            .collect::<Result<Vec<_>>>()?;
        CountRecord::new(MeasurementSetting::new(f.qwp2, f.hwp3)?, counts, f.shots)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub shots: u64,
    pub seed: u64,
    /// Draw each setting's number of trials from a Poisson law with mean `shots`.
    pub poisson_totals: bool,
}

impl SimulationConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        Self {
            shots,
            seed,
            poisson_totals: false,
        }
    }
}

/// Multinomial counts for every setting, from a single seeded stream.
pub fn simulate_counts(
    rho: &DensityOperator,
    settings: &[MeasurementSetting],
    config: SimulationConfig,
) -> Result<Vec<CountRecord>> {
    if config.shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    settings
        .iter()
        .map(|setting| {
            let probs = born_probabilities(rho, setting)?;
            let shots = if config.poisson_totals {
                let d = Poisson::new(config.shots as f64)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                d.sample(&mut rng) as u64
            } else {
                config.shots
            };
            let counts = multinomial(shots, &probs, &mut rng)?;
            CountRecord::new(*setting, counts, shots)
        })
        .collect()
}

/// Sequential-binomial multinomial draw.
fn multinomial(trials: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let mut remaining = trials;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            out.push(remaining);
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = if remaining == 0 || q == 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .sample(rng)
        };
        out.push(draw);
        remaining -= draw;
        mass -= p;
    }
    Ok(out)
}
