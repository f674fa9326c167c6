//! Moment fields sampled over the Poincaré sphere.

use std::io::Write;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{moment_tensors, MomentTensors};
use crate::error::{Error, Result};
use crate::fock::DensityOperator;

pub const MIN_POINTS: usize = 16;

/// Direction sets. Both are closed under `n → −n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Sampling {
    /// Mirrored Fibonacci lattice: half a lattice on the upper hemisphere plus its antipodes.
    Fibonacci { points: usize },
    /// Cell-centred polar angles times evenly spaced azimuths (`n_phi` even).
    Grid { n_theta: usize, n_phi: usize },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Fibonacci { points: 2048 }
    }
}

impl Sampling {
    pub fn len(&self) -> usize {
        match *self {
            Sampling::Fibonacci { points } => points,
            Sampling::Grid { n_theta, n_phi } => n_theta * n_phi,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self) -> Result<()> {
        match *self {
            Sampling::Fibonacci { points } if points < MIN_POINTS || points % 2 == 1 => {
                Err(Error::InvalidSampling(format!(
                    "Fibonacci sampling needs an even count of at least {MIN_POINTS} (got {points})"
                )))
            }
            Sampling::Grid { n_theta, n_phi } if n_theta * n_phi < MIN_POINTS || n_phi % 2 == 1 || n_theta == 0 => {
                Err(Error::InvalidSampling(format!(
                    "grid needs at least {MIN_POINTS} points and an even azimuth count (got {n_theta}x{n_phi})"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn directions(&self) -> Result<Vec<[f64; 3]>> {
        self.check()?;
        Ok(match *self {
            Sampling::Fibonacci { points } => {
                let half = points / 2;
                let golden = PI * (3.0 - 5f64.sqrt());
                let upper: Vec<[f64; 3]> = (0..half)
                    .map(|i| {
                        // first half of a `points`-point lattice: z in (0, 1)
                        let z = 1.0 - (2.0 * i as f64 + 1.0) / points as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        [r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect();
                let lower = upper.iter().map(|n| [-n[0], -n[1], -n[2]]);
                upper.iter().copied().chain(lower).collect()
            }
            Sampling::Grid { n_theta, n_phi } => {
                let mut out = Vec::with_capacity(n_theta * n_phi);
                for i in 0..n_theta {
                    let theta = PI * (i as f64 + 0.5) / n_theta as f64;
                    for j in 0..n_phi {
                        let phi = 2.0 * PI * j as f64 / n_phi as f64;
                        out.push(from_angles(theta, phi));
                    }
                }
                out
            }
        })
    }

    /// Index of the sample at `−n` for the sample at `index`.
    pub fn antipode(&self, index: usize) -> usize {
        match *self {
            Sampling::Fibonacci { points } => {
                let half = points / 2;
                if index < half {
                    index + half
                } else {
                    index - half
                }
            }
            Sampling::Grid { n_theta, n_phi } => {
                let (i, j) = (index / n_phi, index % n_phi);
                (n_theta - 1 - i) * n_phi + (j + n_phi / 2) % n_phi
            }
        }
    }
}

fn from_angles(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Polar angle from `+S3` and azimuth in the `S1`–`S2` plane.
pub fn angles(n: [f64; 3]) -> (f64, f64) {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]).rem_euclid(2.0 * PI);
    (theta, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub n: [f64; 3],
    pub theta: f64,
    pub phi: f64,
    /// Signed moment; odd orders change sign under `n → −n`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereField {
    pub order: u32,
    pub sampling: Sampling,
    pub samples: Vec<Sample>,
}

pub fn sphere_field(rho: &DensityOperator, order: u32, sampling: Sampling) -> Result<SphereField> {
    let tensors = moment_tensors(rho);
    field_from_tensors(&tensors, order, sampling)
}

pub(crate) fn field_from_tensors(
    tensors: &MomentTensors,
    order: u32,
    sampling: Sampling,
) -> Result<SphereField> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidOrder(order));
    }
    let samples = sampling
        .directions()?
        .into_iter()
        .map(|n| {
            let (theta, phi) = angles(n);
            let value = tensors.along(n, order)?;
            Ok(Sample { n, theta, phi, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphereField {
        order,
        sampling,
        samples,
    })
}

impl SphereField {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.value)
    }

    /// Magnitudes, the view used for plotting odd orders.
    pub fn abs_values(&self) -> Vec<f64> {
        self.values().map(f64::abs).collect()
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Largest `|v(n) ∓ v(−n)|` over all antipodal pairs (`−` for even orders, `+` for odd).
    pub fn antipodal_residual(&self) -> f64 {
        let sign = if self.order % 2 == 1 { 1.0 } else { -1.0 };
        (0..self.samples.len())
            .map(|i| {
                let j = self.sampling.antipode(i);
                (self.samples[i].value + sign * self.samples[j].value).abs()
            })
            .fold(0.0, f64::max)
    }

    /// CSV with columns `nx,ny,nz,theta,phi,value,abs_value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "nx,ny,nz,theta,phi,value,abs_value")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}",
                s.n[0],
                s.n[1],
                s.n[2],
                s.theta,
                s.phi,
                s.value,
                s.value.abs()
            )?;
        }
        Ok(())
    }
}
