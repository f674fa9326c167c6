//! Central moments of the Stokes vector and rotation-invariance classes.
//!
//! Orders follow the usual polarization convention: order 1 is the mean
//! `⟨S_n⟩`, orders 2 and 3 are the central moments `⟨Δ_n^m⟩` with
//! `Δ_n = S_n − ⟨S_n⟩`. All three are polynomials in the direction `n`, held
//! here as fully symmetric tensors so that any direction is a contraction.

mod sphere;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use sphere::{sphere_field, Sample, Sampling, SphereField};

use crate::error::{Error, Result};
use crate::fock::{stokes_operators, DensityOperator};
use crate::linalg::{self, CMatrix};

/// Mean vector, symmetrised covariance and symmetrised skewness of `(S1, S2, S3)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTensors {
    pub photons: usize,
    pub mean: [f64; 3],
    pub cov: [[f64; 3]; 3],
    pub skew: [[[f64; 3]; 3]; 3],
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

pub fn moment_tensors(rho: &DensityOperator) -> MomentTensors {
    let stokes = stokes_operators(rho.photons()).expect("density operators have N >= 1");
    let d = rho.dim();
    let ops = stokes.vector();
    let id = CMatrix::identity(d, d);
    let expect = |op: &CMatrix| linalg::trace(&(rho.matrix() * op));

    let mean: [f64; 3] = std::array::from_fn(|j| expect(ops[j]).re);
    let delta: Vec<CMatrix> = (0..3)
        .map(|j| ops[j] - &id * linalg::real(mean[j]))
        .collect();
    // ρΔ_j is reused by every higher moment
    let rho_delta: Vec<CMatrix> = delta.iter().map(|dj| rho.matrix() * dj).collect();

    let mut cov = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            cov[j][k] = linalg::trace(&(&rho_delta[j] * &delta[k])).re;
        }
    }
    for j in 0..3 {
        for k in 0..j {
            let sym = 0.5 * (cov[j][k] + cov[k][j]);
            cov[j][k] = sym;
            cov[k][j] = sym;
        }
    }

    let mut raw = [[[0.0; 3]; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            let pair = &rho_delta[j] * &delta[k];
            for l in 0..3 {
                raw[j][k][l] = linalg::trace(&(&pair * &delta[l])).re;
            }
        }
    }
    let mut skew = [[[0.0; 3]; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let idx = [j, k, l];
                skew[j][k][l] = PERMUTATIONS
                    .iter()
                    .map(|p| raw[idx[p[0]]][idx[p[1]]][idx[p[2]]])
                    .sum::<f64>()
                    / 6.0;
            }
        }
    }

    MomentTensors {
        photons: rho.photons(),
        mean,
        cov,
        skew,
    }
}

impl MomentTensors {
    /// Order-`m` polarization moment along `n` by tensor contraction.
    pub fn along(&self, n: [f64; 3], order: u32) -> Result<f64> {
        match order {
            1 => Ok((0..3).map(|j| self.mean[j] * n[j]).sum()),
            2 => {
                let mut acc = 0.0;
                for j in 0..3 {
                    for k in 0..3 {
                        acc += self.cov[j][k] * n[j] * n[k];
                    }
                }
                Ok(acc)
            }
            3 => {
                let mut acc = 0.0;
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            acc += self.skew[j][k][l] * n[j] * n[k] * n[l];
                        }
                    }
                }
                Ok(acc)
            }
            other => Err(Error::InvalidOrder(other)),
        }
    }

    pub fn variance_sum(&self) -> f64 {
        self.cov[0][0] + self.cov[1][1] + self.cov[2][2]
    }

    pub fn mean_norm(&self) -> f64 {
        self.mean.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the traceless part of the covariance.
    pub fn anisotropy(&self) -> f64 {
        let iso = self.variance_sum() / 3.0;
        let mut acc = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                let target = if j == k { iso } else { 0.0 };
                acc += (self.cov[j][k] - target).powi(2);
            }
        }
        acc.sqrt()
    }

    pub fn skew_norm(&self) -> f64 {
        self.skew
            .iter()
            .flatten()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// `⟨S_n⟩` for `m = 1`, `Tr(ρ (S_n − ⟨S_n⟩)^m)` for `m = 2, 3`, by direct operator powers.
pub fn moment_along(rho: &DensityOperator, n: [f64; 3], order: u32) -> Result<f64> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidOrder(order));
    }
    let n = crate::fock::unit_direction(n)?;
    let stokes = stokes_operators(rho.photons())?;
    let sn = stokes.along(n);
    let mean = linalg::trace(&(rho.matrix() * &sn)).re;
    if order == 1 {
        return Ok(mean);
    }
    let d = rho.dim();
    let delta = sn - CMatrix::identity(d, d) * linalg::real(mean);
    let mut power = delta.clone();
    for _ in 1..order {
        power = &power * &delta;
    }
    Ok(linalg::trace(&(rho.matrix() * power)).re)
}

pub fn variance_sum(rho: &DensityOperator) -> f64 {
    moment_tensors(rho).variance_sum()
}

/// Where the variance sum sits between `2⟨S0⟩` and `⟨S0⟩(⟨S0⟩+2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub variance_sum: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    /// Saturates the lower bound.
    pub minimum: bool,
    /// Saturates the upper bound (maximum sum-uncertainty).
    pub maximum: bool,
}

pub const BOUND_TOL: f64 = 1e-9;

pub fn check_bounds(rho: &DensityOperator) -> BoundReport {
    let sum = variance_sum(rho);
    let n = rho.photons() as f64;
    let lower = 2.0 * n;
    let upper = n * (n + 2.0);
    BoundReport {
        variance_sum: sum,
        lower,
        upper,
        within: sum >= lower - BOUND_TOL && sum <= upper + BOUND_TOL,
        minimum: (sum - lower).abs() <= BOUND_TOL,
        maximum: (sum - upper).abs() <= BOUND_TOL,
    }
}

/// Both sides of `√⟨Δ_j²⟩ √⟨Δ_k²⟩ ≥ |ε_jkl ⟨S_l⟩|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub j: usize,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub equality: bool,
}

/// Stokes indices `j`, `k` are 1-based (`1..=3`).
pub fn uncertainty_product(rho: &DensityOperator, j: usize, k: usize) -> Result<UncertaintyReport> {
    if !(1..=3).contains(&j) || !(1..=3).contains(&k) || j == k {
        return Err(Error::InvalidParameter(format!(
            "uncertainty pair ({j}, {k}) needs two distinct indices in 1..=3"
        )));
    }
    let t = moment_tensors(rho);
    let l = 6 - j - k;
    let lhs = t.cov[j - 1][j - 1].max(0.0).sqrt() * t.cov[k - 1][k - 1].max(0.0).sqrt();
    let rhs = t.mean[l - 1].abs();
    Ok(UncertaintyReport {
        j,
        k,
        lhs,
        rhs,
        equality: (lhs - rhs).abs() <= BOUND_TOL,
    })
}

/// How strictly "rotation invariant" is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ToleranceProfile {
    /// Analytically constructed states.
    Exact,
    /// Reconstructed states; carries its threshold.
    Experimental(f64),
}

impl ToleranceProfile {
    pub const EXACT_TOL: f64 = 1e-8;
    pub const EXPERIMENTAL_TOL: f64 = 0.15;

    pub fn experimental() -> Self {
        Self::Experimental(Self::EXPERIMENTAL_TOL)
    }

    pub fn tol(&self) -> f64 {
        match self {
            Self::Exact => Self::EXACT_TOL,
            Self::Experimental(t) => *t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceTriple {
    pub mean_invariant: bool,
    pub var_invariant: bool,
    pub skew_invariant: bool,
    /// `‖mean‖`, `‖cov − tr(cov)/3 · 1‖`, `‖T‖` (Frobenius).
    pub residuals: [f64; 3],
    pub tol: f64,
}

impl InvarianceTriple {
    pub fn pattern(&self) -> String {
        [self.mean_invariant, self.var_invariant, self.skew_invariant]
            .iter()
            .map(|&b| if b { 'O' } else { 'X' })
            .collect()
    }
}

pub fn invariance(rho: &DensityOperator, tol: f64) -> Result<InvarianceTriple> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive (got {tol})")));
    }
    let t = moment_tensors(rho);
    let residuals = [t.mean_norm(), t.anisotropy(), t.skew_norm()];
    Ok(InvarianceTriple {
        mean_invariant: residuals[0] <= tol,
        var_invariant: residuals[1] <= tol,
        skew_invariant: residuals[2] <= tol,
        residuals,
        tol,
    })
}

/// The six invariance classes possible for three photons (O = invariant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolarizationClass {
    OOO,
    OOX,
    OXO,
    OXX,
    XOX,
    XXX,
}

impl PolarizationClass {
    pub const ALL: [PolarizationClass; 6] = [
        Self::OOO,
        Self::OOX,
        Self::OXO,
        Self::OXX,
        Self::XOX,
        Self::XXX,
    ];

    pub fn from_triple(t: &InvarianceTriple) -> Result<Self> {
        t.pattern().parse()
    }
}

impl fmt::Display for PolarizationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PolarizationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "OOO" => Ok(Self::OOO),
            "OOX" => Ok(Self::OOX),
            "OXO" => Ok(Self::OXO),
            "OXX" => Ok(Self::OXX),
            "XOX" => Ok(Self::XOX),
            "XXX" => Ok(Self::XXX),
            other => Err(Error::ImpossibleClass(other.to_string())),
        }
    }
}

/// Six-class label; defined for three photons only.
pub fn classify(rho: &DensityOperator, tol: f64) -> Result<PolarizationClass> {
    if rho.photons() != 3 {
        return Err(Error::InvalidParameter(format!(
            "six-class labelling needs N = 3 (got N = {}); use `invariance` instead",
            rho.photons()
        )));
    }
    PolarizationClass::from_triple(&invariance(rho, tol)?)
}

/// Number of leading moment orders that are rotation invariant (0..=3).
pub fn unpolarized_order(rho: &DensityOperator, tol: f64) -> Result<u8> {
    let t = invariance(rho, tol)?;
    Ok([t.mean_invariant, t.var_invariant, t.skew_invariant]
        .iter()
        .take_while(|&&b| b)
        .count() as u8)
}
