use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DensityOperator, PureState};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

/// On-disk state format. Complex numbers are `[re, im]` pairs and the basis
/// order is descending `n_H`. Unknown fields are ignored, so reports that
/// embed a state (preparation, tomography) can be read back as states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(rename = "N")]
    pub photons: usize,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl StateFile {
    pub fn from_pure(state: &PureState) -> Self {
        Self {
            photons: state.photons(),
            kind: StateKind::Pure,
            amplitudes: Some(state.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
            matrix: None,
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        Self {
            photons: rho.photons(),
            kind: StateKind::Mixed,
            amplitudes: None,
            matrix: Some(
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect(),
            ),
        }
    }

    pub fn to_pure(&self) -> Result<Option<PureState>> {
        match (self.kind, &self.amplitudes) {
            (StateKind::Pure, Some(amps)) => {
                let v = CVector::from_iterator(amps.len(), amps.iter().map(|p| c(p[0], p[1])));
                Ok(Some(PureState::new(self.photons, v)?))
            }
            (StateKind::Pure, None) => Err(Error::Format("pure state without `amplitudes`".into())),
            (StateKind::Mixed, _) => Ok(None),
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        if let Some(pure) = self.to_pure()? {
            return Ok(pure.density());
        }
        let rows = self
            .matrix
            .as_ref()
            .ok_or_else(|| Error::Format("mixed state without `matrix`".into()))?;
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Format("matrix is not square".into()));
        }
        let m = CMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1]));
        DensityOperator::new(self.photons, m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
