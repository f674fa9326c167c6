use serde::{Deserialize, Serialize};

use super::{named_state, HeraldedState, MultimodeState, OpticalElement, Occupation};
use crate::error::Result;
use crate::fock::{fidelity, StateFile};

/// Chain description: elements in propagation order, an optional input
/// occupation (defaults to `|2,2⟩` in mode `b`) and an optional named target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    #[serde(default)]
    pub input: Option<Occupation>,
    pub elements: Vec<OpticalElement>,
    #[serde(default)]
    pub target: Option<String>,
}

/// Heralded output, written so that it also parses as a state file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    #[serde(flatten)]
    pub state: StateFile,
    pub herald_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

/// Propagates the input through every element, then heralds on mode `a`.
pub fn run_chain(spec: &ChainSpec) -> Result<(HeraldedState, ChainReport)> {
    let input = spec.input.map_or_else(MultimodeState::initial, MultimodeState::fock);
    let heralded = input.apply_all(&spec.elements)?.herald()?;
    let fidelity = spec
        .target
        .as_deref()
        .map(|name| -> Result<f64> {
            fidelity(&heralded.state.density(), &named_state(name)?)
        })
        .transpose()?;
    let report = ChainReport {
        state: StateFile::from_pure(&heralded.state),
        herald_probability: heralded.probability,
        target: spec.target.clone(),
        fidelity,
    };
    Ok((heralded, report))
}
