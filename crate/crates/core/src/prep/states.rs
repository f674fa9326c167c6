use crate::error::{Error, Result};
use crate::fock::{DensityOperator, PureState};
use crate::linalg::{c, CVector};

/// Names accepted by [`named_state`]. `oox_mix` is also accepted for `ooxt_mix`.
pub const NAMED_STATES: [&str; 9] = [
    "identity_quarter",
    "ooxt_mix",
    "oxo_mix",
    "noon3",
    "xox_mix",
    "h3",
    "v3",
    "one_two",
    "two_one",
];

/// Three-photon representatives of each invariance class plus the Fock kets
/// used by the preparation chain. Mixtures are incoherent sums of Fock kets;
/// weights are listed as `(|3,0⟩, |2,1⟩, |1,2⟩, |0,3⟩)`.
pub fn named_state(name: &str) -> Result<DensityOperator> {
    let fock = |h, v| PureState::fock(h, v).map(|p| p.density());
    match name {
        "identity_quarter" => DensityOperator::maximally_mixed(3),
        "ooxt_mix" | "oox_mix" => DensityOperator::diagonal(3, &[1.0 / 3.0, 0.0, 0.5, 1.0 / 6.0]),
        "oxo_mix" => DensityOperator::diagonal(3, &[0.5, 0.0, 0.0, 0.5]),
        "noon3" => Ok(noon3().density()),
        "xox_mix" => DensityOperator::diagonal(3, &[19.0 / 36.0, 0.0, 15.0 / 36.0, 2.0 / 36.0]),
        "h3" => fock(3, 0),
        "v3" => fock(0, 3),
        "one_two" => fock(1, 2),
        "two_one" => fock(2, 1),
        other => Err(Error::UnknownState(other.to_string())),
    }
}

/// `(|3,0⟩ − i|0,3⟩)/√2`.
pub(crate) fn noon3() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(
        3,
        CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -s)]),
    )
    .expect("NOON amplitudes are normalized")
}

/// The ket behind a named state, or `None` for the mixtures.
pub fn named_pure_state(name: &str) -> Result<Option<PureState>> {
    Ok(match name {
        "noon3" => Some(noon3()),
        "h3" => Some(PureState::fock(3, 0)?),
        "v3" => Some(PureState::fock(0, 3)?),
        "one_two" => Some(PureState::fock(1, 2)?),
        "two_one" => Some(PureState::fock(2, 1)?),
        _ => {
            named_state(name)?;
            None
        }
    })
}
