//! Quantum polarization of two-mode, fixed-photon-number states.
//!
//! The crate covers the Stokes-operator algebra on the symmetric `N`-photon
//! subspace ([`fock`]), central-moment tensors and Poincaré-sphere fields
//! with the six-class rotation-invariance labelling ([`moments`]), a
//! linear-optics model of heralded three-photon preparation ([`prep`]),
//! simulated polarization tomography with maximum-likelihood reconstruction
//! ([`tomo`]), and SPDC joint-spectrum / Hong-Ou-Mandel analysis
//! ([`spectral`]). [`cli`] wires these into the `qpol` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod moments;
pub(crate) mod poly;
pub mod prep;
pub mod spectral;
pub mod tomo;

pub use error::{Error, Result};
