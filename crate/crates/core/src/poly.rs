//! Linear mode transformations on multimode Fock amplitudes.
//!
//! A state is stored as amplitudes over occupation tuples in the normalised
//! Fock basis. A linear element maps creation operators as
//! `a_i† -> Σ_j m[j][i] a_j†`; the transformed state is obtained by expanding
//! the creation-operator monomial of every basis ket.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::linalg::{factorial, CMatrix, ZERO};

pub type Occupation = Vec<u8>;
pub type FockAmplitudes = BTreeMap<Occupation, Complex64>;

const DROP: f64 = 1e-15;

fn fock_norm(occ: &[u8]) -> f64 {
    occ.iter()
        .map(|&n| factorial(u32::from(n)))
        .product::<f64>()
        .sqrt()
}

/// Applies the mode map `m` (columns = input modes) to a Fock-amplitude map.
pub fn transform(state: &FockAmplitudes, m: &CMatrix) -> FockAmplitudes {
    let modes = m.ncols();
    let mut out = FockAmplitudes::new();
    for (occ, &amp) in state {
        debug_assert_eq!(occ.len(), modes);
        let mut poly: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        poly.insert(vec![0; modes], amp / fock_norm(occ));
        for (input, &count) in occ.iter().enumerate() {
            for _ in 0..count {
                let mut next = BTreeMap::new();
                for (mono, coef) in &poly {
                    for output in 0..modes {
                        let weight = m[(output, input)];
                        if weight == ZERO {
                            continue;
                        }
                        let mut raised = mono.clone();
                        raised[output] += 1;
                        *next.entry(raised).or_insert(ZERO) += coef * weight;
                    }
                }
                poly = next;
            }
        }
        for (mono, coef) in poly {
            let norm = fock_norm(&mono);
            *out.entry(mono).or_insert(ZERO) += coef * norm;
        }
    }
    out.retain(|_, a| a.norm() > DROP);
    out
}

#[cfg(test)]
/// Converts a monomial coefficient into the Fock amplitude of the same ket.
pub fn monomial_to_fock(occ: &[u8], coefficient: Complex64) -> Complex64 {
    coefficient * fock_norm(occ)
}

/// Inverse of [`monomial_to_fock`].
pub fn fock_to_monomial(occ: &[u8], amplitude: Complex64) -> Complex64 {
    amplitude / fock_norm(occ)
}
