//! Ideal parity-check measurement on a photon pair.
//!
//! The cross-Kerr probe only reveals whether the pair is in the even
//! subspace `{HH, VV}` or the odd subspace `{HV, VH}`. Both photons survive
//! the measurement, so the posterior states keep every label.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::statevec::{OneQubitGate, PureState, QubitLabel, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcmError {
    #[error("parity check needs two distinct photons, got {0} twice")]
    SameLabel(QubitLabel),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

/// One outcome of a parity check. `state` is `None` when the outcome cannot occur.
#[derive(Clone, Debug, PartialEq)]
pub struct PcmBranch {
    pub parity: Parity,
    pub probability: f64,
    pub state: Option<PureState>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcmResult {
    pub pair: (QubitLabel, QubitLabel),
    /// Even branch first, odd branch second.
    pub branches: [PcmBranch; 2],
}

impl PcmResult {
    pub fn even(&self) -> &PcmBranch {
        &self.branches[0]
    }

    pub fn odd(&self) -> &PcmBranch {
        &self.branches[1]
    }

    pub fn branch(&self, parity: Parity) -> &PcmBranch {
        match parity {
            Parity::Even => self.even(),
            Parity::Odd => self.odd(),
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

/// Parity of the `(l1, l2)` pair within a basis index.
pub fn parity_of(
    s: &PureState,
    l1: &QubitLabel,
    l2: &QubitLabel,
) -> Result<impl Fn(usize) -> Parity, StateError> {
    let m1 = s.bit_mask(l1)?;
    let m2 = s.bit_mask(l2)?;
    Ok(move |i: usize| {
        if ((i & m1 != 0) as u8) ^ ((i & m2 != 0) as u8) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    })
}

pub fn apply_pcm(s: &PureState, l1: &QubitLabel, l2: &QubitLabel) -> Result<PcmResult, PcmError> {
    if l1 == l2 {
        return Err(PcmError::SameLabel(l1.clone()));
    }
    let parity = parity_of(s, l1, l2)?;
    let branches = [Parity::Even, Parity::Odd].map(|p| {
        let proj = s.restrict(|i| parity(i) == p);
        PcmBranch {
            parity: p,
            probability: proj.probability,
            state: proj.state,
        }
    });
    Ok(PcmResult {
        pair: (l1.clone(), l2.clone()),
        branches,
    })
}

/// Maps an odd-parity posterior back into the even subspace by flipping `flip_label`.
///
/// Even posteriors are returned unchanged.
pub fn correct_to_even(
    parity: Parity,
    state: &PureState,
    flip_label: &QubitLabel,
) -> Result<PureState, StateError> {
    match parity {
        Parity::Even => {
            state.position(flip_label)?;
            Ok(state.clone())
        }
        Parity::Odd => state.apply_one_qubit(flip_label, &OneQubitGate::pauli_x()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{Polarization, ALGEBRA_TOL};

    fn l(s: &str) -> QubitLabel {
        QubitLabel::new(s)
    }

    fn pair() -> Vec<QubitLabel> {
        vec![l("x"), l("y")]
    }

    #[test]
    fn even_input_is_deterministic() {
        let hh = PureState::basis(pair(), &[Polarization::H, Polarization::H]).unwrap();
        let r = apply_pcm(&hh, &l("x"), &l("y")).unwrap();
        assert_eq!(r.even().probability, 1.0);
        assert_eq!(r.odd().probability, 0.0);
        assert!(r.odd().state.is_none());
    }

    #[test]
    fn odd_bell_state() {
        let s = PureState::from_real(pair(), &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let r = apply_pcm(&s, &l("x"), &l("y")).unwrap();
        assert!((r.odd().probability - 1.0).abs() < ALGEBRA_TOL);
        assert_eq!(r.even().probability, 0.0);
    }

    #[test]
    fn same_label_rejected() {
        let hh = PureState::basis(pair(), &[Polarization::H, Polarization::H]).unwrap();
        assert_eq!(
            apply_pcm(&hh, &l("x"), &l("x")),
            Err(PcmError::SameLabel(l("x")))
        );
    }

    #[test]
    fn posteriors_live_in_their_subspace() {
        let s = PureState::from_real(pair(), &[0.1, 0.5, -0.3, 0.7]).unwrap();
        let r = apply_pcm(&s, &l("x"), &l("y")).unwrap();
        assert!((r.total_probability() - 1.0).abs() < ALGEBRA_TOL);
        let even = r.even().state.as_ref().unwrap();
        assert_eq!(even.amplitudes()[0b01].norm(), 0.0);
        assert_eq!(even.amplitudes()[0b10].norm(), 0.0);
        let odd = r.odd().state.as_ref().unwrap();
        assert_eq!(odd.amplitudes()[0b00].norm(), 0.0);
        assert_eq!(odd.amplitudes()[0b11].norm(), 0.0);
    }

    #[test]
    fn repeated_pcm_is_deterministic() {
        let s = PureState::from_real(pair(), &[0.1, 0.5, -0.3, 0.7]).unwrap();
        let r = apply_pcm(&s, &l("x"), &l("y")).unwrap();
        for b in &r.branches {
            let again = apply_pcm(b.state.as_ref().unwrap(), &l("x"), &l("y")).unwrap();
            assert!((again.branch(b.parity).probability - 1.0).abs() < ALGEBRA_TOL);
        }
    }

    #[test]
    fn correction_of_odd_pair() {
        let hv = PureState::basis(pair(), &[Polarization::H, Polarization::V]).unwrap();
        let fixed = correct_to_even(Parity::Odd, &hv, &l("y")).unwrap();
        assert_eq!(
            fixed,
            PureState::basis(pair(), &[Polarization::H, Polarization::H]).unwrap()
        );
        let same = correct_to_even(Parity::Even, &fixed, &l("y")).unwrap();
        assert_eq!(same, fixed);
    }
}
