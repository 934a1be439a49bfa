//! The concentration protocol: state preparation, the two-party first round,
//! the single-side follow-up rounds and exhaustive recursion over failures.

mod basis;
mod coefficients;
mod recursion;
mod rounds;

use thiserror::Error;

use crate::statevec::{PureState, QubitLabel, StateError};

pub use basis::{alice_basis, charlie_basis, MeasBasis};
pub use coefficients::{Pattern, WCoefficients, DEGENERATE_TOL, PATTERN_TOL};
pub use recursion::{next_round, recurse, RecursionNode, RecursionResult};
pub use rounds::{
    run_round_one, run_round_two_alice, run_round_two_charlie, BasisOutcome, Branch, Outcome,
    RoundKind, RoundReport,
};

/// Spatial modes used by the protocol.
pub mod modes {
    use crate::statevec::QubitLabel;

    /// Alice's half of the W state.
    pub const A1: QubitLabel = QubitLabel::from_static("a1");
    /// Bob's photon.
    pub const B1: QubitLabel = QubitLabel::from_static("b1");
    /// Charlie's half of the W state.
    pub const C1: QubitLabel = QubitLabel::from_static("c1");
    /// Alice's ancilla.
    pub const A2: QubitLabel = QubitLabel::from_static("a2");
    /// Charlie's ancilla.
    pub const C2: QubitLabel = QubitLabel::from_static("c2");
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("coefficients are not normalized (sum of squares {0})")]
    NotNormalized(f64),
    #[error("coefficients are all zero")]
    ZeroNorm,
    #[error("degenerate coefficients: {0}")]
    Degenerate(&'static str),
    #[error("expected a {expected} coefficient pattern, found {found}")]
    PatternMismatch { expected: Pattern, found: Pattern },
    #[error(transparent)]
    State(#[from] StateError),
}

/// `a|VHH⟩ + b|HVH⟩ + c|HHV⟩` on the given three labels.
pub fn build_w_state(
    w: &WCoefficients,
    labels: [QubitLabel; 3],
) -> Result<PureState, ProtocolError> {
    let mut amps = [0.0; 8];
    amps[0b100] = w.a();
    amps[0b010] = w.b();
    amps[0b001] = w.c();
    Ok(PureState::from_real(labels.to_vec(), &amps)?)
}

/// [`build_w_state`] on the source modes `a1, b1, c1`.
pub fn w_state(w: &WCoefficients) -> PureState {
    build_w_state(w, [modes::A1, modes::B1, modes::C1]).expect("distinct labels, unit norm")
}
