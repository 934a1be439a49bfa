//! Closed-form branch tables for the concentration rounds.
//!
//! All probabilities are conditioned on the parity checks after bit-flip
//! correction: every parity combination leads to the same corrected state,
//! so the prefactor is 1 and the branch probabilities of a round sum to 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Pattern, ProtocolError, WCoefficients};

/// Which vector of a rotated ancilla basis fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisOutcome {
    /// The heralding vector `φ`.
    Aligned,
    /// Its orthogonal partner `φ⊥`.
    Orthogonal,
}

impl BasisOutcome {
    fn suffix(self) -> &'static str {
        match self {
            BasisOutcome::Aligned => "",
            BasisOutcome::Orthogonal => "_perp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "round", rename_all = "snake_case")]
pub enum Outcome {
    /// Both Alice and Charlie measured an ancilla.
    Full {
        alice: BasisOutcome,
        charlie: BasisOutcome,
    },
    AliceSide {
        alice: BasisOutcome,
    },
    CharlieSide {
        charlie: BasisOutcome,
    },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Full { alice, charlie } => {
                write!(f, "(phi1{},phi2{})", alice.suffix(), charlie.suffix())
            }
            Outcome::AliceSide { alice } => write!(f, "alice:phi{}", alice.suffix()),
            Outcome::CharlieSide { charlie } => write!(f, "charlie:phi{}", charlie.suffix()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Full,
    AliceSide,
    CharlieSide,
}

/// One heralded outcome of a round.
///
/// `posterior` carries the signs the measurement actually leaves on the
/// three photons; use [`WCoefficients::sign_normalized`] for the
/// phase-flipped form fed into the next round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    pub posterior: WCoefficients,
    /// The heralding outcome fired; the posterior is then the maximal W state.
    pub is_success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub kind: RoundKind,
    pub input: WCoefficients,
    pub branches: Vec<Branch>,
    pub parity_prefactor: f64,
}

impl RoundReport {
    pub fn success_probability(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.is_success)
            .map(|b| b.probability)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn branch(&self, outcome: Outcome) -> Option<&Branch> {
        self.branches.iter().find(|b| b.outcome == outcome)
    }

    /// Probabilities in table order (for the full round: P0, P1, P2, P3).
    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.probability).collect()
    }
}

fn posterior(a: f64, b: f64, c: f64) -> WCoefficients {
    WCoefficients::normalized(a, b, c).expect("posterior has a nonzero coefficient")
}

/// First round: two parity checks, then Alice measures `a2` and Charlie `c2`.
///
/// Branches in order `(φ1, φ2)`, `(φ1, φ2⊥)`, `(φ1⊥, φ2)`, `(φ1⊥, φ2⊥)`.
pub fn run_round_one(w: &WCoefficients) -> Result<RoundReport, ProtocolError> {
    if w.is_degenerate() {
        return Err(ProtocolError::Degenerate(
            "the full round needs all three coefficients nonzero",
        ));
    }
    let (a2, b2, c2) = w.squares();
    let d = (a2 + b2) * (b2 + c2);

    let p0 = 3.0 * a2 * b2 * c2 / d;
    let p1 = (2.0 * a2 * b2 * b2 + a2 * c2 * c2) / d;
    let p2 = (a2 * a2 * c2 + 2.0 * b2 * b2 * c2) / d;
    let p3 = (a2 * a2 * b2 + b2 * b2 * b2 + b2 * c2 * c2) / d;

    use BasisOutcome::{Aligned, Orthogonal};
    let branch = |alice, charlie, probability, posterior, is_success| Branch {
        outcome: Outcome::Full { alice, charlie },
        probability,
        posterior,
        is_success,
    };
    Ok(RoundReport {
        kind: RoundKind::Full,
        input: *w,
        branches: vec![
            branch(Aligned, Aligned, p0, WCoefficients::maximal(), true),
            branch(Aligned, Orthogonal, p1, posterior(b2, b2, -c2), false),
            branch(Orthogonal, Aligned, p2, posterior(-a2, b2, b2), false),
            branch(Orthogonal, Orthogonal, p3, posterior(-a2, b2, -c2), false),
        ],
        parity_prefactor: 1.0,
    })
}

fn require_pattern(w: &WCoefficients, expected: Pattern) -> Result<WCoefficients, ProtocolError> {
    let (n, _) = w.sign_normalized();
    let found = n.pattern();
    if found == expected || found == Pattern::Maximal {
        Ok(n)
    } else {
        Err(ProtocolError::PatternMismatch { expected, found })
    }
}

/// Single-side round for `(b, b, c)`: phase flip, one ancilla on `c2`, one parity check.
///
/// Success probability `3b²c² / ((2b² + c²)(b² + c²))`; failure leaves `∝ (b², b², −c²)`.
pub fn run_round_two_charlie(w: &WCoefficients) -> Result<RoundReport, ProtocolError> {
    let n = require_pattern(w, Pattern::TwoEqualAB)?;
    let (_, b2, c2) = n.squares();
    let norm = (2.0 * b2 + c2) * (b2 + c2);
    let success = 3.0 * b2 * c2 / norm;
    let failure = (2.0 * b2 * b2 + c2 * c2) / norm;
    Ok(RoundReport {
        kind: RoundKind::CharlieSide,
        input: *w,
        branches: vec![
            Branch {
                outcome: Outcome::CharlieSide {
                    charlie: BasisOutcome::Aligned,
                },
                probability: success,
                posterior: WCoefficients::maximal(),
                is_success: true,
            },
            Branch {
                outcome: Outcome::CharlieSide {
                    charlie: BasisOutcome::Orthogonal,
                },
                probability: failure,
                posterior: posterior(b2, b2, -c2),
                is_success: false,
            },
        ],
        parity_prefactor: 1.0,
    })
}

/// Mirror of [`run_round_two_charlie`] for `(a, b, b)` with the ancilla on `a2`.
pub fn run_round_two_alice(w: &WCoefficients) -> Result<RoundReport, ProtocolError> {
    let n = require_pattern(w, Pattern::TwoEqualBC)?;
    let (a2, b2, _) = n.squares();
    let norm = (a2 + 2.0 * b2) * (a2 + b2);
    let success = 3.0 * a2 * b2 / norm;
    let failure = (a2 * a2 + 2.0 * b2 * b2) / norm;
    Ok(RoundReport {
        kind: RoundKind::AliceSide,
        input: *w,
        branches: vec![
            Branch {
                outcome: Outcome::AliceSide {
                    alice: BasisOutcome::Aligned,
                },
                probability: success,
                posterior: WCoefficients::maximal(),
                is_success: true,
            },
            Branch {
                outcome: Outcome::AliceSide {
                    alice: BasisOutcome::Orthogonal,
                },
                probability: failure,
                posterior: posterior(-a2, b2, b2),
                is_success: false,
            },
        ],
        parity_prefactor: 1.0,
    })
}
