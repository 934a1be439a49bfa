//! Brute-force enumeration of every measurement record of the protocol.
//!
//! Nothing here uses the closed-form branch tables: states are built
//! amplitude by amplitude, measured with [`apply_pcm`] and
//! [`PureState::project`], and the results are compared against whatever
//! implements [`ClosedForm`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pcm::{apply_pcm, correct_to_even, Parity, PcmError};
use crate::protocol::{
    build_w_state, modes, run_round_one, run_round_two_alice, run_round_two_charlie, BasisOutcome,
    Outcome, Pattern, ProtocolError, RoundReport, WCoefficients,
};
use crate::statevec::{
    make_single_photon, Direction, OneQubitGate, PureState, QubitLabel, StateError,
};

/// Deviation allowed between enumeration and closed forms.
pub const ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Pcm(#[from] PcmError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("a zero coefficient leaves the measurement basis undefined")]
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Alice,
    Charlie,
}

/// One measurement and what it returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    PcmAlice(Parity),
    PcmCharlie(Parity),
    BasisAlice(BasisOutcome),
    BasisCharlie(BasisOutcome),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::PcmAlice(p) => write!(f, "pcm_a={p}"),
            Step::PcmCharlie(p) => write!(f, "pcm_c={p}"),
            Step::BasisAlice(o) => write!(f, "basis_a={o:?}"),
            Step::BasisCharlie(o) => write!(f, "basis_c={o:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeLeaf {
    pub path: Vec<Step>,
    pub probability: f64,
    /// State of `a1, b1, c1`; `None` when the record has probability zero.
    pub posterior: Option<PureState>,
}

impl OutcomeLeaf {
    fn basis_outcomes(&self) -> (Option<BasisOutcome>, Option<BasisOutcome>) {
        let mut alice = None;
        let mut charlie = None;
        for s in &self.path {
            match s {
                Step::BasisAlice(o) => alice = Some(*o),
                Step::BasisCharlie(o) => charlie = Some(*o),
                _ => {}
            }
        }
        (alice, charlie)
    }

    /// The protocol outcome this record is heralded as.
    pub fn outcome(&self) -> Outcome {
        match self.basis_outcomes() {
            (Some(alice), Some(charlie)) => Outcome::Full { alice, charlie },
            (Some(alice), None) => Outcome::AliceSide { alice },
            (None, Some(charlie)) => Outcome::CharlieSide { charlie },
            (None, None) => unreachable!("every leaf ends with a basis measurement"),
        }
    }

    pub fn parities(&self) -> Vec<Parity> {
        self.path
            .iter()
            .filter_map(|s| match s {
                Step::PcmAlice(p) | Step::PcmCharlie(p) => Some(*p),
                _ => None,
            })
            .collect()
    }
}

fn diagonal_ancilla(label: QubitLabel) -> Result<PureState, StateError> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    make_single_photon(h, h, label)
}

struct Partial {
    path: Vec<Step>,
    probability: f64,
    state: Option<PureState>,
}

fn pcm_stage(
    inputs: Vec<Partial>,
    photon: &QubitLabel,
    ancilla: &QubitLabel,
    step: fn(Parity) -> Step,
) -> Result<Vec<Partial>, OracleError> {
    let mut out = Vec::new();
    for p in inputs {
        let Some(state) = p.state else {
            for parity in [Parity::Even, Parity::Odd] {
                out.push(extend(&p.path, step(parity), 0.0, None));
            }
            continue;
        };
        let r = apply_pcm(&state, photon, ancilla)?;
        for b in r.branches {
            let corrected = match b.state {
                Some(s) => Some(correct_to_even(b.parity, &s, ancilla)?),
                None => None,
            };
            out.push(extend(
                &p.path,
                step(b.parity),
                p.probability * b.probability,
                corrected,
            ));
        }
    }
    Ok(out)
}

fn basis_stage(
    inputs: Vec<Partial>,
    ancilla: &QubitLabel,
    direction: Direction,
    step: fn(BasisOutcome) -> Step,
) -> Result<Vec<Partial>, OracleError> {
    let mut out = Vec::new();
    for p in inputs {
        for (outcome, d) in [
            (BasisOutcome::Aligned, direction),
            (BasisOutcome::Orthogonal, direction.orthogonal()),
        ] {
            let (prob, state) = match &p.state {
                Some(s) => {
                    let proj = s.project(ancilla, &d)?;
                    (p.probability * proj.probability, proj.state)
                }
                None => (0.0, None),
            };
            out.push(extend(&p.path, step(outcome), prob, state));
        }
    }
    Ok(out)
}

fn extend(path: &[Step], step: Step, probability: f64, state: Option<PureState>) -> Partial {
    let mut path = path.to_vec();
    path.push(step);
    Partial {
        path,
        probability,
        state,
    }
}

fn into_leaves(partials: Vec<Partial>) -> Vec<OutcomeLeaf> {
    partials
        .into_iter()
        .map(|p| OutcomeLeaf {
            path: p.path,
            probability: p.probability,
            posterior: p.state,
        })
        .collect()
}

fn ancilla_direction(x: f64, y: f64) -> Result<Direction, OracleError> {
    Direction::real(x, y).map_err(|_| OracleError::Degenerate)
}

fn source_state(w: &WCoefficients) -> Result<PureState, OracleError> {
    Ok(build_w_state(w, [modes::A1, modes::B1, modes::C1])?)
}

/// All 16 records of the full round: two parity checks, bit-flip correction
/// on the ancillas, then the rotated measurements on `a2` and `c2`.
pub fn enumerate_round_one(w: &WCoefficients) -> Result<Vec<OutcomeLeaf>, OracleError> {
    if w.is_degenerate() {
        return Err(OracleError::Degenerate);
    }
    let psi = source_state(w)?
        .tensor(&diagonal_ancilla(modes::A2)?)?
        .tensor(&diagonal_ancilla(modes::C2)?)?;
    let start = vec![Partial {
        path: Vec::new(),
        probability: 1.0,
        state: Some(psi),
    }];
    let stage = pcm_stage(start, &modes::A1, &modes::A2, Step::PcmAlice)?;
    let stage = pcm_stage(stage, &modes::C1, &modes::C2, Step::PcmCharlie)?;
    let stage = basis_stage(
        stage,
        &modes::A2,
        ancilla_direction(w.a(), w.b())?,
        Step::BasisAlice,
    )?;
    let stage = basis_stage(
        stage,
        &modes::C2,
        ancilla_direction(w.c(), w.b())?,
        Step::BasisCharlie,
    )?;
    Ok(into_leaves(stage))
}

/// All 4 records of a single-side round, starting from a `TwoEqual` state.
///
/// Negative coefficients are first removed with σz on the matching photon.
pub fn enumerate_round_two(w: &WCoefficients, side: Side) -> Result<Vec<OutcomeLeaf>, OracleError> {
    let expected = match side {
        Side::Alice => Pattern::TwoEqualBC,
        Side::Charlie => Pattern::TwoEqualAB,
    };
    let found = w.pattern();
    if found != expected && found != Pattern::Maximal {
        return Err(ProtocolError::PatternMismatch { expected, found }.into());
    }

    let mut state = source_state(w)?;
    for (coef, label) in w
        .as_array()
        .into_iter()
        .zip([modes::A1, modes::B1, modes::C1])
    {
        if coef < 0.0 {
            state = state.apply_one_qubit(&label, &OneQubitGate::pauli_z())?;
        }
    }
    let (a, b, c) = (w.a().abs(), w.b().abs(), w.c().abs());
    let (photon, ancilla, direction, pcm_step, basis_step): (
        _,
        _,
        _,
        fn(Parity) -> Step,
        fn(BasisOutcome) -> Step,
    ) = match side {
        Side::Alice => (
            modes::A1,
            modes::A2,
            ancilla_direction(a, b)?,
            Step::PcmAlice,
            Step::BasisAlice,
        ),
        Side::Charlie => (
            modes::C1,
            modes::C2,
            ancilla_direction(c, b)?,
            Step::PcmCharlie,
            Step::BasisCharlie,
        ),
    };
    let psi = state.tensor(&diagonal_ancilla(ancilla.clone())?)?;
    let start = vec![Partial {
        path: Vec::new(),
        probability: 1.0,
        state: Some(psi),
    }];
    let stage = pcm_stage(start, &photon, &ancilla, pcm_step)?;
    let stage = basis_stage(stage, &ancilla, direction, basis_step)?;
    Ok(into_leaves(stage))
}

/// Closed-form branch tables under test.
pub trait ClosedForm {
    fn round_one(&self, w: &WCoefficients) -> Result<RoundReport, ProtocolError>;
    fn round_two(&self, w: &WCoefficients, side: Side) -> Result<RoundReport, ProtocolError>;
}

/// The protocol's own formulas.
pub struct Analytic;

impl ClosedForm for Analytic {
    fn round_one(&self, w: &WCoefficients) -> Result<RoundReport, ProtocolError> {
        run_round_one(w)
    }

    fn round_two(&self, w: &WCoefficients, side: Side) -> Result<RoundReport, ProtocolError> {
        match side {
            Side::Alice => run_round_two_alice(w),
            Side::Charlie => run_round_two_charlie(w),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    /// Largest |P_enumerated − P_closed| over branches.
    pub probability: f64,
    /// Largest amplitude difference of posteriors, up to global phase.
    pub posterior: f64,
    /// |Σ P_closed − 1|.
    pub normalization: f64,
}

impl Deviation {
    pub fn max(&self) -> f64 {
        self.probability.max(self.posterior).max(self.normalization)
    }

    fn merge(&mut self, other: Deviation) {
        self.probability = self.probability.max(other.probability);
        self.posterior = self.posterior.max(other.posterior);
        self.normalization = self.normalization.max(other.normalization);
    }
}

/// Groups enumerated records by heralded outcome and compares with `report`.
pub fn compare(leaves: &[OutcomeLeaf], report: &RoundReport) -> Result<Deviation, OracleError> {
    let mut dev = Deviation {
        normalization: (report.total_probability() - 1.0).abs(),
        ..Deviation::default()
    };
    for branch in &report.branches {
        let group: Vec<&OutcomeLeaf> = leaves
            .iter()
            .filter(|l| l.outcome() == branch.outcome)
            .collect();
        let p: f64 = group.iter().map(|l| l.probability).sum();
        dev.probability = dev.probability.max((p - branch.probability).abs());
        let expected = source_state(&branch.posterior)?;
        for leaf in group {
            if let Some(s) = &leaf.posterior {
                dev.posterior = dev.posterior.max(s.distance_up_to_phase(&expected)?);
            }
        }
    }
    let missing = leaves
        .iter()
        .filter(|l| report.branch(l.outcome()).is_none())
        .map(|l| l.probability)
        .sum::<f64>();
    dev.probability = dev.probability.max(missing);
    Ok(dev)
}

/// Interior of the coefficient simplex: `γ² = j/(n+1)`, `α² = (1 − γ²)·i/(n+1)`, `i, j = 1..=n`.
pub fn simplex_grid(n: usize) -> Vec<WCoefficients> {
    let mut out = Vec::with_capacity(n * n);
    for j in 1..=n {
        let g2 = j as f64 / (n + 1) as f64;
        for i in 1..=n {
            let a2 = (1.0 - g2) * i as f64 / (n + 1) as f64;
            let b2 = (1.0 - a2 - g2).max(0.0);
            out.push(
                WCoefficients::normalized(a2.sqrt(), b2.sqrt(), g2.sqrt()).expect("interior point"),
            );
        }
    }
    out
}

/// `(b, b, c)` states with `b² = k/(2(n+1))`, `k = 1..=n`.
pub fn two_equal_line(n: usize) -> Vec<WCoefficients> {
    (1..=n)
        .map(|k| {
            let b2 = k as f64 / (2 * (n + 1)) as f64;
            let c2 = (1.0 - 2.0 * b2).max(0.0);
            WCoefficients::normalized(b2.sqrt(), b2.sqrt(), c2.sqrt()).expect("interior point")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub round_one_points: usize,
    pub round_two_points: usize,
    pub round_one: Deviation,
    pub round_two: Deviation,
}

impl OracleSummary {
    pub fn max_deviation(&self) -> f64 {
        self.round_one.max().max(self.round_two.max())
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= ORACLE_TOL
    }
}

/// Enumerates a `steps × steps` simplex grid for the full round and a
/// `steps`-point line for each single-side round, comparing with `closed`.
pub fn check_grid(steps: usize, closed: &dyn ClosedForm) -> Result<OracleSummary, OracleError> {
    let mut round_one = Deviation::default();
    let grid = simplex_grid(steps);
    for w in &grid {
        let leaves = enumerate_round_one(w)?;
        round_one.merge(compare(&leaves, &closed.round_one(w)?)?);
    }
    let mut round_two = Deviation::default();
    let line = two_equal_line(steps);
    for w in &line {
        for (side, input) in [(Side::Charlie, *w), (Side::Alice, w.mirrored())] {
            let leaves = enumerate_round_two(&input, side)?;
            round_two.merge(compare(&leaves, &closed.round_two(&input, side)?)?);
        }
    }
    Ok(OracleSummary {
        round_one_points: grid.len(),
        round_two_points: 2 * line.len(),
        round_one,
        round_two,
    })
}
