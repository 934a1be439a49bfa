//! Concurrence, three-tangle and the transformation efficiency of one round.

use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{run_round_one, ProtocolError, WCoefficients};
use crate::statevec::{DensityMatrix, PureState, StateError};

/// Eigenvalues of `ρρ̃` (and of `ρ`) at or below this are treated as exact zeros.
///
/// Rank-deficient reductions otherwise leak `√ε ≈ 1e-8` into the concurrence.
pub const SPECTRUM_FLOOR: f64 = 1e-13;

/// Denominators of the efficiencies must exceed this.
pub const MIN_CONCURRENCE: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("expected a {expected}-qubit state, got {found} qubits")]
    WrongArity { expected: usize, found: usize },
    #[error("degenerate coefficients: {0}")]
    Degenerate(&'static str),
    #[error("eigenvalue decomposition did not converge")]
    NoConvergence,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceReport {
    pub c_ab: f64,
    pub c_ac: f64,
    /// Concurrence between A and the pair BC.
    pub c_a_bc: f64,
    pub three_tangle: f64,
}

/// Expected concurrences after one full round, per bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostEcpConcurrences {
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_a_bc: f64,
}

impl PostEcpConcurrences {
    pub fn max_abs_diff(&self, other: &PostEcpConcurrences) -> f64 {
        [
            self.c_ab - other.c_ab,
            self.c_ac - other.c_ac,
            self.c_a_bc - other.c_a_bc,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub eta_ab: f64,
    pub eta_ac: f64,
    pub eta_a_bc: f64,
    pub c_before: ConcurrenceReport,
    pub c_after_ab: f64,
    pub c_after_ac: f64,
    pub c_after_a_bc: f64,
}

fn two_qubit_matrix(rho: &DensityMatrix) -> Result<Matrix4<Complex64>, MetricsError> {
    if rho.num_qubits() != 2 {
        return Err(MetricsError::WrongArity {
            expected: 2,
            found: rho.num_qubits(),
        });
    }
    Ok(Matrix4::from_fn(|i, j| rho.matrix()[(i, j)]))
}

/// `ρ̃ = (σy ⊗ σy) ρ* (σy ⊗ σy)`.
fn spin_flip(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let yy = Matrix4::new(
        z, z, z, -o,
        z, z, o, z,
        z, o, z, z,
        -o, z, z, z,
    );
    yy * rho.conjugate() * yy
}

fn wootters(mut ev: Vec<f64>) -> f64 {
    for e in &mut ev {
        if *e <= SPECTRUM_FLOOR {
            *e = 0.0;
        }
    }
    let mut lambdas: Vec<f64> = ev.into_iter().map(f64::sqrt).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1..].iter().sum::<f64>()).max(0.0)
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The λᵢ come from the spectrum of the non-Hermitian product `ρρ̃`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, MetricsError> {
    let m = two_qubit_matrix(rho)?;
    let product = m * spin_flip(&m);
    let ev = Schur::try_new(product, 1e-15, 10_000)
        .ok_or(MetricsError::NoConvergence)?
        .unpack()
        .1
        .diagonal()
        .iter()
        .map(|z| z.re)
        .collect();
    Ok(wootters(ev))
}

/// Same quantity through the Hermitian matrix `√ρ ρ̃ √ρ`, which is similar to `ρρ̃`.
pub fn concurrence_hermitian(rho: &DensityMatrix) -> Result<f64, MetricsError> {
    let m = two_qubit_matrix(rho)?;
    let eig = m.symmetric_eigen();
    let roots = eig
        .eigenvalues
        .map(|e| if e <= SPECTRUM_FLOOR { 0.0 } else { e.sqrt() });
    let u = eig.eigenvectors;
    let sqrt_rho = u * Matrix4::from_diagonal(&roots.map(|r| Complex64::new(r, 0.0))) * u.adjoint();
    let h = sqrt_rho * spin_flip(&m) * sqrt_rho;
    let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(wootters(
        h.symmetric_eigenvalues().iter().copied().collect(),
    ))
}

/// `2√det ρ_A` for the photon at position `pos` against the rest of a pure state.
pub fn one_vs_rest_concurrence(s: &PureState, pos: usize) -> Result<f64, MetricsError> {
    let label = s
        .labels()
        .get(pos)
        .cloned()
        .ok_or(MetricsError::WrongArity {
            expected: pos + 1,
            found: s.num_qubits(),
        })?;
    let rho = s.reduce(&[label])?;
    let m = rho.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    Ok(2.0 * det.max(0.0).sqrt())
}

fn require_three(s: &PureState) -> Result<(), MetricsError> {
    if s.num_qubits() != 3 {
        return Err(MetricsError::WrongArity {
            expected: 3,
            found: s.num_qubits(),
        });
    }
    Ok(())
}

/// Concurrences of a three-qubit pure state, photons taken as A, B, C in label order.
pub fn numeric_concurrences(s: &PureState) -> Result<ConcurrenceReport, MetricsError> {
    require_three(s)?;
    let l = s.labels();
    let c_ab = concurrence(&s.reduce(&[l[0].clone(), l[1].clone()])?)?;
    let c_ac = concurrence(&s.reduce(&[l[0].clone(), l[2].clone()])?)?;
    let c_a_bc = one_vs_rest_concurrence(s, 0)?;
    let tau = c_a_bc * c_a_bc - c_ab * c_ab - c_ac * c_ac;
    Ok(ConcurrenceReport {
        c_ab,
        c_ac,
        c_a_bc,
        three_tangle: tau.clamp(0.0, 1.0),
    })
}

/// Residual tangle `C²_A(BC) − C²_AB − C²_AC` of a three-qubit pure state.
pub fn three_tangle(s: &PureState) -> Result<f64, MetricsError> {
    Ok(numeric_concurrences(s)?.three_tangle)
}

pub fn analytic_concurrences(w: &WCoefficients) -> ConcurrenceReport {
    let (a, b, c) = (w.a().abs(), w.b().abs(), w.c().abs());
    ConcurrenceReport {
        c_ab: 2.0 * a * b,
        c_ac: 2.0 * a * c,
        c_a_bc: 2.0 * a * (b * b + c * c).sqrt(),
        three_tangle: 0.0,
    }
}

/// Probability-weighted concurrences of the four first-round posteriors.
pub fn post_ecp_concurrences(w: &WCoefficients) -> Result<PostEcpConcurrences, ProtocolError> {
    let report = run_round_one(w)?;
    let mut out = PostEcpConcurrences {
        c_ab: 0.0,
        c_ac: 0.0,
        c_a_bc: 0.0,
    };
    for b in &report.branches {
        let c = analytic_concurrences(&b.posterior);
        out.c_ab += b.probability * c.c_ab;
        out.c_ac += b.probability * c.c_ac;
        out.c_a_bc += b.probability * c.c_a_bc;
    }
    Ok(out)
}

/// The expanded closed-form expressions for the post-round concurrences.
///
/// The A|BC expression weights the `(φ1, φ2⊥)` branch with
/// `2β²/√S₁ · √(β⁴/S₁ + β⁴/S₁)`, `S₁ = γ⁴ + 2β⁴`, while the A|BC concurrence of
/// that branch's posterior is `2β²/√S₁ · √((β⁴ + γ⁴)/S₁)`. The two agree only
/// when `β = γ`; [`post_ecp_concurrences`] is the exact value.
pub fn closed_form_post_ecp(w: &WCoefficients) -> Result<PostEcpConcurrences, ProtocolError> {
    let p = run_round_one(w)?.probabilities();
    let (a2, b2, c2) = w.squares();
    let (a4, b4, c4) = (a2 * a2, b2 * b2, c2 * c2);
    let s1 = c4 + 2.0 * b4;
    let s2 = a4 + 2.0 * b4;
    let s3 = a4 + b4 + c4;

    let c_ab = 2.0 / 3.0 * p[0]
        + 2.0 * b4 / s1 * p[1]
        + 2.0 * a2 * b2 / s2 * p[2]
        + 2.0 * a2 * b2 / s3 * p[3];
    let c_ac = 2.0 / 3.0 * p[0]
        + 2.0 * b2 * c2 / s1 * p[1]
        + 2.0 * a2 * b2 / s2 * p[2]
        + 2.0 * a2 * c2 / s3 * p[3];
    let c_a_bc = 2.0 * 2f64.sqrt() / 3.0 * p[0]
        + 2.0 * b2 / s1.sqrt() * (b4 / s1 + b4 / s1).sqrt() * p[1]
        + 2.0 * a2 / s2.sqrt() * (b4 / s2 + b4 / s2).sqrt() * p[2]
        + 2.0 * a2 / s3.sqrt() * (b4 / s3 + c4 / s3).sqrt() * p[3];
    Ok(PostEcpConcurrences { c_ab, c_ac, c_a_bc })
}

/// `η = C′/C` for each bipartition after one full round.
pub fn efficiencies(w: &WCoefficients) -> Result<EfficiencyReport, MetricsError> {
    let before = analytic_concurrences(w);
    if before.c_ab <= MIN_CONCURRENCE || before.c_ac <= MIN_CONCURRENCE {
        return Err(MetricsError::Degenerate(
            "initial pairwise concurrence is zero",
        ));
    }
    let after = post_ecp_concurrences(w)?;
    Ok(EfficiencyReport {
        eta_ab: after.c_ab / before.c_ab,
        eta_ac: after.c_ac / before.c_ac,
        eta_a_bc: after.c_a_bc / before.c_a_bc,
        c_before: before,
        c_after_ab: after.c_ab,
        c_after_ac: after.c_ac,
        c_after_a_bc: after.c_a_bc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::w_state;
    use crate::statevec::{Polarization, QubitLabel};

    fn l(s: &str) -> QubitLabel {
        QubitLabel::new(s)
    }

    #[test]
    fn bell_and_product() {
        let bell = PureState::from_real(vec![l("x"), l("y")], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let rho = DensityMatrix::from_pure(&bell);
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-12);
        assert!((concurrence_hermitian(&rho).unwrap() - 1.0).abs() < 1e-12);

        let hh =
            PureState::basis(vec![l("x"), l("y")], &[Polarization::H, Polarization::H]).unwrap();
        assert!(concurrence(&DensityMatrix::from_pure(&hh)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn wrong_dimension() {
        let h = PureState::basis(vec![l("x")], &[Polarization::H]).unwrap();
        assert!(matches!(
            concurrence(&DensityMatrix::from_pure(&h)),
            Err(MetricsError::WrongArity {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            three_tangle(&h),
            Err(MetricsError::WrongArity { .. })
        ));
    }

    #[test]
    fn ab_reduction_of_w() {
        let w = WCoefficients::normalized(0.3, 0.5, 0.7).unwrap();
        let s = w_state(&w);
        let c = concurrence(&s.reduce(&[l("a1"), l("b1")]).unwrap()).unwrap();
        assert!((c - 2.0 * w.a() * w.b()).abs() < 1e-10);
    }

    #[test]
    fn maximal_w_pairs() {
        let r = numeric_concurrences(&w_state(&WCoefficients::maximal())).unwrap();
        assert!((r.c_ab - 2.0 / 3.0).abs() < 1e-10);
        assert!((r.c_a_bc - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(r.three_tangle < 1e-9);
    }

    #[test]
    fn ghz_tangle() {
        let labels = vec![l("a"), l("b"), l("c")];
        let mut amps = [0.0; 8];
        amps[0] = 1.0;
        amps[7] = 1.0;
        let ghz = PureState::from_real(labels.clone(), &amps).unwrap();
        assert!((three_tangle(&ghz).unwrap() - 1.0).abs() < 1e-12);
        let prod = PureState::basis(labels, &[Polarization::V; 3]).unwrap();
        assert!(three_tangle(&prod).unwrap().abs() < 1e-12);
    }

    #[test]
    fn analytic_corner_cases() {
        let r = analytic_concurrences(&WCoefficients::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!((r.c_ab, r.c_ac, r.c_a_bc), (0.0, 0.0, 0.0));
        let m = analytic_concurrences(&WCoefficients::maximal());
        assert!((m.c_ab - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.c_ac - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.c_a_bc - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_point_efficiency_is_one() {
        let e = efficiencies(&WCoefficients::maximal()).unwrap();
        for eta in [e.eta_ab, e.eta_ac, e.eta_a_bc] {
            assert!((eta - 1.0).abs() < 1e-12);
        }
        assert!((e.c_after_ab - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_closed_forms_match_branch_sums() {
        let w = WCoefficients::normalized(0.4, 0.3, 0.8).unwrap();
        let exact = post_ecp_concurrences(&w).unwrap();
        let closed = closed_form_post_ecp(&w).unwrap();
        assert!((exact.c_ab - closed.c_ab).abs() < 1e-12);
        assert!((exact.c_ac - closed.c_ac).abs() < 1e-12);
    }

    #[test]
    fn a_bc_closed_form_matches_only_when_beta_equals_gamma() {
        let w = WCoefficients::normalized(0.4, 0.5, 0.5).unwrap();
        let d =
            post_ecp_concurrences(&w).unwrap().c_a_bc - closed_form_post_ecp(&w).unwrap().c_a_bc;
        assert!(d.abs() < 1e-12);
        let w = WCoefficients::normalized(0.4, 0.3, 0.8).unwrap();
        let d =
            post_ecp_concurrences(&w).unwrap().c_a_bc - closed_form_post_ecp(&w).unwrap().c_a_bc;
        assert!(d.abs() > 1e-3);
    }

    #[test]
    fn vanishing_alpha_kills_post_round_entanglement() {
        let w = WCoefficients::normalized(1e-6, 0.6, 0.8).unwrap();
        let after = post_ecp_concurrences(&w).unwrap();
        assert!(after.c_ab < 1e-5 && after.c_ac < 1e-5 && after.c_a_bc < 1e-5);
    }

    #[test]
    fn degenerate_efficiency() {
        let w = WCoefficients::new(0.6, 0.8, 0.0).unwrap();
        assert!(efficiencies(&w).is_err());
    }
}
