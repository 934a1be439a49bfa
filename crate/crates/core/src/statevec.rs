//! Exact pure-state algebra over labeled polarization qubits.
//!
//! A [`PureState`] over labels `l0 l1 … l(n-1)` stores `2^n` complex
//! amplitudes. Basis index `i` corresponds to the string whose `k`-th symbol
//! is bit `n-1-k` of `i`, with `H = 0` and `V = 1`: the leftmost label is the
//! most significant bit. So for labels `(a1, b1, c1)` the amplitude of
//! `|VHH⟩` lives at index `0b100 = 4`.

use std::borrow::Cow;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for algebraic identities (norms, unitarity, hermiticity).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Tolerance for eigenvalue positivity of density matrices.
pub const EIGEN_TOL: f64 = 1e-10;

/// Squared norms at or below this are treated as an empty (zero-probability) branch.
pub const ZERO_PROBABILITY: f64 = 1e-28;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("label {0} appears in both operands")]
    LabelCollision(QubitLabel),
    #[error("label {0} appears more than once")]
    DuplicateLabel(QubitLabel),
    #[error("unknown qubit label {0}")]
    UnknownLabel(QubitLabel),
    #[error("gate is not unitary (max deviation from identity {0:e})")]
    NonUnitary(f64),
    #[error("the set of qubits to keep is empty")]
    EmptyKeep,
    #[error("expected {expected} amplitudes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Polarization of a single photon. `H` encodes bit 0, `V` bit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn bit(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => f.write_str("H"),
            Polarization::V => f.write_str("V"),
        }
    }
}

/// Name of a photon's spatial mode, e.g. `a1` or `c2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLabel(Cow<'static, str>);

impl QubitLabel {
    pub const fn from_static(name: &'static str) -> Self {
        QubitLabel(Cow::Borrowed(name))
    }

    pub fn new(name: impl Into<String>) -> Self {
        QubitLabel(Cow::Owned(name.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for QubitLabel {
    fn from(s: &str) -> Self {
        QubitLabel::new(s)
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A normalized single-qubit vector `h|H⟩ + v|V⟩`, used as a measurement direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    pub h: Complex64,
    pub v: Complex64,
}

impl Direction {
    pub fn new(h: Complex64, v: Complex64) -> Result<Self, StateError> {
        let n = (h.norm_sqr() + v.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        Ok(Direction { h: h / n, v: v / n })
    }

    pub fn real(cos: f64, sin: f64) -> Result<Self, StateError> {
        Direction::new(Complex64::new(cos, 0.0), Complex64::new(sin, 0.0))
    }

    pub fn horizontal() -> Self {
        Direction { h: ONE, v: ZERO }
    }

    pub fn vertical() -> Self {
        Direction { h: ZERO, v: ONE }
    }

    /// The orthogonal partner `v*|H⟩ − h*|V⟩`; for real `(cos, sin)` this is `(sin, −cos)`.
    pub fn orthogonal(&self) -> Self {
        Direction {
            h: self.v.conj(),
            v: -self.h.conj(),
        }
    }

    pub fn component(&self, p: Polarization) -> Complex64 {
        match p {
            Polarization::H => self.h,
            Polarization::V => self.v,
        }
    }
}

/// A 2×2 single-qubit gate in the `{H, V}` basis, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneQubitGate(pub [[Complex64; 2]; 2]);

impl OneQubitGate {
    pub fn identity() -> Self {
        OneQubitGate([[ONE, ZERO], [ZERO, ONE]])
    }

    /// Bit flip `|H⟩⟨V| + |V⟩⟨H|`.
    pub fn pauli_x() -> Self {
        OneQubitGate([[ZERO, ONE], [ONE, ZERO]])
    }

    /// Phase flip `diag(1, −1)`.
    pub fn pauli_z() -> Self {
        OneQubitGate([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        OneQubitGate([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    /// Largest entry of `|G†G − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let g = &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = ZERO;
                for k in 0..2 {
                    s += g[k][i].conj() * g[k][j];
                }
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Outcome of a projection. `state` is `None` for a zero-probability branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub probability: f64,
    pub state: Option<PureState>,
}

impl Projection {
    pub fn is_empty(&self) -> bool {
        self.state.is_none()
    }
}

/// Pure state of `n` labeled qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<QubitLabel>,
    amplitudes: Vec<Complex64>,
}

fn check_unique(labels: &[QubitLabel]) -> Result<(), StateError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(StateError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

impl PureState {
    /// Builds a state from raw amplitudes and normalizes it.
    pub fn from_amplitudes(
        labels: Vec<QubitLabel>,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, StateError> {
        check_unique(&labels)?;
        let expected = 1usize << labels.len();
        if amplitudes.len() != expected {
            return Err(StateError::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        let n2 = norm_sqr(&amplitudes);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        let n = n2.sqrt();
        Ok(PureState {
            labels,
            amplitudes: amplitudes.into_iter().map(|a| a / n).collect(),
        })
    }

    pub fn from_real(labels: Vec<QubitLabel>, amplitudes: &[f64]) -> Result<Self, StateError> {
        Self::from_amplitudes(
            labels,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// The zero-qubit state (a single unit amplitude).
    pub fn vacuum() -> Self {
        PureState {
            labels: Vec::new(),
            amplitudes: vec![ONE],
        }
    }

    /// Computational-basis product state, one polarization per label.
    pub fn basis(labels: Vec<QubitLabel>, pols: &[Polarization]) -> Result<Self, StateError> {
        if pols.len() != labels.len() {
            return Err(StateError::DimensionMismatch {
                expected: labels.len(),
                found: pols.len(),
            });
        }
        check_unique(&labels)?;
        let mut amplitudes = vec![ZERO; 1 << labels.len()];
        amplitudes[basis_index(pols)] = ONE;
        Ok(PureState { labels, amplitudes })
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn amplitude(&self, pols: &[Polarization]) -> Complex64 {
        assert_eq!(pols.len(), self.labels.len(), "basis string length");
        self.amplitudes[basis_index(pols)]
    }

    pub fn position(&self, label: &QubitLabel) -> Result<usize, StateError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| StateError::UnknownLabel(label.clone()))
    }

    /// Bit mask of `label` inside a basis index.
    pub fn bit_mask(&self, label: &QubitLabel) -> Result<usize, StateError> {
        let pos = self.position(label)?;
        Ok(1 << (self.labels.len() - 1 - pos))
    }

    /// `⟨self|other⟩`; both states must carry the same labels in the same order.
    pub fn inner(&self, other: &PureState) -> Result<Complex64, StateError> {
        if self.labels != other.labels {
            let missing = other
                .labels
                .iter()
                .find(|l| !self.labels.contains(l))
                .or_else(|| self.labels.iter().find(|l| !other.labels.contains(l)))
                .cloned()
                .unwrap_or_else(|| self.labels[0].clone());
            return Err(StateError::UnknownLabel(missing));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest amplitude difference after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &PureState) -> Result<f64, StateError> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest amplitude difference, phase included.
    pub fn max_abs_diff(&self, other: &PureState) -> Result<f64, StateError> {
        self.inner(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Product state `self ⊗ other` with labels concatenated.
    pub fn tensor(&self, other: &PureState) -> Result<PureState, StateError> {
        if let Some(l) = other.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(StateError::LabelCollision(l.clone()));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(PureState { labels, amplitudes })
    }

    /// Projects qubit `label` onto `direction` and removes it from the state.
    pub fn project(
        &self,
        label: &QubitLabel,
        direction: &Direction,
    ) -> Result<Projection, StateError> {
        let pos = self.position(label)?;
        let n = self.labels.len();
        let shift = n - 1 - pos;
        let low_mask = (1usize << shift) - 1;
        let (dh, dv) = (direction.h.conj(), direction.v.conj());

        let mut amplitudes = vec![ZERO; 1 << (n - 1)];
        for (j, out) in amplitudes.iter_mut().enumerate() {
            let high = (j & !low_mask) << 1;
            let low = j & low_mask;
            let ih = high | low;
            let iv = ih | (1 << shift);
            *out = dh * self.amplitudes[ih] + dv * self.amplitudes[iv];
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Ok(finish_projection(labels, amplitudes))
    }

    /// Keeps only the basis components whose index satisfies `keep`, labels unchanged.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Projection {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| if keep(i) { a } else { ZERO })
            .collect();
        finish_projection(self.labels.clone(), amplitudes)
    }

    pub fn apply_one_qubit(
        &self,
        label: &QubitLabel,
        gate: &OneQubitGate,
    ) -> Result<PureState, StateError> {
        let dev = gate.unitarity_deviation();
        if dev > ALGEBRA_TOL {
            return Err(StateError::NonUnitary(dev));
        }
        let mask = self.bit_mask(label)?;
        let g = &gate.0;
        let mut amplitudes = self.amplitudes.clone();
        for i in 0..amplitudes.len() {
            if i & mask == 0 {
                let (h, v) = (self.amplitudes[i], self.amplitudes[i | mask]);
                amplitudes[i] = g[0][0] * h + g[0][1] * v;
                amplitudes[i | mask] = g[1][0] * h + g[1][1] * v;
            }
        }
        Ok(PureState {
            labels: self.labels.clone(),
            amplitudes,
        })
    }

    /// Same physical state with its labels listed in `order`.
    pub fn reorder(&self, order: &[QubitLabel]) -> Result<PureState, StateError> {
        check_unique(order)?;
        if order.len() != self.labels.len() {
            return Err(StateError::DimensionMismatch {
                expected: self.labels.len(),
                found: order.len(),
            });
        }
        let masks = order
            .iter()
            .map(|l| self.bit_mask(l))
            .collect::<Result<Vec<_>, _>>()?;
        let n = order.len();
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (j, out) in amplitudes.iter_mut().enumerate() {
            let mut i = 0;
            for (k, m) in masks.iter().enumerate() {
                if j & (1 << (n - 1 - k)) != 0 {
                    i |= m;
                }
            }
            *out = self.amplitudes[i];
        }
        Ok(PureState {
            labels: order.to_vec(),
            amplitudes,
        })
    }

    /// Reduced density matrix on `keep` (in the order given), tracing out the rest.
    pub fn reduce(&self, keep: &[QubitLabel]) -> Result<DensityMatrix, StateError> {
        if keep.is_empty() {
            return Err(StateError::EmptyKeep);
        }
        check_unique(keep)?;
        let keep_masks = keep
            .iter()
            .map(|l| self.bit_mask(l))
            .collect::<Result<Vec<_>, _>>()?;
        let keep_all: usize = keep_masks.iter().sum();
        let k = keep.len();
        let dim = 1 << k;

        // Split each basis index into (kept sub-index, traced remainder).
        let sub_index = |i: usize| {
            keep_masks
                .iter()
                .enumerate()
                .filter(|(_, &m)| i & m != 0)
                .map(|(pos, _)| 1usize << (k - 1 - pos))
                .sum::<usize>()
        };

        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, ai) in self.amplitudes.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let rest = i & !keep_all;
            let r = sub_index(i);
            for (j, aj) in self.amplitudes.iter().enumerate() {
                if j & !keep_all == rest {
                    rho[(r, sub_index(j))] += ai * aj.conj();
                }
            }
        }
        Ok(DensityMatrix {
            labels: keep.to_vec(),
            matrix: rho,
        })
    }
}

fn finish_projection(labels: Vec<QubitLabel>, mut amplitudes: Vec<Complex64>) -> Projection {
    let p = norm_sqr(&amplitudes);
    if p <= ZERO_PROBABILITY {
        return Projection {
            probability: 0.0,
            state: None,
        };
    }
    let n = p.sqrt();
    for a in &mut amplitudes {
        *a /= n;
    }
    Projection {
        probability: p,
        state: Some(PureState { labels, amplitudes }),
    }
}

/// Basis index of a polarization string (leftmost symbol is the most significant bit).
pub fn basis_index(pols: &[Polarization]) -> usize {
    pols.iter().fold(0, |acc, p| (acc << 1) | p.bit())
}

/// Normalized single-photon state `c_h|H⟩ + c_v|V⟩` on `label`.
pub fn make_single_photon(
    c_h: Complex64,
    c_v: Complex64,
    label: QubitLabel,
) -> Result<PureState, StateError> {
    PureState::from_amplitudes(vec![label], vec![c_h, c_v])
}

/// Density matrix over labeled qubits, same index convention as [`PureState`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<QubitLabel>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(labels: Vec<QubitLabel>, matrix: DMatrix<Complex64>) -> Result<Self, StateError> {
        check_unique(&labels)?;
        let dim = 1 << labels.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(StateError::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        Ok(DensityMatrix { labels, matrix })
    }

    /// `|s⟩⟨s|`.
    pub fn from_pure(s: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        DensityMatrix {
            labels: s.labels().to_vec(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order (ρ is treated as Hermitian).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Checks the trace, hermiticity and positivity bounds of a physical state.
    pub fn is_valid(&self) -> bool {
        (self.trace() - ONE).norm() <= ALGEBRA_TOL
            && self.hermiticity_deviation() <= ALGEBRA_TOL
            && self.eigenvalues().iter().all(|&e| e >= -EIGEN_TOL)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn l(s: &str) -> QubitLabel {
        QubitLabel::new(s)
    }

    #[test]
    fn single_photon_is_normalized() {
        let s = make_single_photon(c(3.0), c(4.0), l("x")).unwrap();
        assert!((s.amplitudes()[0] - c(0.6)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.8)).norm() < 1e-15);

        let d = make_single_photon(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), l("a2")).unwrap();
        assert!((d.norm_sqr() - 1.0).abs() < ALGEBRA_TOL);
        assert!((d.amplitude(&[Polarization::V]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);

        let h = make_single_photon(c(1.0), c(0.0), l("x")).unwrap();
        assert_eq!(
            h,
            PureState::basis(vec![l("x")], &[Polarization::H]).unwrap()
        );
    }

    #[test]
    fn zero_photon_rejected() {
        assert_eq!(
            make_single_photon(c(0.0), c(0.0), l("x")),
            Err(StateError::ZeroNorm)
        );
    }

    #[test]
    fn tensor_concatenates_labels() {
        let h = PureState::basis(vec![l("x")], &[Polarization::H]).unwrap();
        let v = PureState::basis(vec![l("y")], &[Polarization::V]).unwrap();
        let hv = h.tensor(&v).unwrap();
        assert_eq!(hv.labels(), &[l("x"), l("y")]);
        assert_eq!(hv.amplitudes()[0b01], ONE);
        assert_eq!(hv.norm_sqr(), 1.0);
    }

    #[test]
    fn tensor_rejects_overlap() {
        let h = PureState::basis(vec![l("x")], &[Polarization::H]).unwrap();
        assert_eq!(h.tensor(&h), Err(StateError::LabelCollision(l("x"))));
    }

    #[test]
    fn project_basis_states() {
        let hv =
            PureState::basis(vec![l("x"), l("y")], &[Polarization::H, Polarization::V]).unwrap();
        let p = hv.project(&l("x"), &Direction::horizontal()).unwrap();
        assert_eq!(p.probability, 1.0);
        let rest = p.state.unwrap();
        assert_eq!(
            rest,
            PureState::basis(vec![l("y")], &[Polarization::V]).unwrap()
        );

        let q = hv.project(&l("x"), &Direction::vertical()).unwrap();
        assert_eq!(q.probability, 0.0);
        assert!(q.is_empty());
    }

    #[test]
    fn project_last_qubit_leaves_vacuum() {
        let d = make_single_photon(c(1.0), c(1.0), l("q")).unwrap();
        let p = d.project(&l("q"), &Direction::vertical()).unwrap();
        assert!((p.probability - 0.5).abs() < 1e-15);
        let s = p.state.unwrap();
        assert_eq!(s.num_qubits(), 0);
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn project_unknown_label() {
        let d = make_single_photon(c(1.0), c(1.0), l("q")).unwrap();
        assert_eq!(
            d.project(&l("z"), &Direction::horizontal()),
            Err(StateError::UnknownLabel(l("z")))
        );
    }

    #[test]
    fn pauli_x_flips_and_is_involution() {
        let h = PureState::basis(vec![l("x")], &[Polarization::H]).unwrap();
        let v = h
            .apply_one_qubit(&l("x"), &OneQubitGate::pauli_x())
            .unwrap();
        assert_eq!(
            v,
            PureState::basis(vec![l("x")], &[Polarization::V]).unwrap()
        );

        let s = PureState::from_real(vec![l("a"), l("b")], &[0.1, -0.7, 0.3, 0.2]).unwrap();
        let back = s
            .apply_one_qubit(&l("b"), &OneQubitGate::pauli_x())
            .and_then(|t| t.apply_one_qubit(&l("b"), &OneQubitGate::pauli_x()))
            .unwrap();
        assert!(back.max_abs_diff(&s).unwrap() < 1e-15);
    }

    #[test]
    fn non_unitary_gate_rejected() {
        let h = PureState::basis(vec![l("x")], &[Polarization::H]).unwrap();
        let g = OneQubitGate::from_real([[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            h.apply_one_qubit(&l("x"), &g),
            Err(StateError::NonUnitary(_))
        ));
    }

    #[test]
    fn phase_flip_on_last_qubit_fixes_sign_pattern() {
        // amplitudes on |VHH>, |HVH>, |HHV> for (b², b², −c²)
        let (b2, c2) = (0.3_f64, 0.4_f64);
        let labels = vec![l("a1"), l("b1"), l("c1")];
        let mut amps = [0.0; 8];
        amps[0b100] = b2;
        amps[0b010] = b2;
        amps[0b001] = -c2;
        let s = PureState::from_real(labels.clone(), &amps).unwrap();
        let t = s
            .apply_one_qubit(&l("c1"), &OneQubitGate::pauli_z())
            .unwrap();
        amps[0b001] = c2;
        let expected = PureState::from_real(labels, &amps).unwrap();
        assert!(t.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn reduce_product_is_pure() {
        let hh =
            PureState::basis(vec![l("x"), l("y")], &[Polarization::H, Polarization::H]).unwrap();
        let rho = hh.reduce(&[l("x")]).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], ONE);
        assert_eq!(rho.matrix()[(1, 1)], ZERO);
        assert!(rho.is_valid());
    }

    #[test]
    fn reduce_rejects_empty_keep() {
        let hh = PureState::basis(vec![l("x")], &[Polarization::H]).unwrap();
        assert_eq!(hh.reduce(&[]), Err(StateError::EmptyKeep));
    }

    #[test]
    fn reduce_single_w_qubit_spectrum() {
        let (a, b, g) = (0.6_f64, 0.48_f64, 0.64_f64);
        let mut amps = [0.0; 8];
        amps[0b100] = a;
        amps[0b010] = b;
        amps[0b001] = g;
        let s = PureState::from_real(vec![l("a1"), l("b1"), l("c1")], &amps).unwrap();
        let ev = s.reduce(&[l("a1")]).unwrap().eigenvalues();
        assert!((ev[0] - a * a).abs() < ALGEBRA_TOL);
        assert!((ev[1] - (1.0 - a * a)).abs() < ALGEBRA_TOL);
    }

    #[test]
    fn reorder_moves_amplitudes() {
        let hv =
            PureState::basis(vec![l("x"), l("y")], &[Polarization::H, Polarization::V]).unwrap();
        let vh = hv.reorder(&[l("y"), l("x")]).unwrap();
        assert_eq!(vh.amplitude(&[Polarization::V, Polarization::H]), ONE);
    }

    #[test]
    fn orthogonal_direction() {
        let d = Direction::real(0.6, 0.8).unwrap();
        let p = d.orthogonal();
        assert!((p.h - c(0.8)).norm() < 1e-15 && (p.v - c(-0.6)).norm() < 1e-15);
        assert!((d.h.conj() * p.h + d.v.conj() * p.v).norm() < 1e-15);
    }
}
