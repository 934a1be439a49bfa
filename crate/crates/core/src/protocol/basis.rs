use super::{modes, ProtocolError, WCoefficients};
use crate::statevec::{Direction, QubitLabel};

/// A real rotated measurement basis `{cos|H⟩ + sin|V⟩, sin|H⟩ − cos|V⟩}` on one ancilla.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasBasis {
    pub cos_component: f64,
    pub sin_component: f64,
    pub target: QubitLabel,
}

impl MeasBasis {
    fn from_pair(
        x: f64,
        y: f64,
        target: QubitLabel,
        what: &'static str,
    ) -> Result<Self, ProtocolError> {
        let n = (x * x + y * y).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(ProtocolError::Degenerate(what));
        }
        Ok(MeasBasis {
            cos_component: x / n,
            sin_component: y / n,
            target,
        })
    }

    pub fn direction(&self) -> Direction {
        Direction::real(self.cos_component, self.sin_component).expect("unit vector")
    }

    pub fn orthogonal(&self) -> Direction {
        self.direction().orthogonal()
    }
}

/// Alice's ancilla basis: `(cos, sin) ∝ (a, b)` on `a2`.
pub fn alice_basis(w: &WCoefficients) -> Result<MeasBasis, ProtocolError> {
    MeasBasis::from_pair(w.a(), w.b(), modes::A2, "alice basis needs a or b nonzero")
}

/// Charlie's ancilla basis: `(cos, sin) ∝ (c, b)` on `c2`.
pub fn charlie_basis(w: &WCoefficients) -> Result<MeasBasis, ProtocolError> {
    MeasBasis::from_pair(
        w.c(),
        w.b(),
        modes::C2,
        "charlie basis needs b or c nonzero",
    )
}
