use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::statevec::ALGEBRA_TOL;

/// Tolerance used when deciding whether two coefficient magnitudes are equal.
pub const PATTERN_TOL: f64 = 1e-9;

/// Coefficients below this magnitude count as zero (the state is then biseparable).
pub const DEGENERATE_TOL: f64 = 1e-150;

/// Coefficient pattern of a W-class state, which decides the next concentration round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    /// No pair of `|a|, |b|` or `|b|, |c|` is equal.
    General,
    /// `|a| = |b|`; concentrated by Charlie alone.
    TwoEqualAB,
    /// `|b| = |c|`; concentrated by Alice alone.
    TwoEqualBC,
    /// `|a| = |b| = |c| = 1/√3`.
    Maximal,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pattern::General => "general",
            Pattern::TwoEqualAB => "two-equal-ab",
            Pattern::TwoEqualBC => "two-equal-bc",
            Pattern::Maximal => "maximal",
        };
        f.write_str(s)
    }
}

/// Real coefficients of `a|VHH⟩ + b|HVH⟩ + c|HHV⟩`, normalized to `a² + b² + c² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WCoefficients {
    #[serde(rename = "alpha")]
    a: f64,
    #[serde(rename = "beta")]
    b: f64,
    #[serde(rename = "gamma")]
    c: f64,
}

impl WCoefficients {
    /// Accepts an already-normalized triple.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, ProtocolError> {
        let n2 = a * a + b * b + c * c;
        if !n2.is_finite() || (n2 - 1.0).abs() > ALGEBRA_TOL {
            return Err(ProtocolError::NotNormalized(n2));
        }
        Ok(WCoefficients { a, b, c })
    }

    /// Scales an arbitrary nonzero triple onto the unit sphere.
    pub fn normalized(a: f64, b: f64, c: f64) -> Result<Self, ProtocolError> {
        let n = (a * a + b * b + c * c).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(ProtocolError::ZeroNorm);
        }
        Ok(WCoefficients {
            a: a / n,
            b: b / n,
            c: c / n,
        })
    }

    /// Infers `β = √(1 − α² − γ²) ≥ 0`.
    pub fn from_alpha_gamma(alpha: f64, gamma: f64) -> Result<Self, ProtocolError> {
        let b2 = 1.0 - alpha * alpha - gamma * gamma;
        if b2 < -ALGEBRA_TOL || !b2.is_finite() {
            return Err(ProtocolError::NotNormalized(alpha * alpha + gamma * gamma));
        }
        Ok(WCoefficients {
            a: alpha,
            b: b2.max(0.0).sqrt(),
            c: gamma,
        })
    }

    /// The maximally entangled W state `(1, 1, 1)/√3`.
    pub fn maximal() -> Self {
        let s = 1.0 / 3f64.sqrt();
        WCoefficients { a: s, b: s, c: s }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn squares(&self) -> (f64, f64, f64) {
        (self.a * self.a, self.b * self.b, self.c * self.c)
    }

    pub fn pattern(&self) -> Pattern {
        let (a, b, c) = (self.a.abs(), self.b.abs(), self.c.abs());
        match ((a - b).abs() <= PATTERN_TOL, (b - c).abs() <= PATTERN_TOL) {
            (true, true) => Pattern::Maximal,
            (true, false) => Pattern::TwoEqualAB,
            (false, true) => Pattern::TwoEqualBC,
            (false, false) => Pattern::General,
        }
    }

    pub fn is_maximal(&self) -> bool {
        self.pattern() == Pattern::Maximal
    }

    /// True when some coefficient vanishes and the state is not genuinely tripartite.
    pub fn is_degenerate(&self) -> bool {
        self.as_array().iter().any(|x| x.abs() < DEGENERATE_TOL)
    }

    /// Removes negative signs with local phase flips.
    ///
    /// A phase flip on photon `k` negates only coefficient `k`, so the
    /// returned mask lists the photons (a1, b1, c1) that receive σz.
    pub fn sign_normalized(&self) -> (WCoefficients, [bool; 3]) {
        let flips = [self.a < 0.0, self.b < 0.0, self.c < 0.0];
        (
            WCoefficients {
                a: self.a.abs(),
                b: self.b.abs(),
                c: self.c.abs(),
            },
            flips,
        )
    }

    /// Exchanges the roles of Alice's and Charlie's photons: `(a, b, c) → (c, b, a)`.
    pub fn mirrored(&self) -> Self {
        WCoefficients {
            a: self.c,
            b: self.b,
            c: self.a,
        }
    }

    /// Largest coefficient difference, allowing an overall sign.
    pub fn distance_up_to_sign(&self, other: &WCoefficients) -> f64 {
        let d = |s: f64| {
            self.as_array()
                .iter()
                .zip(other.as_array())
                .map(|(x, y)| (x - s * y).abs())
                .fold(0.0, f64::max)
        };
        d(1.0).min(d(-1.0))
    }

    pub fn max_abs_diff(&self, other: &WCoefficients) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for WCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}
