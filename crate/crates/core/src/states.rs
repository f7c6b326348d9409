//! Bell-family initial states with real, non-negative weights.
//!
//! - Φ: `√p0|00⟩ ± √p1|11⟩`
//! - Ψ: `±√p0|10⟩ + √p1|01⟩`

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{QsrError, Result};
use crate::spinalg::{Cplx, Vec4};

/// Tolerance used to classify entanglement strength.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BellKind {
    Phi,
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementClass {
    None,
    Maximal,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellFamilyState {
    pub kind: BellKind,
    pub sign: Sign,
    p0: f64,
}

impl BellFamilyState {
    pub fn new(kind: BellKind, sign: Sign, p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(QsrError::ProbabilityOutOfRange(p0));
        }
        Ok(BellFamilyState { kind, sign, p0 })
    }

    pub fn phi(sign: Sign, p0: f64) -> Result<Self> {
        Self::new(BellKind::Phi, sign, p0)
    }

    pub fn psi(sign: Sign, p0: f64) -> Result<Self> {
        Self::new(BellKind::Psi, sign, p0)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        1.0 - self.p0
    }

    /// The two basis kets carrying weights p0 and p1, as `(a, b)` pairs.
    pub fn components(&self) -> [(usize, usize); 2] {
        match self.kind {
            BellKind::Phi => [(0, 0), (1, 1)],
            BellKind::Psi => [(1, 0), (0, 1)],
        }
    }

    pub fn vector(&self) -> Vec4 {
        let a0 = Cplx::new(self.p0.sqrt(), 0.0);
        let a1 = Cplx::new(self.p1().sqrt(), 0.0);
        let s = self.sign.value();
        let [(i0, j0), (i1, j1)] = self.components();
        let mut v = Vec4::zeros();
        match self.kind {
            BellKind::Phi => {
                v.0[2 * i0 + j0] = a0;
                v.0[2 * i1 + j1] = a1 * s;
            }
            BellKind::Psi => {
                v.0[2 * i0 + j0] = a0 * s;
                v.0[2 * i1 + j1] = a1;
            }
        }
        v
    }

    pub fn entanglement_strength(&self) -> f64 {
        entanglement_strength(self)
    }

    pub fn entanglement_class(&self) -> EntanglementClass {
        let p0 = self.p0;
        if p0 == 0.0 || p0 == 1.0 || p0 < CLASSIFY_TOL || 1.0 - p0 < CLASSIFY_TOL {
            EntanglementClass::None
        } else if p0 == 0.5 || (p0 - 0.5).abs() < CLASSIFY_TOL {
            EntanglementClass::Maximal
        } else {
            EntanglementClass::Partial
        }
    }
}

/// Unit-norm amplitudes of a Bell-family state in the fixed basis.
pub fn make_state(kind: BellKind, sign: Sign, p0: f64) -> Result<Vec4> {
    Ok(BellFamilyState::new(kind, sign, p0)?.vector())
}

/// Concurrence `2√(p0·p1)`.
pub fn entanglement_strength(state: &BellFamilyState) -> f64 {
    (2.0 * (state.p0() * state.p1()).sqrt()).clamp(0.0, 1.0)
}

impl FromStr for BellFamilyState {
    type Err = QsrError;

    /// `phi+:p0=0.5`, `psi-:p0=1`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |why: &str| QsrError::Parse(format!("invalid state {s:?}: {why}"));
        let t = s.trim().to_ascii_lowercase();
        let (head, tail) = t
            .split_once(':')
            .ok_or_else(|| err("expected <phi|psi><+|->:p0=<value>"))?;
        let mut chars = head.trim().chars();
        let last = chars.next_back();
        let kind = match chars.as_str() {
            "phi" => BellKind::Phi,
            "psi" => BellKind::Psi,
            _ => return Err(err("family must be phi or psi")),
        };
        let sign = match last {
            Some('+') => Sign::Plus,
            Some('-') => Sign::Minus,
            _ => return Err(err("missing sign")),
        };
        let value = tail
            .trim()
            .strip_prefix("p0=")
            .ok_or_else(|| err("expected p0=<value>"))?;
        let p0: f64 = value
            .trim()
            .parse()
            .map_err(|_| err("p0 is not a number"))?;
        BellFamilyState::new(kind, sign, p0)
    }
}

impl fmt::Display for BellFamilyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            BellKind::Phi => "phi",
            BellKind::Psi => "psi",
        };
        write!(f, "{kind}{}:p0={}", self.sign.symbol(), self.p0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinalg::inner;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn product_state() {
        assert_eq!(
            make_state(BellKind::Phi, Sign::Plus, 1.0).unwrap(),
            Vec4::basis(0, 0)
        );
    }

    #[test]
    fn maximal_psi_states() {
        let plus = make_state(BellKind::Psi, Sign::Plus, 0.5).unwrap();
        let minus = make_state(BellKind::Psi, Sign::Minus, 0.5).unwrap();
        let c = |x: f64| Cplx::new(x, 0.0);
        for (v, s) in [(plus, 1.0), (minus, -1.0)] {
            assert!((v.0[2] - c(s * R)).norm() < 1e-15);
            assert!((v.0[1] - c(R)).norm() < 1e-15);
            assert_eq!(v.0[0], c(0.0));
            assert_eq!(v.0[3], c(0.0));
            assert!((inner(&v, &v).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_range_enforced() {
        for p0 in [-0.1, 1.0001, f64::NAN] {
            assert!(matches!(
                make_state(BellKind::Phi, Sign::Plus, p0),
                Err(QsrError::ProbabilityOutOfRange(_))
            ));
        }
    }

    #[test]
    fn concurrence_values() {
        let s = |p0| {
            BellFamilyState::psi(Sign::Plus, p0)
                .unwrap()
                .entanglement_strength()
        };
        assert_eq!(s(0.0), 0.0);
        assert!((s(0.5) - 1.0).abs() < 1e-15);
        assert!((s(0.25) - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn classification() {
        let c = |p0| {
            BellFamilyState::phi(Sign::Plus, p0)
                .unwrap()
                .entanglement_class()
        };
        assert_eq!(c(0.0), EntanglementClass::None);
        assert_eq!(c(1.0), EntanglementClass::None);
        assert_eq!(c(0.5), EntanglementClass::Maximal);
        assert_eq!(c(0.5 + 1e-13), EntanglementClass::Maximal);
        assert_eq!(c(0.25), EntanglementClass::Partial);
    }

    #[test]
    fn parses_state_grammar() {
        let s: BellFamilyState = "phi+:p0=0.3".parse().unwrap();
        assert_eq!((s.kind, s.sign, s.p0()), (BellKind::Phi, Sign::Plus, 0.3));
        let s: BellFamilyState = "PSI-:p0=1".parse().unwrap();
        assert_eq!((s.kind, s.sign, s.p0()), (BellKind::Psi, Sign::Minus, 1.0));
        assert_eq!(s.to_string(), "psi-:p0=1");
        for bad in [
            "phi:p0=0.5",
            "chi+:p0=0.5",
            "psi+",
            "psi+:q=0.5",
            "psi+:p0=x",
        ] {
            assert!(
                matches!(bad.parse::<BellFamilyState>(), Err(QsrError::Parse(_))),
                "{bad}"
            );
        }
        assert!(matches!(
            "psi+:p0=1.5".parse::<BellFamilyState>(),
            Err(QsrError::ProbabilityOutOfRange(_))
        ));
    }
}
