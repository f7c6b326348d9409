//! Angles that remember when they are an exact rational multiple of π.
//!
//! The interesting arm lengths are exact multiples of π, where floating
//! point would leave `sin(π) ≈ 1.2e-16`. An [`Angle`] built from the
//! symbolic grammar (`"3pi/2"`) snaps its sines and cosines to exact values
//! whenever the angle is a multiple of π/2.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{QsrError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    radians: f64,
    /// `(num, den)` with `radians == num/den * π`, reduced, `den > 0`.
    pi_ratio: Option<(i64, i64)>,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Angle {
    pub const ZERO: Angle = Angle {
        radians: 0.0,
        pi_ratio: Some((0, 1)),
    };

    pub fn from_radians(radians: f64) -> Self {
        Angle {
            radians,
            pi_ratio: None,
        }
    }

    /// `num/den · π`. Panics if `den == 0`.
    pub fn pi_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator in π fraction");
        let g = gcd(num, den).max(1);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Angle {
            radians: n as f64 / d as f64 * PI,
            pi_ratio: Some((n, d)),
        }
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    pub fn pi_ratio(&self) -> Option<(i64, i64)> {
        self.pi_ratio
    }

    pub fn is_symbolic(&self) -> bool {
        self.pi_ratio.is_some()
    }

    /// `k/n` of this angle, exact when symbolic.
    pub fn scaled(&self, k: i64, n: i64) -> Self {
        match self.pi_ratio {
            Some((num, den)) => match (num.checked_mul(k), den.checked_mul(n)) {
                (Some(a), Some(b)) => Angle::pi_fraction(a, b),
                _ => Angle::from_radians(self.radians * k as f64 / n as f64),
            },
            None => Angle::from_radians(self.radians * k as f64 / n as f64),
        }
    }

    pub fn half(&self) -> Self {
        self.scaled(1, 2)
    }

    pub fn neg(&self) -> Self {
        match self.pi_ratio {
            Some((n, d)) => Angle::pi_fraction(-n, d),
            None => Angle::from_radians(-self.radians),
        }
    }

    /// `(sin, cos)`, exact at multiples of π/2 for symbolic angles.
    pub fn sin_cos(&self) -> (f64, f64) {
        if let Some((n, d)) = self.pi_ratio {
            // angle = (2n/d) · π/2
            if (2 * n) % d == 0 {
                return match (2 * n / d).rem_euclid(4) {
                    0 => (0.0, 1.0),
                    1 => (1.0, 0.0),
                    2 => (0.0, -1.0),
                    _ => (-1.0, 0.0),
                };
            }
        }
        self.radians.sin_cos()
    }

    pub fn sin(&self) -> f64 {
        self.sin_cos().0
    }

    pub fn cos(&self) -> f64 {
        self.sin_cos().1
    }

    /// True when the angle is an integer multiple of π (symbolically, or
    /// within `tol` numerically).
    pub fn is_multiple_of_pi(&self, tol: f64) -> bool {
        match self.pi_ratio {
            Some((_, d)) => d == 1,
            None => {
                let k = self.radians / PI;
                (k - k.round()).abs() < tol
            }
        }
    }

    /// The integer `n` with angle = nπ, if there is one.
    pub fn pi_multiple(&self, tol: f64) -> Option<i64> {
        if !self.is_multiple_of_pi(tol) {
            return None;
        }
        match self.pi_ratio {
            Some((n, _)) => Some(n),
            None => Some((self.radians / PI).round() as i64),
        }
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::from_radians(radians)
    }
}

impl FromStr for Angle {
    type Err = QsrError;

    /// Grammar: `pi`, `-pi`, `2pi`, `3pi/2`, `3*pi/4`, `pi/2`, or a plain
    /// decimal in radians.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.trim().chars().filter(|c| !c.is_whitespace()).collect();
        let err = || QsrError::Parse(format!("invalid angle {s:?}"));
        if t.is_empty() {
            return Err(err());
        }
        let lower = t.to_ascii_lowercase();
        if let Some(idx) = lower.find("pi") {
            let (head, tail) = (&lower[..idx], &lower[idx + 2..]);
            let head = head.strip_suffix('*').unwrap_or(head);
            let num: i64 = match head {
                "" | "+" => 1,
                "-" => -1,
                h => h.parse().map_err(|_| err())?,
            };
            let den: i64 = match tail {
                "" => 1,
                t => t
                    .strip_prefix('/')
                    .ok_or_else(err)?
                    .parse()
                    .map_err(|_| err())?,
            };
            if den <= 0 {
                return Err(err());
            }
            return Ok(Angle::pi_fraction(num, den));
        }
        let v: f64 = lower.parse().map_err(|_| err())?;
        if !v.is_finite() {
            return Err(err());
        }
        if v == 0.0 {
            return Ok(Angle::ZERO);
        }
        Ok(Angle::from_radians(v))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_ratio {
            Some((0, _)) => write!(f, "0"),
            Some((n, d)) => {
                let head = match n {
                    1 => String::new(),
                    -1 => "-".to_string(),
                    n => n.to_string(),
                };
                if d == 1 {
                    write!(f, "{head}pi")
                } else {
                    write!(f, "{head}pi/{d}")
                }
            }
            None => write!(f, "{}", self.radians),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.radians)
    }
}
