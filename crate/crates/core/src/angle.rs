//! Angles as exact rational multiples of π, with a radian fallback.
//!
//! Every discrete solution of the invariance criterion sits on a rational
//! multiple of π, so the exact form is the one used throughout enumeration.
//! Float angles are accepted everywhere but only support float evaluation.

use std::f64::consts::PI;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance used for congruence tests on float angles.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub enum Angle {
    /// `r·π` for an exact rational `r`.
    Pi(Rational64),
    /// A plain value in radians.
    Radians(f64),
}

impl Angle {
    pub fn zero() -> Self {
        Angle::Pi(Rational64::zero())
    }

    pub fn pi() -> Self {
        Angle::Pi(Rational64::one())
    }

    /// `num/den · π`.
    pub fn pi_frac(num: i64, den: i64) -> Self {
        Angle::Pi(Rational64::new(num, den))
    }

    pub fn radians(x: f64) -> Self {
        Angle::Radians(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Pi(_))
    }

    /// The coefficient of π, if exact.
    pub fn pi_multiple(&self) -> Option<Rational64> {
        match self {
            Angle::Pi(r) => Some(*r),
            Angle::Radians(_) => None,
        }
    }

    pub fn to_radians(&self) -> f64 {
        match self {
            Angle::Pi(r) => r.to_f64().unwrap_or(f64::NAN) * PI,
            Angle::Radians(x) => *x,
        }
    }

    pub fn half(&self) -> Self {
        self.scale(Rational64::new(1, 2))
    }

    pub fn scale(&self, k: Rational64) -> Self {
        match self {
            Angle::Pi(r) => Angle::Pi(r * k),
            Angle::Radians(x) => Angle::Radians(x * k.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Reduce into `[0, 2π)`.
    pub fn mod_two_pi(&self) -> Self {
        match self {
            Angle::Pi(r) => {
                let two = Rational64::from_integer(2);
                Angle::Pi(r - two * (r / two).floor())
            }
            Angle::Radians(x) => {
                let mut y = x.rem_euclid(2.0 * PI);
                // rem_euclid can round up to exactly 2π for tiny negative inputs
                if y >= 2.0 * PI {
                    y = 0.0;
                }
                Angle::Radians(y)
            }
        }
    }

    /// True when `self − target` is an integer multiple of `modulus`.
    pub fn congruent(&self, target: Angle, modulus: Angle) -> bool {
        match (self, target, modulus) {
            (Angle::Pi(a), Angle::Pi(b), Angle::Pi(m)) => {
                if m.is_zero() {
                    return a == &b;
                }
                ((a - b) / m).is_integer()
            }
            _ => {
                let m = modulus.to_radians();
                let q = (self.to_radians() - target.to_radians()) / m;
                (q - q.round()).abs() * m.abs() < ANGLE_TOL
            }
        }
    }

    /// Equality as angles modulo 2π.
    pub fn same_mod_two_pi(&self, other: Angle) -> bool {
        self.congruent(other, Angle::Pi(Rational64::from_integer(2)))
    }

    /// Value equality (exact when both are exact, tolerance otherwise).
    pub fn value_eq(&self, other: Angle) -> bool {
        match (self, other) {
            (Angle::Pi(a), Angle::Pi(b)) => *a == b,
            _ => (self.to_radians() - other.to_radians()).abs() < ANGLE_TOL,
        }
    }

    /// Strictly inside `(lo, hi)`.
    pub fn strictly_between(&self, lo: Angle, hi: Angle) -> bool {
        match (self, lo, hi) {
            (Angle::Pi(x), Angle::Pi(l), Angle::Pi(h)) => *x > l && *x < h,
            _ => {
                let x = self.to_radians();
                x > lo.to_radians() && x < hi.to_radians()
            }
        }
    }

    /// Inside `[lo, hi]` (float angles get `ANGLE_TOL` slack).
    pub fn within(&self, lo: Angle, hi: Angle) -> bool {
        match (self, lo, hi) {
            (Angle::Pi(x), Angle::Pi(l), Angle::Pi(h)) => *x >= l && *x <= h,
            _ => {
                let x = self.to_radians();
                x >= lo.to_radians() - ANGLE_TOL && x <= hi.to_radians() + ANGLE_TOL
            }
        }
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Pi(a), Angle::Pi(b)) => Angle::Pi(a + b),
            (a, b) => Angle::Radians(a.to_radians() + b.to_radians()),
        }
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        match self {
            Angle::Pi(a) => Angle::Pi(-a),
            Angle::Radians(x) => Angle::Radians(-x),
        }
    }
}

// Structural equality: an exact angle never equals a float one. Use
// `value_eq` for numeric comparison.
impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Angle::Pi(a), Angle::Pi(b)) => a == b,
            (Angle::Radians(a), Angle::Radians(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Angle {}

impl Hash for Angle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Angle::Pi(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Angle::Radians(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Pi(r) => {
                if r.is_zero() {
                    write!(f, "0")
                } else if r.is_integer() {
                    match *r.numer() {
                        1 => write!(f, "pi"),
                        -1 => write!(f, "-pi"),
                        n => write!(f, "{n} pi"),
                    }
                } else {
                    write!(f, "{}/{} pi", r.numer(), r.denom())
                }
            }
            Angle::Radians(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// Accepts `"k/m pi"`, `"k pi"`, `"pi"`, `"-pi/4"`, `"0"` (exact) or a
    /// plain decimal number of radians.
    fn from_str(s: &str) -> Result<Self> {
        let raw = s.trim();
        let lower = raw.to_ascii_lowercase();
        if let Some(pos) = lower.find("pi").or_else(|| lower.find('π')) {
            let token_len = if lower[pos..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
            let before = lower[..pos].trim().trim_end_matches('*').trim();
            let after = lower[pos + token_len..].trim();
            let mut coeff = match before {
                "" | "+" => Rational64::one(),
                "-" => -Rational64::one(),
                b => parse_rational(b).ok_or_else(|| Error::parse(format!("bad angle {raw:?}")))?,
            };
            if !after.is_empty() {
                let den = after
                    .strip_prefix('/')
                    .and_then(|d| d.trim().parse::<i64>().ok())
                    .filter(|d| *d != 0)
                    .ok_or_else(|| Error::parse(format!("bad angle {raw:?}")))?;
                coeff /= Rational64::from_integer(den);
            }
            return Ok(Angle::Pi(coeff));
        }
        if raw.parse::<i64>().ok() == Some(0) {
            return Ok(Angle::zero());
        }
        raw.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Angle::Radians)
            .ok_or_else(|| Error::parse(format!("bad angle {raw:?}")))
    }
}

fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse::<i64>().ok()?;
            let d = d.trim().parse::<i64>().ok()?;
            (d != 0).then(|| Rational64::new(n, d))
        }
        None => s.parse::<i64>().ok().map(Rational64::from_integer),
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Angle::Pi(_) => serializer.serialize_str(&self.to_string()),
            Angle::Radians(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            serde_json::Value::Number(n) => {
                if n.as_i64() == Some(0) {
                    Ok(Angle::zero())
                } else {
                    n.as_f64()
                        .map(Angle::Radians)
                        .ok_or_else(|| D::Error::custom("angle out of range"))
                }
            }
            other => Err(D::Error::custom(format!("expected angle, got {other}"))),
        }
    }
}

/// Smallest `n` such that `e^{i·angle}` is an `n`-th root of unity.
pub(crate) fn root_order(r: Rational64) -> u32 {
    // e^{iπ p/q} = ζ_{2q}^p
    let q = r.denom().abs();
    u32::try_from(2 * q).expect("angle denominator too large for exact arithmetic")
}

pub(crate) fn exponent_in(r: Rational64, order: u32) -> u32 {
    // e^{iπ p/q} = ζ_order^{p·order/(2q)}
    let n = i64::from(order);
    let k = r * Rational64::from_integer(n) / Rational64::from_integer(2);
    debug_assert!(k.is_integer(), "order {order} does not contain angle {r}");
    u32::try_from(k.to_integer().rem_euclid(n)).expect("exponent fits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_forms() {
        assert_eq!("1/2 pi".parse::<Angle>().unwrap(), Angle::pi_frac(1, 2));
        assert_eq!("pi".parse::<Angle>().unwrap(), Angle::pi());
        assert_eq!("-pi/4".parse::<Angle>().unwrap(), Angle::pi_frac(-1, 4));
        assert_eq!("3pi/2".parse::<Angle>().unwrap(), Angle::pi_frac(3, 2));
        assert_eq!("7/2 π".parse::<Angle>().unwrap(), Angle::pi_frac(7, 2));
        assert_eq!("0".parse::<Angle>().unwrap(), Angle::zero());
        assert_eq!("0.5".parse::<Angle>().unwrap(), Angle::Radians(0.5));
        assert!("1/0 pi".parse::<Angle>().is_err());
        assert!("abc".parse::<Angle>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for a in [
            Angle::zero(),
            Angle::pi(),
            Angle::pi_frac(-1, 1),
            Angle::pi_frac(3, 4),
            Angle::pi_frac(5, 1),
            Angle::Radians(1.25),
        ] {
            assert_eq!(a.to_string().parse::<Angle>().unwrap(), a);
        }
        assert_eq!(Angle::pi_frac(3, 2).to_string(), "3/2 pi");
    }

    #[test]
    fn reduction_mod_two_pi() {
        assert_eq!(Angle::pi_frac(7, 2).mod_two_pi(), Angle::pi_frac(3, 2));
        assert_eq!(Angle::pi_frac(-1, 2).mod_two_pi(), Angle::pi_frac(3, 2));
        assert_eq!(Angle::pi_frac(2, 1).mod_two_pi(), Angle::zero());
        let r = Angle::Radians(-1e-18).mod_two_pi().to_radians();
        assert!((0.0..2.0 * PI).contains(&r));
    }

    #[test]
    fn congruences() {
        let q = Angle::pi_frac(1, 4);
        assert!(Angle::pi_frac(5, 4).congruent(q, Angle::pi()));
        assert!(!Angle::pi_frac(3, 4).congruent(q, Angle::pi()));
        assert!(Angle::Radians(5.0 * PI / 4.0).congruent(q, Angle::pi()));
    }

    #[test]
    fn exponent_lookup() {
        // e^{iπ/2} = i = ζ_8^2
        assert_eq!(exponent_in(Rational64::new(1, 2), 8), 2);
        assert_eq!(exponent_in(Rational64::new(-1, 2), 8), 6);
        assert_eq!(root_order(Rational64::new(1, 3)), 6);
    }
}
