//! Payoff scalars: exact rationals or `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::angle::Angle;
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Absolute tolerance used by float comparisons (equilibrium residuals,
/// payoff equality in isomorphism search).
pub const FLOAT_TOL: f64 = 1e-9;

/// Arithmetic mode selected at the API/CLI boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::parse(format!("unknown arithmetic mode {other:?}"))),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    /// Equality: exact for rationals, within `FLOAT_TOL` for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    fn is_negligible(&self) -> bool {
        self.approx_eq(&Self::zero())
    }

    /// Strictly greater than zero beyond tolerance.
    fn is_positive_tol(&self) -> bool;

    fn abs_value(&self) -> Self;

    fn to_f64(&self) -> f64;

    fn from_cyclo(c: &Cyclo) -> Result<Self>;

    fn from_int(k: i64) -> Self;

    /// Exact binary value of a float (rationals) or the float itself.
    fn from_float(x: f64) -> Self;

    /// Parse from a JSON value: exact strings (`"3"`, `"17/8"`, `"2.5"`) or numbers.
    fn from_json(v: &Value) -> Result<Self>;

    fn to_json(&self) -> Value;

    /// `cos²(x)`, exact when possible.
    fn cos_sq(x: Angle) -> Result<Self>;
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_positive_tol(&self) -> bool {
        self.is_positive()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_cyclo(c: &Cyclo) -> Result<Self> {
        c.to_rational().ok_or_else(|| Error::NotRational(c.to_string()))
    }

    fn from_int(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }

    fn from_float(x: f64) -> Self {
        BigRational::from_f64(x).unwrap_or_else(BigRational::zero)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_exact(s),
            Value::Number(n) => match n.as_i64() {
                Some(k) => Ok(Self::from_int(k)),
                None => Err(Error::NotExact(format!(
                    "rational payoffs; got float {n} (quote it as a string or use float mode)"
                ))),
            },
            other => Err(Error::parse(format!("expected number, got {other}"))),
        }
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn cos_sq(x: Angle) -> Result<Self> {
        let r = x
            .pi_multiple()
            .ok_or_else(|| Error::NotExact(format!("an exact angle, got {x}")))?;
        let c = Cyclo::cos_pi(r);
        Self::from_cyclo(&(&c * &c))
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOL
    }

    fn is_positive_tol(&self) -> bool {
        *self > FLOAT_TOL
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_cyclo(c: &Cyclo) -> Result<Self> {
        Ok(c.re_f64())
    }

    fn from_int(k: i64) -> Self {
        k as f64
    }

    fn from_float(x: f64) -> Self {
        x
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_exact(s).map(|r| Scalar::to_f64(&r)).or_else(|_| {
                s.trim().parse::<f64>().map_err(|_| Error::parse(format!("bad number {s:?}")))
            }),
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::parse(format!("bad number {n}"))),
            other => Err(Error::parse(format!("expected number, got {other}"))),
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }

    fn cos_sq(x: Angle) -> Result<Self> {
        let c = x.to_radians().cos();
        Ok(c * c)
    }
}

/// Parse `"17/8"`, `"-3"` or a finite decimal such as `"2.375"` exactly.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse(format!("bad exact number {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            i => i.parse().map_err(|_| bad())?,
        };
        let frac_val: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = BigRational::new(int.abs() * &scale + frac_val, scale);
        return Ok(if negative { -mag } else { mag });
    }
    s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

/// Convert a float to the nearest-representable rational (binary expansion, exact).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_f64(x)
}
