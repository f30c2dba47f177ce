//! Exact arithmetic in the dyadic cyclotomic ring `ℤ[1/2][ζ_N]`.
//!
//! Every quantity in the EWL payoff (phases, half-angle sines and cosines,
//! the entangling gate up to an overall 1/2) is a polynomial in roots of
//! unity with power-of-two denominators whenever the angles are rational
//! multiples of π. An element is stored as integer coefficients over the
//! power basis `1, ζ, …, ζ^{φ(N)−1}` reduced modulo the cyclotomic
//! polynomial `Φ_N`, times `2^{-shift}`. That representation is unique for a
//! fixed `N`, which makes equality exact.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;

use crate::angle::{exponent_in, root_order};

#[derive(Clone, Debug)]
pub struct Cyclo {
    order: u32,
    num: Vec<i128>,
    shift: u32,
}

thread_local! {
    static PHI_CACHE: RefCell<HashMap<u32, Rc<Vec<i128>>>> = RefCell::new(HashMap::new());
}

/// Coefficients of `Φ_n`, lowest degree first.
fn cyclotomic_poly(n: u32) -> Rc<Vec<i128>> {
    if let Some(p) = PHI_CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    // Φ_n = (x^n − 1) / ∏_{d | n, d < n} Φ_d
    let mut poly = vec![0i128; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = div_monic(&poly, &cyclotomic_poly(d));
        }
    }
    let poly = Rc::new(poly);
    PHI_CACHE.with(|c| c.borrow_mut().insert(n, poly.clone()));
    poly
}

fn div_monic(num: &[i128], den: &[i128]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i128; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|r| *r == 0), "inexact cyclotomic division");
    quot
}

/// Reduce a polynomial modulo monic `phi` in place, returning `deg(phi)` coefficients.
fn reduce(mut poly: Vec<i128>, phi: &[i128]) -> Vec<i128> {
    let d = phi.len() - 1;
    if poly.len() > d {
        for i in (d..poly.len()).rev() {
            let c = poly[i];
            if c != 0 {
                for (j, p) in phi.iter().enumerate() {
                    poly[i - d + j] -= c * p;
                }
            }
        }
    }
    poly.resize(d, 0);
    poly
}

impl Cyclo {
    fn normalized(order: u32, num: Vec<i128>, mut shift: u32) -> Self {
        let mut num = num;
        if num.iter().all(|c| *c == 0) {
            return Cyclo { order, num, shift: 0 };
        }
        while shift > 0 && num.iter().all(|c| c % 2 == 0) {
            num.iter_mut().for_each(|c| *c /= 2);
            shift -= 1;
        }
        Cyclo { order, num, shift }
    }

    fn from_poly(order: u32, poly: Vec<i128>, shift: u32) -> Self {
        let phi = cyclotomic_poly(order);
        Cyclo::normalized(order, reduce(poly, &phi), shift)
    }

    pub fn zero() -> Self {
        Cyclo { order: 1, num: vec![0], shift: 0 }
    }

    pub fn one() -> Self {
        Cyclo::integer(1)
    }

    pub fn integer(k: i128) -> Self {
        Cyclo::normalized(1, vec![k], 0)
    }

    /// `k / 2^shift`.
    pub fn dyadic(k: i128, shift: u32) -> Self {
        Cyclo::normalized(1, vec![k], shift)
    }

    /// `ζ_order^k`.
    pub fn root_of_unity(order: u32, k: u32) -> Self {
        let k = (k % order) as usize;
        let mut poly = vec![0i128; k + 1];
        poly[k] = 1;
        Cyclo::from_poly(order, poly, 0)
    }

    pub fn imag_unit() -> Self {
        Cyclo::root_of_unity(4, 1)
    }

    /// `e^{iπr}`.
    pub fn expi_pi(r: Rational64) -> Self {
        let order = root_order(r);
        Cyclo::root_of_unity(order, exponent_in(r, order))
    }

    /// `cos(πr)`, real.
    pub fn cos_pi(r: Rational64) -> Self {
        (Cyclo::expi_pi(r) + Cyclo::expi_pi(-r)).half()
    }

    /// `sin(πr)`, real.
    pub fn sin_pi(r: Rational64) -> Self {
        // (z − z̄)/(2i) = −i(z − z̄)/2
        let diff = Cyclo::expi_pi(r) - Cyclo::expi_pi(-r);
        (-(Cyclo::imag_unit() * diff)).half()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0)
    }

    pub fn half(&self) -> Self {
        Cyclo::normalized(self.order, self.num.clone(), self.shift + 1)
    }

    /// Complex conjugate (ζ ↦ ζ⁻¹).
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut poly = vec![0i128; n];
        for (k, c) in self.num.iter().enumerate() {
            poly[(n - k) % n] += c;
        }
        Cyclo::from_poly(self.order, poly, self.shift)
    }

    /// Re-express in `Q(ζ_target)`; `target` must be a multiple of the current order.
    pub fn lift(&self, target: u32) -> Self {
        if target == self.order {
            return self.clone();
        }
        assert!(target.is_multiple_of(self.order), "cannot lift order {} to {target}", self.order);
        let m = (target / self.order) as usize;
        let mut poly = vec![0i128; (self.num.len().max(1) - 1) * m + 1];
        for (k, c) in self.num.iter().enumerate() {
            poly[k * m] = *c;
        }
        Cyclo::from_poly(target, poly, self.shift)
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let n = a.order.lcm(&b.order);
        (a.lift(n), b.lift(n))
    }

    fn add_signed(a: &Cyclo, b: &Cyclo, sign: i128) -> Cyclo {
        let (a, b) = Cyclo::common(a, b);
        let shift = a.shift.max(b.shift);
        let sa = 1i128 << (shift - a.shift);
        let sb = 1i128 << (shift - b.shift);
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * sa + sign * y * sb)
            .collect();
        Cyclo::normalized(a.order, num, shift)
    }

    /// The rational value, if this element lies in ℚ.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).any(|c| *c != 0) {
            return None;
        }
        let n = BigInt::from(self.num.first().copied().unwrap_or(0));
        let d = BigInt::from(1) << self.shift;
        Some(BigRational::new(n, d))
    }

    /// Real part as a float.
    pub fn re_f64(&self) -> f64 {
        let n = f64::from(self.order);
        let scale = (-f64::from(self.shift)).exp2();
        self.num
            .iter()
            .enumerate()
            .map(|(k, c)| *c as f64 * (2.0 * std::f64::consts::PI * k as f64 / n).cos())
            .sum::<f64>()
            * scale
    }

    /// Imaginary part as a float.
    pub fn im_f64(&self) -> f64 {
        let n = f64::from(self.order);
        let scale = (-f64::from(self.shift)).exp2();
        self.num
            .iter()
            .enumerate()
            .map(|(k, c)| *c as f64 * (2.0 * std::f64::consts::PI * k as f64 / n).sin())
            .sum::<f64>()
            * scale
    }

    /// `self · conj(self)` = |self|².
    pub fn abs2(&self) -> Cyclo {
        self * &self.conj()
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Cyclo::common(self, other);
        a.shift == b.shift && a.num == b.num
    }
}

impl Eq for Cyclo {}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        Cyclo::add_signed(self, rhs, 1)
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        Cyclo::add_signed(self, rhs, -1)
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::common(self, rhs);
        if a.is_zero() || b.is_zero() {
            return Cyclo { order: a.order, num: vec![0; a.num.len()], shift: 0 };
        }
        let mut poly = vec![0i128; a.num.len() + b.num.len() - 1];
        for (i, x) in a.num.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        Cyclo::from_poly(a.order, poly, a.shift + b.shift)
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { order: self.order, num: self.num.iter().map(|c| -c).collect(), shift: self.shift }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyclo {
            type Output = Cyclo;
            fn $m(self, rhs: Cyclo) -> Cyclo {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -(&self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{r}");
        }
        let terms: Vec<String> = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| format!("{c}·ζ{}^{k}", self.order))
            .collect();
        write!(f, "({})/2^{}", terms.join(" + "), self.shift)
    }
}

impl Zero for Cyclo {
    fn zero() -> Self {
        Cyclo::zero()
    }
    fn is_zero(&self) -> bool {
        Cyclo::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        // Φ_12 = x^4 − x^2 + 1
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(24).len() - 1, 8);
    }

    #[test]
    fn unit_circle_identities() {
        for k in 0..48 {
            let a = r(k, 12);
            let c = Cyclo::cos_pi(a);
            let s = Cyclo::sin_pi(a);
            assert_eq!(&(&c * &c) + &(&s * &s), Cyclo::one(), "angle {a}");
            let x = *a.numer() as f64 / *a.denom() as f64 * std::f64::consts::PI;
            assert!((c.re_f64() - x.cos()).abs() < 1e-12);
            assert!((s.re_f64() - x.sin()).abs() < 1e-12);
            assert!(c.im_f64().abs() < 1e-12);
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(Cyclo::cos_pi(r(1, 3)).to_rational(), Some(BigRational::new(1.into(), 2.into())));
        assert_eq!(Cyclo::sin_pi(r(1, 2)), Cyclo::one());
        assert_eq!(Cyclo::cos_pi(r(1, 1)), Cyclo::integer(-1));
        let sqrt2_half = Cyclo::cos_pi(r(1, 4));
        assert!(sqrt2_half.to_rational().is_none());
        assert_eq!((&sqrt2_half * &sqrt2_half).to_rational(), Some(BigRational::new(1.into(), 2.into())));
        let i = Cyclo::imag_unit();
        assert_eq!(&i * &i, Cyclo::integer(-1));
        assert_eq!(i.conj(), -&i);
    }

    #[test]
    fn lifting_preserves_value() {
        let z = Cyclo::expi_pi(r(1, 4));
        let lifted = z.lift(24);
        assert_eq!(z, lifted);
        assert!((z.re_f64() - lifted.re_f64()).abs() < 1e-12);
        assert!((z.im_f64() - lifted.im_f64()).abs() < 1e-12);
    }
}
