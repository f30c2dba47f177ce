//! EWL payoffs for 2×2 games, computed two independent ways.
//!
//! The closed form expands `|⟨ij|Ψ⟩|²` into four squared real amplitudes of
//! trigonometric terms. The oracle builds `|Ψ⟩ = J†(U₁⊗U₂)J|00⟩` as a
//! four-component state and reads the diagonal measurement off it. Both
//! paths exist in float and exact (cyclotomic) arithmetic.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::angle::Angle;
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::scalar::{Mode, Rational, Scalar};
use crate::su2::StrategyParams;

/// A pair of payoffs `(u₁, u₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffPair<T> {
    pub u1: T,
    pub u2: T,
}

impl<T: Scalar> PayoffPair<T> {
    pub fn new(u1: T, u2: T) -> Self {
        PayoffPair { u1, u2 }
    }

    pub fn zero() -> Self {
        PayoffPair { u1: T::zero(), u2: T::zero() }
    }

    pub fn scaled(&self, k: &T) -> Self {
        PayoffPair { u1: self.u1.clone() * k.clone(), u2: self.u2.clone() * k.clone() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        PayoffPair { u1: self.u1.clone() + other.u1.clone(), u2: self.u2.clone() + other.u2.clone() }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.u1.approx_eq(&other.u1) && self.u2.approx_eq(&other.u2)
    }

    /// Payoff of player `1` or `2`.
    pub fn get(&self, player: usize) -> &T {
        if player == 1 {
            &self.u1
        } else {
            &self.u2
        }
    }

    pub fn to_json(&self) -> Value {
        json!([self.u1.to_json(), self.u2.to_json()])
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok(PayoffPair { u1: T::from_json(a)?, u2: T::from_json(b)? }),
            _ => Err(Error::parse(format!("expected payoff pair [u1, u2], got {v}"))),
        }
    }

    pub fn to_f64(&self) -> PayoffPair<f64> {
        PayoffPair { u1: self.u1.to_f64(), u2: self.u2.to_f64() }
    }
}

impl<T: fmt::Display> fmt::Display for PayoffPair<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u1, self.u2)
    }
}

/// The classical 2×2 bimatrix `[[Δ₀₀, Δ₀₁], [Δ₁₀, Δ₁₁]]`, `Δᵢⱼ = (aᵢⱼ, bᵢⱼ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bimatrix2<T> {
    pub delta: [[PayoffPair<T>; 2]; 2],
}

impl<T: Scalar> Bimatrix2<T> {
    pub fn new(delta: [[PayoffPair<T>; 2]; 2]) -> Self {
        Bimatrix2 { delta }
    }

    /// Build from the row player's matrix `a` and the column player's matrix `b`.
    pub fn from_matrices(a: [[T; 2]; 2], b: [[T; 2]; 2]) -> Self {
        let [[a00, a01], [a10, a11]] = a;
        let [[b00, b01], [b10, b11]] = b;
        Bimatrix2 {
            delta: [
                [PayoffPair::new(a00, b00), PayoffPair::new(a01, b01)],
                [PayoffPair::new(a10, b10), PayoffPair::new(a11, b11)],
            ],
        }
    }

    pub fn from_ints(v: [[(i64, i64); 2]; 2]) -> Self {
        let p = |(a, b): (i64, i64)| PayoffPair::new(T::from_int(a), T::from_int(b));
        Bimatrix2 { delta: [[p(v[0][0]), p(v[0][1])], [p(v[1][0]), p(v[1][1])]] }
    }

    /// `[[(3,3),(0,5)],[(5,0),(1,1)]]`.
    pub fn prisoners_dilemma() -> Self {
        Self::from_ints([[(3, 3), (0, 5)], [(5, 0), (1, 1)]])
    }

    /// `Δ₀₀, Δ₀₁, Δ₁₀, Δ₁₁` in order.
    pub fn entries(&self) -> [&PayoffPair<T>; 4] {
        [&self.delta[0][0], &self.delta[0][1], &self.delta[1][0], &self.delta[1][1]]
    }

    /// `Σ c_k Δ_k`.
    pub fn combine(&self, c: &[T; 4]) -> PayoffPair<T> {
        self.entries()
            .iter()
            .zip(c)
            .fold(PayoffPair::zero(), |acc, (d, k)| acc.plus(&d.scaled(k)))
    }

    /// Largest absolute payoff over both players.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for d in self.entries() {
            for v in [&d.u1, &d.u2] {
                let a = v.abs_value();
                if a > m {
                    m = a;
                }
            }
        }
        m
    }

    pub fn to_json(&self) -> Value {
        json!({
            "payoffs": [
                [self.delta[0][0].to_json(), self.delta[0][1].to_json()],
                [self.delta[1][0].to_json(), self.delta[1][1].to_json()],
            ]
        })
    }

    /// Parse `{"payoffs": [[[a00,b00],[a01,b01]],[[a10,b10],[a11,b11]]]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .get("payoffs")
            .and_then(Value::as_array)
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::parse("game must have a 2-row \"payoffs\" array"))?;
        let mut cells = Vec::with_capacity(4);
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == 2)
                .ok_or_else(|| Error::parse("each payoff row must have 2 entries"))?;
            for cell in row {
                cells.push(PayoffPair::from_json(cell)?);
            }
        }
        let mut it = cells.into_iter();
        let mut next = || it.next().expect("four cells");
        Ok(Bimatrix2 { delta: [[next(), next()], [next(), next()]] })
    }

    pub fn to_f64(&self) -> Bimatrix2<f64> {
        Bimatrix2 {
            delta: [
                [self.delta[0][0].to_f64(), self.delta[0][1].to_f64()],
                [self.delta[1][0].to_f64(), self.delta[1][1].to_f64()],
            ],
        }
    }
}

impl Bimatrix2<Rational> {
    /// Parse in exact mode; fails on float entries.
    pub fn from_json_exact(v: &Value) -> Result<Self> {
        Self::from_json(v)
    }
}

/// Squared amplitudes on `Δ₀₀, Δ₀₁, Δ₁₀, Δ₁₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientVector(pub [f64; 4]);

impl CoefficientVector {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &CoefficientVector) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub(crate) trait TrigRing: Sized {
    fn cos(a: Angle) -> Result<Self>;
    fn sin(a: Angle) -> Result<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Zero exactly, or within `FLOAT_TOL` for floats.
    fn vanishes(&self) -> bool;
}

impl TrigRing for f64 {
    fn cos(a: Angle) -> Result<Self> {
        Ok(a.to_radians().cos())
    }
    fn sin(a: Angle) -> Result<Self> {
        Ok(a.to_radians().sin())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn vanishes(&self) -> bool {
        self.abs() <= crate::scalar::FLOAT_TOL
    }
}

fn exact_angle(a: Angle) -> Result<Rational64> {
    a.pi_multiple()
        .ok_or_else(|| Error::NotExact(format!("angles that are rational multiples of pi, got {a}")))
}

impl TrigRing for Cyclo {
    fn cos(a: Angle) -> Result<Self> {
        Ok(Cyclo::cos_pi(exact_angle(a)?))
    }
    fn sin(a: Angle) -> Result<Self> {
        Ok(Cyclo::sin_pi(exact_angle(a)?))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

fn closed_form<R: TrigRing>(p1: &StrategyParams, p2: &StrategyParams) -> Result<[R; 4]> {
    let (c1, s1) = (R::cos(p1.theta.half())?, R::sin(p1.theta.half())?);
    let (c2, s2) = (R::cos(p2.theta.half())?, R::sin(p2.theta.half())?);
    let (a1, b1, a2, b2) = (p1.alpha, p1.beta, p2.alpha, p2.beta);
    let cc = c1.mul(&c2);
    let ss = s1.mul(&s2);
    let cs = c1.mul(&s2);
    let sc = s1.mul(&c2);
    let amp = [
        R::cos(a1 + a2)?.mul(&cc).add(&R::sin(b1 + b2)?.mul(&ss)),
        R::cos(a1 - b2)?.mul(&cs).add(&R::sin(a2 - b1)?.mul(&sc)),
        R::sin(a1 - b2)?.mul(&cs).add(&R::cos(a2 - b1)?.mul(&sc)),
        R::sin(a1 + a2)?.mul(&cc).sub(&R::cos(b1 + b2)?.mul(&ss)),
    ];
    Ok(amp.map(|a| a.mul(&a)))
}

/// Closed-form coefficient vector (float).
pub fn coefficients(p1: &StrategyParams, p2: &StrategyParams) -> CoefficientVector {
    CoefficientVector(closed_form::<f64>(p1, p2).expect("float trig is total"))
}

/// Closed-form coefficient vector, exact. Requires exact angles.
pub fn coefficients_exact(p1: &StrategyParams, p2: &StrategyParams) -> Result<[Cyclo; 4]> {
    closed_form::<Cyclo>(p1, p2)
}

trait Amplitude: Sized + Clone {
    type Real;
    fn zero() -> Self;
    fn expi(a: Angle) -> Result<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn times_i(&self) -> Self;
    fn half(&self) -> Self;
    fn abs2(&self) -> Self::Real;
}

impl Amplitude for Complex64 {
    type Real = f64;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn expi(a: Angle) -> Result<Self> {
        Ok(Complex64::from_polar(1.0, a.to_radians()))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn times_i(&self) -> Self {
        self * Complex64::i()
    }
    fn half(&self) -> Self {
        self * 0.5
    }
    fn abs2(&self) -> f64 {
        self.norm_sqr()
    }
}

impl Amplitude for Cyclo {
    type Real = Cyclo;
    fn zero() -> Self {
        Cyclo::zero()
    }
    fn expi(a: Angle) -> Result<Self> {
        Ok(Cyclo::expi_pi(exact_angle(a)?))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn times_i(&self) -> Self {
        self * &Cyclo::imag_unit()
    }
    fn half(&self) -> Self {
        Cyclo::half(self)
    }
    fn abs2(&self) -> Cyclo {
        Cyclo::abs2(self)
    }
}

/// Matrix of `U(θ, α, β)` written purely with phase factors.
fn strategy_matrix<A: Amplitude>(p: &StrategyParams) -> Result<[[A; 2]; 2]> {
    let h = p.theta.half();
    let (a, b) = (p.alpha, p.beta);
    let e = |x: Angle| A::expi(x);
    // e^{iα}cos(θ/2) = (e^{i(α+θ/2)} + e^{i(α−θ/2)})/2, i e^{iβ}sin(θ/2) = (e^{i(β+θ/2)} − e^{i(β−θ/2)})/2
    Ok([
        [e(a + h)?.add(&e(a - h)?).half(), e(b + h)?.sub(&e(b - h)?).half()],
        [e(-b + h)?.sub(&e(-b - h)?).half(), e(-a + h)?.add(&e(-a - h)?).half()],
    ])
}

/// Measurement probabilities of `J†(U₁⊗U₂)J|00⟩` in the basis `|00⟩,|01⟩,|10⟩,|11⟩`.
fn statevector_probabilities<A: Amplitude>(p1: &StrategyParams, p2: &StrategyParams) -> Result<[A::Real; 4]> {
    let u1 = strategy_matrix::<A>(p1)?;
    let u2 = strategy_matrix::<A>(p2)?;
    // J|00⟩ ∝ |00⟩ + i|11⟩; the two 1/√2 factors of J and J† are applied together at the end.
    let one = A::expi(Angle::zero())?;
    let start = [one.clone(), A::zero(), A::zero(), one.times_i()];
    let mut mid: Vec<A> = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = A::zero();
            for c in 0..2 {
                for d in 0..2 {
                    let v = &start[2 * c + d];
                    acc = acc.add(&u1[a][c].mul(&u2[b][d]).mul(v));
                }
            }
            mid.push(acc);
        }
    }
    // J† ∝ I⊗I − i σx⊗σx, and σx⊗σx maps |k⟩ to |3−k⟩.
    let out: Vec<A> = (0..4).map(|k| mid[k].sub(&mid[3 - k].times_i()).half()).collect();
    let probs: Vec<A::Real> = out.iter().map(A::abs2).collect();
    Ok(probs.try_into().unwrap_or_else(|_| unreachable!()))
}

/// Statevector oracle for the coefficient vector (float).
pub fn coefficients_oracle(p1: &StrategyParams, p2: &StrategyParams) -> CoefficientVector {
    CoefficientVector(statevector_probabilities::<Complex64>(p1, p2).expect("float statevector is total"))
}

/// Statevector oracle, exact.
pub fn coefficients_oracle_exact(p1: &StrategyParams, p2: &StrategyParams) -> Result<[Cyclo; 4]> {
    statevector_probabilities::<Cyclo>(p1, p2)
}

fn coefficients_as<T: Scalar>(p1: &StrategyParams, p2: &StrategyParams, oracle: bool) -> Result<[T; 4]> {
    match T::MODE {
        Mode::Exact => {
            let c = if oracle { coefficients_oracle_exact(p1, p2)? } else { coefficients_exact(p1, p2)? };
            let v: Vec<T> = c.iter().map(T::from_cyclo).collect::<Result<_>>()?;
            Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
        }
        Mode::Float => {
            let c = if oracle { coefficients_oracle(p1, p2) } else { coefficients(p1, p2) };
            Ok(c.0.map(T::from_float))
        }
    }
}

/// `Σ Δᵢⱼ · cᵢⱼ` with `c` from the closed form.
pub fn payoff_closed_form<T: Scalar>(
    game: &Bimatrix2<T>,
    p1: &StrategyParams,
    p2: &StrategyParams,
) -> Result<PayoffPair<T>> {
    Ok(game.combine(&coefficients_as::<T>(p1, p2, false)?))
}

/// `(⟨Ψ|M₁|Ψ⟩, ⟨Ψ|M₂|Ψ⟩)` from the simulated final state.
pub fn payoff_oracle<T: Scalar>(game: &Bimatrix2<T>, p1: &StrategyParams, p2: &StrategyParams) -> Result<PayoffPair<T>> {
    Ok(game.combine(&coefficients_as::<T>(p1, p2, true)?))
}
