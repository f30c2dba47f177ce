//! The permissible extension classes A–E: parameters, strategy sets, block
//! payoff matrices and the θ₁ → 0, π limits of D and E.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::invariance::{block_matrix, BlockCoefficients, ExtendedGame};
use crate::payoff::Bimatrix2;
use crate::scalar::{Rational, Scalar};
use crate::su2::StrategyParams;

pub const LABELS: [&str; 4] = ["I", "iX", "U1", "U2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassId {
    A1,
    A2,
    B,
    C,
    D1,
    D2,
    E1,
    E2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
}

impl ClassId {
    pub const ALL: [ClassId; 8] =
        [ClassId::A1, ClassId::A2, ClassId::B, ClassId::C, ClassId::D1, ClassId::D2, ClassId::E1, ClassId::E2];

    pub fn family(self) -> Family {
        match self {
            ClassId::A1 | ClassId::A2 => Family::A,
            ClassId::B => Family::B,
            ClassId::C => Family::C,
            ClassId::D1 | ClassId::D2 => Family::D,
            ClassId::E1 | ClassId::E2 => Family::E,
        }
    }

    /// C, D and E take θ₁ anywhere in (0, π).
    pub fn has_free_theta(self) -> bool {
        matches!(self.family(), Family::C | Family::D | Family::E)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for ClassId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClassId::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::parse(format!("unknown class {s:?} (expected A1, A2, B, C, D1, D2, E1, E2)")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            _ => Err(Error::parse(format!("unknown family {s:?}"))),
        }
    }
}

/// `(θ₁, α₁, β₁, α₂, β₂)` for one class; θ₂ is always π − θ₁.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassParams {
    #[serde(rename = "class")]
    pub class_id: ClassId,
    pub theta1: Angle,
    pub alpha1: Angle,
    pub beta1: Angle,
    pub alpha2: Angle,
    pub beta2: Angle,
}

fn pi(n: i64, d: i64) -> Angle {
    Angle::pi_frac(n, d)
}

impl ClassParams {
    /// The reference member of a class. C, D and E need `theta1`; for A
    /// and B it must be absent or equal to the fixed value.
    pub fn defaults(class_id: ClassId, theta1: Option<Angle>) -> Result<Self> {
        let fixed = match class_id {
            ClassId::A1 => Some(Angle::zero()),
            ClassId::A2 => Some(Angle::pi()),
            ClassId::B => Some(pi(1, 2)),
            _ => None,
        };
        let theta1 = match (fixed, theta1) {
            (Some(f), None) => f,
            (Some(_), Some(t)) => t,
            (None, Some(t)) => t,
            (None, None) => {
                return Err(Error::InvalidClassParams {
                    class: class_id.to_string(),
                    violated: "theta1 in (0, pi) must be given".into(),
                })
            }
        };
        let z = Angle::zero();
        let (a1, b1, a2, b2) = match class_id {
            ClassId::A1 => (z, z, z, Angle::pi()),
            ClassId::A2 => (z, Angle::pi(), z, z),
            ClassId::B => (pi(1, 4), pi(3, 4), pi(3, 4), pi(1, 4)),
            ClassId::C => (pi(1, 4), pi(1, 4), pi(3, 4), pi(3, 4)),
            ClassId::D1 => (z, z, z, z),
            ClassId::D2 => (pi(1, 2), pi(1, 2), pi(1, 2), pi(1, 2)),
            ClassId::E1 => (z, pi(1, 2), pi(1, 2), z),
            ClassId::E2 => (pi(1, 2), z, z, pi(1, 2)),
        };
        Ok(ClassParams { class_id, theta1, alpha1: a1, beta1: b1, alpha2: a2, beta2: b2 })
    }

    /// A1 with the given α₁ and β₂ = π − α₁.
    pub fn a1(alpha1: Angle) -> Self {
        let mut p = Self::defaults(ClassId::A1, None).expect("fixed theta");
        p.alpha1 = alpha1.mod_two_pi();
        p.beta2 = (Angle::pi() - alpha1).mod_two_pi();
        p
    }

    /// A2 with the given α₂ and β₁ = π − α₂.
    pub fn a2(alpha2: Angle) -> Self {
        let mut p = Self::defaults(ClassId::A2, None).expect("fixed theta");
        p.alpha2 = alpha2.mod_two_pi();
        p.beta1 = (Angle::pi() - alpha2).mod_two_pi();
        p
    }

    pub fn with_phases(mut self, phases: [Angle; 4]) -> Self {
        [self.alpha1, self.beta1, self.alpha2, self.beta2] = phases;
        self
    }

    pub fn phases(&self) -> [Angle; 4] {
        [self.alpha1, self.beta1, self.alpha2, self.beta2]
    }

    pub fn theta2(&self) -> Angle {
        Angle::pi() - self.theta1
    }

    fn violation(&self, what: &str) -> Error {
        Error::InvalidClassParams { class: self.class_id.to_string(), violated: what.to_string() }
    }

    /// Check θ₁ and the defining phase congruences of the class.
    pub fn validate(&self) -> Result<()> {
        let (t, a1, b1, a2, b2) = (self.theta1, self.alpha1, self.beta1, self.alpha2, self.beta2);
        let z = Angle::zero();
        let (half_pi, quarter_pi, pi_) = (pi(1, 2), pi(1, 4), Angle::pi());
        let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(self.violation(what)) };
        match self.class_id.family() {
            Family::A => {}
            Family::B => check(t.value_eq(half_pi), "theta1 = pi/2")?,
            _ => check(t.strictly_between(z, pi_), "0 < theta1 < pi")?,
        }
        match self.class_id {
            ClassId::A1 => {
                check(t.value_eq(z), "theta1 = 0")?;
                check((a1 + b2).congruent(z, pi_), "alpha1 + beta2 = n pi")?;
            }
            ClassId::A2 => {
                check(t.value_eq(pi_), "theta1 = pi")?;
                check((a2 + b1).congruent(z, pi_), "alpha2 + beta1 = n pi")?;
            }
            ClassId::B | ClassId::C => {
                check(a1.congruent(quarter_pi, half_pi), "alpha1 in {pi/4, 3pi/4, 5pi/4, 7pi/4}")?;
                check(b1.congruent(quarter_pi, half_pi), "beta1 in {pi/4, 3pi/4, 5pi/4, 7pi/4}")?;
                let off = if self.class_id == ClassId::B { z } else { half_pi };
                let suffix = if self.class_id == ClassId::B { "" } else { " + pi/2" };
                check((a2 - b1).congruent(off, pi_), &format!("alpha2 - beta1 = n pi{suffix}"))?;
                check((b2 - a1).congruent(off, pi_), &format!("beta2 - alpha1 = l pi{suffix}"))?;
            }
            ClassId::D1 | ClassId::D2 | ClassId::E1 | ClassId::E2 => {
                let base = if matches!(self.class_id, ClassId::D1 | ClassId::E1) { z } else { half_pi };
                let base_name = if base == z { "{0, pi}" } else { "{pi/2, 3pi/2}" };
                check(a1.congruent(base, pi_), &format!("alpha1 in {base_name}"))?;
                let family_d = self.class_id.family() == Family::D;
                let off = if family_d { z } else { half_pi };
                let suffix = if family_d { "" } else { " + pi/2" };
                check((b1 - a1).congruent(off, pi_), &format!("beta1 = alpha1 + n pi{suffix}"))?;
                check((a2 - b1).congruent(z, pi_), "alpha2 = beta1 + l pi")?;
                check((b2 - a1).congruent(z, pi_), "beta2 = alpha1 + m pi")?;
            }
        }
        Ok(())
    }
}

/// The four added strategies `I, iX, U₁(θ₁, α₁, β₁), U₂(π − θ₁, α₂, β₂)`, labelled.
pub fn strategy_set(p: &ClassParams) -> Result<Vec<(String, StrategyParams)>> {
    p.validate()?;
    let u1 = StrategyParams::new(p.theta1, p.alpha1, p.beta1)?;
    let u2 = StrategyParams::new(p.theta2(), p.alpha2, p.beta2)?;
    Ok(LABELS
        .iter()
        .map(|l| l.to_string())
        .zip([StrategyParams::identity(), StrategyParams::ix(), u1, u2])
        .collect())
}

/// Block coefficients `[[e, f], [g, h]]` on Γ⁰…Γ³.
pub fn block_coefficients<T: Scalar>(p: &ClassParams) -> Result<BlockCoefficients<T>> {
    p.validate()?;
    let (o, z) = (T::one(), T::zero());
    let e = [o.clone(), z.clone(), z.clone(), z.clone()];
    let half = o.clone() / T::from_int(2);
    let weights = || -> Result<(T, T)> {
        let t = T::cos_sq(p.theta1.half())?;
        Ok((t.clone(), o.clone() - t))
    };
    let h_de = |t: &T, t_: &T| [t.clone() * t.clone(), t.clone() * t_.clone(), t.clone() * t_.clone(), t_.clone() * t_.clone()];
    let [f, g, h] = match p.class_id {
        ClassId::A1 | ClassId::A2 => {
            let alpha = if p.class_id == ClassId::A1 { p.alpha1 } else { p.alpha2 };
            let a = T::cos_sq(alpha)?;
            let b = T::cos_sq(alpha.scale(2.into()))?;
            let (a_, b_) = (o.clone() - a.clone(), o.clone() - b.clone());
            if p.class_id == ClassId::A1 {
                let fg = [a, z.clone(), z.clone(), a_];
                [fg.clone(), fg, [b, z.clone(), z.clone(), b_]]
            } else {
                [
                    [z.clone(), a_.clone(), a.clone(), z.clone()],
                    [z.clone(), a, a_, z.clone()],
                    [b_, z.clone(), z.clone(), b],
                ]
            }
        }
        ClassId::B => {
            let q = half.clone() * half.clone();
            let u = [q.clone(), q.clone(), q.clone(), q];
            [u.clone(), u.clone(), u]
        }
        ClassId::C => {
            let (t, t_) = weights()?;
            let fg = [t.clone() * half.clone(), t_.clone() * half.clone(), t_.clone() * half.clone(), t.clone() * half];
            let h = [t_.clone() * t_.clone(), t.clone() * t_.clone(), t.clone() * t_, t.clone() * t];
            [fg.clone(), fg, h]
        }
        ClassId::D1 => {
            let (t, t_) = weights()?;
            [
                [t.clone(), z.clone(), t_.clone(), z.clone()],
                [t.clone(), t_.clone(), z.clone(), z.clone()],
                h_de(&t, &t_),
            ]
        }
        ClassId::D2 => {
            let (t, t_) = weights()?;
            [
                [z.clone(), t_.clone(), z.clone(), t.clone()],
                [z.clone(), z.clone(), t_.clone(), t.clone()],
                h_de(&t, &t_),
            ]
        }
        ClassId::E1 => {
            let (t, t_) = weights()?;
            [
                [t.clone(), t_.clone(), z.clone(), z.clone()],
                [t.clone(), z.clone(), t_.clone(), z.clone()],
                h_de(&t, &t_),
            ]
        }
        ClassId::E2 => {
            let (t, t_) = weights()?;
            [
                [z.clone(), z.clone(), t_.clone(), t.clone()],
                [z.clone(), t_.clone(), z.clone(), t.clone()],
                h_de(&t, &t_),
            ]
        }
    };
    Ok([[e, f], [g, h]])
}

/// The class's block matrix evaluated on `game`, labelled `I, iX, U1, U2`.
pub fn extension_matrix<T: Scalar>(p: &ClassParams, game: &Bimatrix2<T>) -> Result<ExtendedGame<T>> {
    let coeffs = block_coefficients::<T>(p)?;
    block_matrix(game, &coeffs, LABELS.iter().map(|l| l.to_string()).collect())
}

fn product(sets: [&[Angle]; 4]) -> Vec<[Angle; 4]> {
    let mut out = Vec::new();
    for &a in sets[0] {
        for &b in sets[1] {
            for &c in sets[2] {
                for &d in sets[3] {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// The explicit finite solution sets `(α₁, β₁, α₂, β₂)` of B, C, D and E,
/// as unions of Cartesian products.
pub fn enumerate_discrete_solutions(family: Family) -> Result<Vec<[Angle; 4]>> {
    let p = [pi(1, 4), pi(5, 4)];
    let q = [pi(3, 4), pi(7, 4)];
    let z = [Angle::zero(), Angle::pi()];
    let h = [pi(1, 2), pi(3, 2)];
    let parts: Vec<[&[Angle]; 4]> = match family {
        Family::A => {
            return Err(Error::NotDiscrete(
                "A (alpha1 + beta2 = n pi at theta1 = 0, alpha2 + beta1 = n pi at theta1 = pi)".into(),
            ))
        }
        Family::B => vec![[&p, &p, &p, &p], [&p, &q, &q, &p], [&q, &p, &p, &q], [&q, &q, &q, &q]],
        Family::C => vec![[&p, &p, &q, &q], [&q, &q, &p, &p], [&p, &q, &p, &q], [&q, &p, &q, &p]],
        Family::D => vec![[&z, &z, &z, &z], [&h, &h, &h, &h]],
        Family::E => vec![[&z, &h, &h, &z], [&h, &z, &z, &h]],
    };
    Ok(parts.into_iter().flat_map(product).collect())
}

/// Every class whose θ₁ condition and congruences the tuple satisfies.
pub fn classify(theta1: Angle, phases: [Angle; 4]) -> Vec<ClassId> {
    ClassId::ALL
        .into_iter()
        .filter(|&c| {
            let p = ClassParams { class_id: c, theta1, alpha1: phases[0], beta1: phases[1], alpha2: phases[2], beta2: phases[3] };
            p.validate().is_ok()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// θ₁ → 0.
    Zero,
    /// θ₁ → π.
    Pi,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Zero, Direction::Pi];
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Zero => "0",
            Direction::Pi => "pi",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(Direction::Zero),
            "pi" | "π" => Ok(Direction::Pi),
            other => Err(Error::parse(format!("unknown direction {other:?} (expected 0 or pi)"))),
        }
    }
}

/// The A-class matrix that a D or E class approaches.
pub fn limit_target(class_id: ClassId, direction: Direction) -> Result<ClassParams> {
    use ClassId::*;
    use Direction::*;
    let (z, h) = (Angle::zero(), pi(1, 2));
    Ok(match (class_id, direction) {
        (D1, Zero) | (E1, Zero) => ClassParams::a1(z),
        (D2, Zero) | (E2, Zero) => ClassParams::a1(h),
        (D1, Pi) | (E2, Pi) => ClassParams::a2(z),
        (D2, Pi) | (E1, Pi) => ClassParams::a2(h),
        _ => return Err(Error::Domain(format!("class {class_id} has no theta limit; expected D1, D2, E1 or E2"))),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub theta1: f64,
    /// `t′` towards 0, `t` towards π.
    pub weight: f64,
    pub max_deviation: f64,
    pub bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub class: ClassId,
    pub direction: Direction,
    pub target: ClassParams,
    pub samples: Vec<LimitSample>,
    pub converged: bool,
}

/// Offsets from the endpoint used by [`limit_check`].
pub const LIMIT_OFFSETS: [f64; 2] = [1e-3, 1e-6];

/// `PD / 5`, entries in [0, 1].
pub fn limit_reference_game() -> Bimatrix2<f64> {
    let pd = Bimatrix2::<Rational>::prisoners_dilemma().to_f64();
    let s = |p: &crate::payoff::PayoffPair<f64>| p.scaled(&0.2);
    Bimatrix2 { delta: [[s(&pd.delta[0][0]), s(&pd.delta[0][1])], [s(&pd.delta[1][0]), s(&pd.delta[1][1])]] }
}

/// [`limit_check_on`] with the reference game and offsets 10⁻³, 10⁻⁶.
pub fn limit_check(class_id: ClassId, direction: Direction) -> Result<LimitReport> {
    limit_check_on(&limit_reference_game(), class_id, direction, &LIMIT_OFFSETS)
}

/// Compare the class matrix at θ₁ = ε (or π − ε) with its A-class target.
/// The bound is `10 · weight · max(1, max |entry|)`.
pub fn limit_check_on(
    game: &Bimatrix2<f64>,
    class_id: ClassId,
    direction: Direction,
    offsets: &[f64],
) -> Result<LimitReport> {
    let target = limit_target(class_id, direction)?;
    let target_matrix = extension_matrix::<f64>(&target, game)?;
    let scale = game.max_abs().max(1.0);
    let mut samples = Vec::with_capacity(offsets.len());
    for &eps in offsets {
        let theta1 = match direction {
            Direction::Zero => eps,
            Direction::Pi => std::f64::consts::PI - eps,
        };
        let p = ClassParams::defaults(class_id, Some(Angle::Radians(theta1)))?;
        let m = extension_matrix::<f64>(&p, game)?;
        let t = (theta1 / 2.0).cos().powi(2);
        let weight = match direction {
            Direction::Zero => 1.0 - t,
            Direction::Pi => t,
        };
        let max_deviation = m.max_abs_diff(&target_matrix);
        let bound = 10.0 * weight * scale;
        samples.push(LimitSample { theta1, weight, max_deviation, bound, within: max_deviation <= bound });
    }
    let converged = samples.iter().all(|s| s.within);
    Ok(LimitReport { class: class_id, direction, target, samples, converged })
}
