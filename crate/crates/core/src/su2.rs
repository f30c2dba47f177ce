//! Parametrized SU(2) strategies `U(θ, α, β)` and the isomorphism bijection φ.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};

/// Tolerance for unitarity and determinant checks.
pub const UNITARY_TOL: f64 = 1e-12;

/// A canonical parameter triple: θ ∈ [0, π], α, β ∈ [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StrategyParams {
    pub theta: Angle,
    pub alpha: Angle,
    pub beta: Angle,
}

impl StrategyParams {
    /// Canonicalizing constructor; see [`canonicalize`].
    pub fn new(theta: Angle, alpha: Angle, beta: Angle) -> Result<Self> {
        canonicalize(theta, alpha, beta)
    }

    /// Shorthand for exact lattice strategies: each argument is a multiple of π.
    pub fn pi_fracs(theta: (i64, i64), alpha: (i64, i64), beta: (i64, i64)) -> Result<Self> {
        Self::new(
            Angle::pi_frac(theta.0, theta.1),
            Angle::pi_frac(alpha.0, alpha.1),
            Angle::pi_frac(beta.0, beta.1),
        )
    }

    /// The classical "cooperate" strategy `I = U(0, 0, 0)`.
    pub fn identity() -> Self {
        StrategyParams { theta: Angle::zero(), alpha: Angle::zero(), beta: Angle::zero() }
    }

    /// The classical "defect" strategy `iX = U(π, 0, 0)`.
    pub fn ix() -> Self {
        StrategyParams { theta: Angle::pi(), alpha: Angle::zero(), beta: Angle::zero() }
    }

    pub fn is_exact(&self) -> bool {
        self.theta.is_exact() && self.alpha.is_exact() && self.beta.is_exact()
    }

    /// Same parameters with every angle converted to radians.
    pub fn to_float(&self) -> Self {
        StrategyParams {
            theta: Angle::Radians(self.theta.to_radians()),
            alpha: Angle::Radians(self.alpha.to_radians()),
            beta: Angle::Radians(self.beta.to_radians()),
        }
    }

    pub fn unitary(&self) -> Unitary2 {
        build_unitary(self)
    }

    pub fn phi(&self) -> Self {
        phi(self)
    }
}

impl fmt::Display for StrategyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({}, {}, {})", self.theta, self.alpha, self.beta)
    }
}

impl<'de> Deserialize<'de> for StrategyParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            theta: Angle,
            alpha: Angle,
            beta: Angle,
        }
        let raw = Raw::deserialize(d)?;
        canonicalize(raw.theta, raw.alpha, raw.beta).map_err(serde::de::Error::custom)
    }
}

/// Reduce α, β modulo 2π; θ must already lie in [0, π].
pub fn canonicalize(theta: Angle, alpha: Angle, beta: Angle) -> Result<StrategyParams> {
    let theta = match theta {
        Angle::Pi(_) if theta.within(Angle::zero(), Angle::pi()) => theta,
        Angle::Radians(x) if theta.within(Angle::zero(), Angle::pi()) => {
            Angle::Radians(x.clamp(0.0, std::f64::consts::PI))
        }
        _ => return Err(Error::Domain(format!("theta = {theta} is outside [0, pi]"))),
    };
    for (name, a) in [("alpha", alpha), ("beta", beta)] {
        if !a.to_radians().is_finite() {
            return Err(Error::Domain(format!("{name} is not finite")));
        }
    }
    Ok(StrategyParams { theta, alpha: alpha.mod_two_pi(), beta: beta.mod_two_pi() })
}

/// φ(U(θ, α, β)) = U(π − θ, 2π − β, π − α), canonicalized.
pub fn phi(p: &StrategyParams) -> StrategyParams {
    let two_pi = Angle::pi_frac(2, 1);
    let theta = match Angle::pi() - p.theta {
        Angle::Radians(x) => Angle::Radians(x.clamp(0.0, std::f64::consts::PI)),
        exact => exact,
    };
    StrategyParams {
        theta,
        alpha: (two_pi - p.beta).mod_two_pi(),
        beta: (Angle::pi() - p.alpha).mod_two_pi(),
    }
}

/// A 2×2 complex matrix (row-major).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    pub entries: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Unitary2 { entries: [[o, z], [z, o]] }
    }

    pub fn mul(&self, rhs: &Unitary2) -> Unitary2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.entries[i][0] * rhs.entries[0][j] + self.entries[i][1] * rhs.entries[1][j];
            }
        }
        Unitary2 { entries: out }
    }

    pub fn adjoint(&self) -> Unitary2 {
        let e = &self.entries;
        Unitary2 { entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]] }
    }

    pub fn det(&self) -> Complex64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn max_abs_diff(&self, other: &Unitary2) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }

    pub fn is_unitary(&self) -> bool {
        self.mul(&self.adjoint()).max_abs_diff(&Unitary2::identity()) <= UNITARY_TOL
    }

    pub fn is_special_unitary(&self) -> bool {
        self.is_unitary() && (self.det() - Complex64::new(1.0, 0.0)).norm() <= UNITARY_TOL
    }
}

/// `[[e^{iα}cos(θ/2), i e^{iβ}sin(θ/2)], [i e^{−iβ}sin(θ/2), e^{−iα}cos(θ/2)]]`.
pub fn build_unitary(p: &StrategyParams) -> Unitary2 {
    let (c, s) = {
        let h = p.theta.to_radians() / 2.0;
        (h.cos(), h.sin())
    };
    let a = p.alpha.to_radians();
    let b = p.beta.to_radians();
    let i = Complex64::i();
    Unitary2 {
        entries: [
            [Complex64::from_polar(c, a), i * Complex64::from_polar(s, b)],
            [i * Complex64::from_polar(s, -b), Complex64::from_polar(c, -a)],
        ],
    }
}

/// Exact entries of `U(θ, α, β)` for angles that are rational multiples of π.
pub fn build_unitary_exact(p: &StrategyParams) -> Result<[[Cyclo; 2]; 2]> {
    let need = |a: Angle| {
        a.pi_multiple()
            .ok_or_else(|| Error::NotExact(format!("exact angles, got {a}")))
    };
    let (t, a, b) = (need(p.theta)?, need(p.alpha)?, need(p.beta)?);
    let half = num_rational::Rational64::new(1, 2);
    let c = Cyclo::cos_pi(t * half);
    let s = Cyclo::sin_pi(t * half);
    let i = Cyclo::imag_unit();
    Ok([
        [&Cyclo::expi_pi(a) * &c, &(&i * &Cyclo::expi_pi(b)) * &s],
        [&(&i * &Cyclo::expi_pi(-b)) * &s, &Cyclo::expi_pi(-a) * &c],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_ix() {
        let u = build_unitary(&StrategyParams::identity());
        assert!(u.max_abs_diff(&Unitary2::identity()) < 1e-15);
        let x = build_unitary(&StrategyParams::ix());
        let expected = Unitary2 { entries: [[c(0.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]] };
        assert!(x.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn example_three_matrix() {
        let p = StrategyParams::pi_fracs((1, 2), (1, 2), (1, 2)).unwrap();
        let u = build_unitary(&p);
        let k = FRAC_1_SQRT_2;
        let expected = Unitary2 {
            entries: [[c(0.0, k), c(-k, 0.0)], [c(k, 0.0), c(0.0, -k)]],
        };
        assert!(u.max_abs_diff(&expected) < 1e-15);
        assert!(u.is_special_unitary());
    }

    #[test]
    fn b_class_example_matrices() {
        // U(π/2, 3π/4, π/4) = ½[[−1+i, −1+i], [1+i, −1−i]]
        let u = build_unitary(&StrategyParams::pi_fracs((1, 2), (3, 4), (1, 4)).unwrap());
        let expected = Unitary2 {
            entries: [[c(-0.5, 0.5), c(-0.5, 0.5)], [c(0.5, 0.5), c(-0.5, -0.5)]],
        };
        assert!(u.max_abs_diff(&expected) < 1e-15);
        // U(π/2, π/4, 3π/4) = ½[[1+i, −1−i], [1−i, 1−i]]
        let u = build_unitary(&StrategyParams::pi_fracs((1, 2), (1, 4), (3, 4)).unwrap());
        let expected = Unitary2 {
            entries: [[c(0.5, 0.5), c(-0.5, -0.5)], [c(0.5, -0.5), c(0.5, -0.5)]],
        };
        assert!(u.max_abs_diff(&expected) < 1e-15);
        // the printed ½[[−1+i, −1−i], [1−i, −1−i]] is U(π/2, 3π/4, 3π/4)
        let u = build_unitary(&StrategyParams::pi_fracs((1, 2), (3, 4), (3, 4)).unwrap());
        let printed = Unitary2 {
            entries: [[c(-0.5, 0.5), c(-0.5, -0.5)], [c(0.5, -0.5), c(-0.5, -0.5)]],
        };
        assert!(u.max_abs_diff(&printed) < 1e-15);
    }

    #[test]
    fn canonicalization() {
        let p = canonicalize(Angle::pi_frac(1, 2), Angle::pi_frac(2, 1), Angle::pi_frac(-1, 2)).unwrap();
        assert_eq!(p, StrategyParams::pi_fracs((1, 2), (0, 1), (3, 2)).unwrap());
        let p = canonicalize(Angle::pi(), Angle::pi_frac(7, 2), Angle::pi_frac(1, 4)).unwrap();
        assert_eq!((p.alpha, p.beta), (Angle::pi_frac(3, 2), Angle::pi_frac(1, 4)));
        assert!(matches!(
            canonicalize(Angle::pi_frac(3, 2), Angle::zero(), Angle::zero()),
            Err(Error::Domain(_))
        ));
        assert!(canonicalize(Angle::Radians(-0.1), Angle::zero(), Angle::zero()).is_err());
        // idempotent
        let q = canonicalize(p.theta, p.alpha, p.beta).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(&StrategyParams::identity()), StrategyParams::pi_fracs((1, 1), (0, 1), (1, 1)).unwrap());
        let p = StrategyParams::pi_fracs((1, 2), (1, 2), (1, 2)).unwrap();
        assert_eq!(phi(&p), StrategyParams::pi_fracs((1, 2), (3, 2), (1, 2)).unwrap());
        // β = 0 maps 2π − 0 to 0
        assert_eq!(phi(&StrategyParams::ix()).alpha, Angle::zero());
        // θ endpoints swap
        assert_eq!(phi(&StrategyParams::ix()).theta, Angle::zero());
    }

    #[test]
    fn exact_matrix_matches_float() {
        for (t, a, b) in [((1, 3), (1, 4), (7, 4)), ((1, 2), (1, 2), (0, 1)), ((2, 3), (5, 4), (1, 8))] {
            let p = StrategyParams::pi_fracs(t, a, b).unwrap();
            let exact = build_unitary_exact(&p).unwrap();
            let float = build_unitary(&p);
            for i in 0..2 {
                for j in 0..2 {
                    let e = c(exact[i][j].re_f64(), exact[i][j].im_f64());
                    assert!((e - float.entries[i][j]).norm() < 1e-12);
                }
            }
        }
    }
}
