//! Brute-force search of the phase lattice for strategy sets closed under φ.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::classes::{classify, ClassId, Family};
use crate::cyclotomic::Cyclo;
use crate::equivalence::{CoefficientCache, EquivalenceConfig};
use crate::error::{Error, Result};
use crate::invariance::criterion_holds_with;
use crate::payoff::TrigRing;
use crate::scalar::Mode;
use crate::su2::StrategyParams;

/// Lattice of `(θ₁, θ₂, α₁, β₁, α₂, β₂)` points to test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub theta_values: Vec<Angle>,
    /// Phase spacing: π/4 or π/8.
    pub phase_step: Angle,
    /// Pair every θ₁ with every θ₂ from `theta_values` instead of `π − θ₁`.
    #[serde(default)]
    pub free_theta2: bool,
}

impl LatticeSpec {
    pub fn new(theta_values: Vec<Angle>) -> Self {
        LatticeSpec { theta_values, phase_step: Angle::pi_frac(1, 4), free_theta2: false }
    }

    pub fn with_step(mut self, step: Angle) -> Self {
        self.phase_step = step;
        self
    }

    pub fn with_free_theta2(mut self, free: bool) -> Self {
        self.free_theta2 = free;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_multiple().is_none() {
            return Err(Error::Domain(format!("phase step must be 1/4 pi or 1/8 pi, got {}", self.phase_step)));
        }
        if self.theta_values.is_empty() {
            return Err(Error::Domain("no theta values given".into()));
        }
        for t in &self.theta_values {
            if !t.is_exact() {
                return Err(Error::NotExact(format!("lattice theta values, got {t}")));
            }
            if !t.within(Angle::zero(), Angle::pi()) {
                return Err(Error::Domain(format!("theta {t} outside [0, pi]")));
            }
        }
        Ok(())
    }

    fn step_multiple(&self) -> Option<Rational64> {
        self.phase_step
            .pi_multiple()
            .filter(|r| *r == Rational64::new(1, 4) || *r == Rational64::new(1, 8))
    }

    /// The 8 or 16 phase values covering `[0, 2π)`.
    pub fn phases(&self) -> Vec<Angle> {
        let step = self.step_multiple().unwrap_or(Rational64::new(1, 4));
        let n = (Rational64::from_integer(2) / step).to_integer();
        (0..n).map(|k| Angle::Pi(step * k)).collect()
    }

    pub fn theta_pairs(&self) -> Vec<(Angle, Angle)> {
        if self.free_theta2 {
            self.theta_values
                .iter()
                .flat_map(|&a| self.theta_values.iter().map(move |&b| (a, b)))
                .collect()
        } else {
            self.theta_values.iter().map(|&t| (t, Angle::pi() - t)).collect()
        }
    }
}

/// A lattice point satisfying the criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionHit {
    pub theta1: Angle,
    pub theta2: Angle,
    /// `(α₁, β₁, α₂, β₂)`.
    pub phases: [Angle; 4],
    /// Matching classes; empty means unclassified.
    pub classes: Vec<ClassId>,
}

impl SolutionHit {
    pub fn is_classified(&self) -> bool {
        !self.classes.is_empty()
    }

    /// `B`, `D1|E1`, or `UNCLASSIFIED`.
    pub fn class_label(&self) -> String {
        if self.classes.is_empty() {
            UNCLASSIFIED.to_string()
        } else {
            self.classes.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
        }
    }

    pub fn strategy_set(&self) -> Result<[StrategyParams; 4]> {
        let [a1, b1, a2, b2] = self.phases;
        Ok([
            StrategyParams::identity(),
            StrategyParams::ix(),
            StrategyParams::new(self.theta1, a1, b1)?,
            StrategyParams::new(self.theta2, a2, b2)?,
        ])
    }
}

pub const UNCLASSIFIED: &str = "UNCLASSIFIED";

/// Search output, sorted by `(θ₁, θ₂, phases)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub hits: Vec<SolutionHit>,
    pub points_tested: usize,
}

impl SearchResult {
    /// Hits per family (`A`..`E`) plus `UNCLASSIFIED`. A tuple counts once per family it belongs to.
    pub fn summary(&self) -> BTreeMap<String, usize> {
        let mut out: BTreeMap<String, usize> = BTreeMap::new();
        for f in [Family::A, Family::B, Family::C, Family::D, Family::E] {
            out.insert(f.to_string(), 0);
        }
        out.insert(UNCLASSIFIED.into(), 0);
        for h in &self.hits {
            if h.classes.is_empty() {
                *out.entry(UNCLASSIFIED.into()).or_default() += 1;
                continue;
            }
            let mut fams: Vec<Family> = h.classes.iter().map(|c| c.family()).collect();
            fams.dedup();
            for f in fams {
                *out.entry(f.to_string()).or_default() += 1;
            }
        }
        out
    }

    pub fn unclassified(&self) -> impl Iterator<Item = &SolutionHit> {
        self.hits.iter().filter(|h| !h.is_classified())
    }

    pub fn in_class(&self, c: ClassId) -> impl Iterator<Item = &SolutionHit> + '_ {
        self.hits.iter().filter(move |h| h.classes.contains(&c))
    }

    pub fn to_csv(&self) -> String {
        let free = self.hits.iter().any(|h| !h.theta2.value_eq(Angle::pi() - h.theta1));
        let mut out = String::from(if free {
            "theta1,theta2,alpha1,beta1,alpha2,beta2,class\n"
        } else {
            "theta1,alpha1,beta1,alpha2,beta2,class\n"
        });
        for h in &self.hits {
            let [a1, b1, a2, b2] = h.phases;
            if free {
                out.push_str(&format!("{},{},{a1},{b1},{a2},{b2},{}\n", h.theta1, h.theta2, h.class_label()));
            } else {
                out.push_str(&format!("{},{a1},{b1},{a2},{b2},{}\n", h.theta1, h.class_label()));
            }
        }
        out
    }
}

fn sort_key(a: &Angle) -> (Rational64, u64) {
    match a {
        Angle::Pi(r) => (*r, 0),
        Angle::Radians(x) => (Rational64::from_integer(0), x.to_bits()),
    }
}

/// Tests the criterion on `{I, iX, U(θ₁,α₁,β₁), U(θ₂,α₂,β₂)}` at every lattice point.
pub fn search_solutions(spec: &LatticeSpec) -> Result<SearchResult> {
    spec.validate()?;
    let phases = spec.phases();
    let n = phases.len();
    let mut points = Vec::with_capacity(spec.theta_pairs().len() * n.pow(4));
    for (t1, t2) in spec.theta_pairs() {
        for i in 0..n.pow(4) {
            let tuple = [phases[i / n.pow(3)], phases[(i / n.pow(2)) % n], phases[(i / n) % n], phases[i % n]];
            points.push((t1, t2, tuple));
        }
    }
    let cache = CoefficientCache::new(Mode::Exact);
    let config = EquivalenceConfig::default();
    let mut hits = points
        .par_iter()
        .map(|&(theta1, theta2, tuple)| -> Result<Option<SolutionHit>> {
            let [a1, b1, a2, b2] = tuple;
            let s = [
                StrategyParams::identity(),
                StrategyParams::ix(),
                StrategyParams::new(theta1, a1, b1)?,
                StrategyParams::new(theta2, a2, b2)?,
            ];
            if !criterion_holds_with(&s, &cache, &config)?.holds {
                return Ok(None);
            }
            let classes = if theta2.value_eq(Angle::pi() - theta1) { classify(theta1, tuple) } else { Vec::new() };
            Ok(Some(SolutionHit { theta1, theta2, phases: tuple, classes }))
        })
        .filter_map(|r| r.transpose())
        .collect::<Result<Vec<_>>>()?;
    hits.sort_by(|a, b| {
        let ka = (sort_key(&a.theta1), sort_key(&a.theta2), a.phases.map(|p| sort_key(&p)));
        let kb = (sort_key(&b.theta1), sort_key(&b.theta2), b.phases.map(|p| sort_key(&p)));
        ka.cmp(&kb)
    });
    Ok(SearchResult { hits, points_tested: points.len() })
}

/// A named trigonometric relation and whether it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub satisfied: bool,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, if self.satisfied { "ok" } else { "violated" })
    }
}

fn relations_in<R: TrigRing>(theta1: Angle, theta2: Angle, phases: [Angle; 4]) -> Result<Vec<Relation>> {
    let [a1, b1, a2, b2] = phases;
    let sq = |x: R| x.mul(&x);
    let two = |a: Angle| a + a;
    let eq = |name: &str, l: R, r: R| Relation { name: name.into(), satisfied: l.sub(&r).vanishes() };
    let mut out = vec![eq("sin^2(theta2/2) = cos^2(theta1/2)", sq(R::sin(theta2.half())?), sq(R::cos(theta1.half())?))];
    if theta1.value_eq(Angle::zero()) {
        out.push(eq("sin^2(2 beta2) = sin^2(2 alpha1)", sq(R::sin(two(b2))?), sq(R::sin(two(a1))?)));
        out.push(eq("sin^2(2 alpha1) = sin^2(alpha1 - beta2)", sq(R::sin(two(a1))?), sq(R::sin(a1 - b2)?)));
    } else if theta1.value_eq(Angle::pi()) {
        out.push(eq("sin^2(2 beta1) = sin^2(2 alpha2)", sq(R::sin(two(b1))?), sq(R::sin(two(a2))?)));
        out.push(eq("sin^2(2 alpha2) = sin^2(alpha2 - beta1)", sq(R::sin(two(a2))?), sq(R::sin(a2 - b1)?)));
    } else {
        out.push(eq("sin^2(alpha2) = sin^2(beta1)", sq(R::sin(a2)?), sq(R::sin(b1)?)));
        out.push(eq("sin^2(beta2) = sin^2(alpha1)", sq(R::sin(b2)?), sq(R::sin(a1)?)));
        out.push(eq("sin(2 beta1) cos(2 alpha1) = 0", R::sin(two(b1))?.mul(&R::cos(two(a1))?), R::sin(Angle::zero())?));
        out.push(eq("sin(2 (alpha1 - beta1)) = 0", R::sin(two(a1 - b1))?, R::sin(Angle::zero())?));
    }
    Ok(out)
}

/// The derived relations a criterion solution must satisfy. At `θ₁ ∈ {0, π}`
/// the general set degenerates and the double-angle family is checked instead.
pub fn check_relations(theta1: Angle, theta2: Angle, phases: [Angle; 4]) -> Vec<Relation> {
    let exact = theta1.is_exact() && theta2.is_exact() && phases.iter().all(Angle::is_exact);
    if exact {
        if let Ok(r) = relations_in::<Cyclo>(theta1, theta2, phases) {
            return r;
        }
    }
    relations_in::<f64>(theta1, theta2, phases).expect("float evaluation is total")
}

/// Which of the four `(α₂ − β₁, α₁ − β₂) mod π ∈ {0, π/2}²` cases the tuple falls in:
/// 1 = (0, 0), 2 = (0, π/2), 3 = (π/2, 0), 4 = (π/2, π/2).
pub fn difference_scenario(phases: [Angle; 4]) -> Option<u8> {
    let [a1, b1, a2, b2] = phases;
    let half = Angle::pi_frac(1, 2);
    let which = |d: Angle| {
        if d.congruent(Angle::zero(), Angle::pi()) {
            Some(0)
        } else if d.congruent(half, Angle::pi()) {
            Some(1)
        } else {
            None
        }
    };
    Some(1 + 2 * which(a2 - b1)? + which(a1 - b2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::enumerate_discrete_solutions;

    fn pi(n: i64, d: i64) -> Angle {
        Angle::pi_frac(n, d)
    }

    #[test]
    fn lattice_covers_full_circle() {
        let s = LatticeSpec::new(vec![pi(1, 2)]);
        assert_eq!(s.phases().len(), 8);
        assert_eq!(s.clone().with_step(pi(1, 8)).phases().len(), 16);
        assert!(s.with_step(pi(1, 3)).validate().is_err());
        assert!(LatticeSpec::new(vec![Angle::radians(0.3)]).validate().is_err());
        assert!(LatticeSpec::new(vec![pi(3, 2)]).validate().is_err());
    }

    #[test]
    fn half_pi_contains_b_and_c() {
        let r = search_solutions(&LatticeSpec::new(vec![pi(1, 2)])).unwrap();
        for fam in [Family::B, Family::C, Family::D, Family::E] {
            let listed = enumerate_discrete_solutions(fam).unwrap();
            let found: Vec<_> = r
                .hits
                .iter()
                .filter(|h| h.classes.iter().any(|c| c.family() == fam))
                .map(|h| h.phases)
                .collect();
            assert_eq!(found.len(), listed.len(), "{fam}");
            for t in &listed {
                assert!(found.iter().any(|f| f.iter().zip(t).all(|(a, b)| a.value_eq(*b))), "{fam} {t:?}");
            }
        }
        let s = r.summary();
        assert_eq!((s["B"], s["C"], s["D"], s["E"]), (64, 64, 32, 32));
        assert!(r.hits.iter().all(|h| !(h.classes.iter().any(|c| c.family() == Family::B)
            && h.classes.iter().any(|c| c.family() == Family::C))));
    }

    #[test]
    fn classified_hits_satisfy_relations() {
        let r = search_solutions(&LatticeSpec::new(vec![pi(1, 3)])).unwrap();
        let s = r.summary();
        assert_eq!((s["B"], s["C"], s["D"], s["E"]), (0, 64, 32, 32));
        for h in r.hits.iter().filter(|h| h.is_classified()) {
            assert!(check_relations(h.theta1, h.theta2, h.phases).iter().all(|r| r.satisfied), "{h:?}");
            assert!(!matches!(difference_scenario(h.phases), Some(2 | 3)), "{h:?}");
        }
        // Extras admitted by the criterion violate the derived relations.
        for h in r.unclassified() {
            assert!(check_relations(h.theta1, h.theta2, h.phases).iter().any(|r| !r.satisfied), "{h:?}");
            assert!(matches!(difference_scenario(h.phases), Some(2 | 3)), "{h:?}");
        }
        assert_eq!(r.unclassified().count(), 64);
    }

    #[test]
    fn extras_are_closed_under_phi() {
        let r = search_solutions(&LatticeSpec::new(vec![pi(1, 3)])).unwrap();
        let h = r.unclassified().next().unwrap();
        let s = h.strategy_set().unwrap();
        assert!(crate::invariance::criterion_holds(&s).holds);
        let game = crate::invariance::generic_game().to_f64();
        let report = crate::invariance::verify_invariance_end_to_end(&game, &crate::invariance::labelled(&s)).unwrap();
        assert!(report.all_isomorphic);
    }

    #[test]
    fn theta_zero_hits_are_a1() {
        let r = search_solutions(&LatticeSpec::new(vec![Angle::zero()])).unwrap();
        assert!(!r.hits.is_empty());
        for h in &r.hits {
            let [a1, _, _, b2] = h.phases;
            assert!((a1 + b2).congruent(Angle::zero(), Angle::pi()));
            assert!(h.classes.contains(&ClassId::A1));
        }
    }

    #[test]
    fn relations_for_b_tuples() {
        for t in enumerate_discrete_solutions(Family::B).unwrap() {
            assert!(check_relations(pi(1, 2), pi(1, 2), t).iter().all(|r| r.satisfied));
        }
        let bad = check_relations(pi(1, 2), pi(1, 2), [pi(1, 4), Angle::zero(), Angle::zero(), Angle::zero()]);
        let r = bad.iter().find(|r| r.name == "sin(2 (alpha1 - beta1)) = 0").unwrap();
        assert!(!r.satisfied);
        let a = check_relations(Angle::zero(), Angle::pi(), [Angle::zero(), pi(1, 3), pi(1, 5), Angle::pi()]);
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|r| r.satisfied));
    }

    #[test]
    fn float_relations_agree() {
        let t = [pi(1, 4), pi(3, 4), pi(3, 4), pi(1, 4)];
        let exact = check_relations(pi(1, 2), pi(1, 2), t);
        let float = check_relations(
            Angle::radians(std::f64::consts::FRAC_PI_2),
            Angle::radians(std::f64::consts::FRAC_PI_2),
            t.map(|a| Angle::radians(a.to_radians())),
        );
        assert_eq!(exact, float);
    }

    #[test]
    fn scenarios() {
        assert_eq!(difference_scenario([pi(1, 4), pi(1, 4), pi(1, 4), pi(1, 4)]), Some(1));
        assert_eq!(difference_scenario([pi(3, 4), pi(1, 4), pi(1, 4), pi(1, 4)]), Some(2));
        assert_eq!(difference_scenario([pi(1, 4), pi(1, 4), pi(3, 4), pi(1, 4)]), Some(3));
        assert_eq!(difference_scenario([pi(3, 4), pi(1, 4), pi(3, 4), pi(1, 4)]), Some(4));
        assert_eq!(difference_scenario([pi(1, 4), Angle::zero(), Angle::zero(), Angle::zero()]), None);
    }
}
