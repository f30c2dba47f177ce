//! Pure and mixed Nash equilibria of small bimatrix games by support enumeration.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equivalence::Side;
use crate::error::{Error, Result};
use crate::invariance::ExtendedGame;
use crate::payoff::PayoffPair;
use crate::scalar::{Mode, Scalar};

/// Largest game handled by support enumeration.
pub const MAX_STRATEGIES: usize = 6;

/// Slack allowed on deviation gains in float mode.
pub const DEVIATION_TOL: f64 = 1e-9;

/// Outcome of solving a linear system.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution<T> {
    Unique(Vec<T>),
    /// Underdetermined; `particular` sets every free variable to zero.
    Family { particular: Vec<T>, free: Vec<usize> },
    Inconsistent,
}

/// Solves `a·x = b` by Gaussian elimination with largest-magnitude pivoting.
pub fn solve_linear<T: Scalar>(a: &[Vec<T>], b: &[T]) -> LinearSolution<T> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| r.iter().cloned().chain(std::iter::once(v.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !m[i][c].is_negligible())
            .max_by(|&i, &j| m[i][c].abs_value().partial_cmp(&m[j][c].abs_value()).unwrap_or(std::cmp::Ordering::Equal));
        let Some(p) = best else { continue };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_negligible() {
                let f = m[i][c].clone();
                for k in 0..=cols {
                    let d = f.clone() * m[r][k].clone();
                    m[i][k] = m[i][k].clone() - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_negligible()) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![T::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    if pivots.len() == cols {
        LinearSolution::Unique(x)
    } else {
        let free = (0..cols).filter(|c| !pivots.contains(c)).collect();
        LinearSolution::Family { particular: x, free }
    }
}

/// Cells where each strategy is a best response to the other; ties included.
pub fn pure_equilibria<T: Scalar>(g: &ExtendedGame<T>) -> Vec<(usize, usize)> {
    let n = g.size();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let u = g.get(i, j);
            let row_best = (0..n).all(|k| !gain(g.get(k, j).get(1), u.get(1)));
            let col_best = (0..n).all(|k| !gain(g.get(i, k).get(2), u.get(2)));
            if row_best && col_best {
                out.push((i, j));
            }
        }
    }
    out
}

/// True when `dev` beats `current` beyond tolerance.
fn gain<T: Scalar>(dev: &T, current: &T) -> bool {
    match T::MODE {
        Mode::Exact => dev > current,
        Mode::Float => (dev.clone() - current.clone()).to_f64() > DEVIATION_TOL,
    }
}

fn check_mix<T: Scalar>(mix: &[T], n: usize) -> Result<()> {
    if mix.len() != n {
        return Err(Error::DimensionMismatch(format!("mixed strategy of length {} for {n} strategies", mix.len())));
    }
    Ok(())
}

/// Expected payoff of each own pure strategy against `opponent_mix`.
pub fn best_response_values<T: Scalar>(g: &ExtendedGame<T>, opponent_mix: &[T], side: Side) -> Result<Vec<T>> {
    let n = g.size();
    check_mix(opponent_mix, n)?;
    Ok((0..n)
        .map(|own| {
            (0..n).fold(T::zero(), |acc, other| {
                let u = match side {
                    Side::Row => g.get(own, other).get(1),
                    Side::Column => g.get(other, own).get(2),
                };
                acc + u.clone() * opponent_mix[other].clone()
            })
        })
        .collect())
}

/// A pair of mixed strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile<T> {
    pub p1: Vec<T>,
    pub p2: Vec<T>,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn pure(n: usize, i: usize, j: usize) -> Self {
        let e = |k: usize| (0..n).map(|x| if x == k { T::one() } else { T::zero() }).collect();
        MixedProfile { p1: e(i), p2: e(j) }
    }

    /// Components nonnegative and summing to one.
    pub fn is_valid(&self) -> bool {
        let ok = |v: &[T]| {
            let sum = v.iter().cloned().fold(T::zero(), |a, b| a + b);
            v.iter().all(|x| x.is_negligible() || *x > T::zero()) && sum.approx_eq(&T::one())
        };
        ok(&self.p1) && ok(&self.p2)
    }

    pub fn expected_payoff(&self, g: &ExtendedGame<T>) -> PayoffPair<T> {
        let n = g.size();
        let mut acc = PayoffPair::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc.plus(&g.get(i, j).scaled(&(self.p1[i].clone() * self.p2[j].clone())));
            }
        }
        acc
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        let eq = |a: &[T], b: &[T]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y));
        eq(&self.p1, &other.p1) && eq(&self.p2, &other.p2)
    }

    /// Reindexes by `g1[i][j] = g2[row_perm[i]][col_perm[j]]`, giving the profile in `g2`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut p1 = vec![T::zero(); self.p1.len()];
        let mut p2 = vec![T::zero(); self.p2.len()];
        for (i, &r) in row_perm.iter().enumerate() {
            p1[r] = self.p1[i].clone();
        }
        for (j, &c) in col_perm.iter().enumerate() {
            p2[c] = self.p2[j].clone();
        }
        MixedProfile { p1, p2 }
    }

    pub fn to_f64(&self) -> MixedProfile<f64> {
        MixedProfile { p1: self.p1.iter().map(T::to_f64).collect(), p2: self.p2.iter().map(T::to_f64).collect() }
    }
}

/// No pure deviation of either player gains more than the tolerance.
pub fn verify_equilibrium<T: Scalar>(g: &ExtendedGame<T>, profile: &MixedProfile<T>) -> bool {
    let n = g.size();
    if profile.p1.len() != n || profile.p2.len() != n || !profile.is_valid() {
        return false;
    }
    let u = profile.expected_payoff(g);
    (0..n).all(|d| {
        let row = MixedProfile::pure(n, d, 0).p1;
        let col = MixedProfile::pure(n, 0, d).p2;
        let dev1 = MixedProfile { p1: row, p2: profile.p2.clone() }.expected_payoff(g);
        let dev2 = MixedProfile { p1: profile.p1.clone(), p2: col }.expected_payoff(g);
        !gain(dev1.get(1), u.get(1)) && !gain(dev2.get(2), u.get(2))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Pure,
    Mixed,
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumKind::Pure => "pure",
            EquilibriumKind::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equilibrium<T> {
    pub profile: MixedProfile<T>,
    pub payoff: PayoffPair<T>,
    pub kind: EquilibriumKind,
    pub support1: Vec<usize>,
    pub support2: Vec<usize>,
    /// Found on a support whose indifference system has a solution family.
    pub degenerate: bool,
}

impl<T: Scalar> Equilibrium<T> {
    pub fn to_json(&self) -> Value {
        let v = |x: &[T]| Value::Array(x.iter().map(T::to_json).collect());
        json!({
            "p1": v(&self.profile.p1),
            "p2": v(&self.profile.p2),
            "payoff": self.payoff.to_json(),
            "kind": self.kind,
            "support1": self.support1,
            "support2": self.support2,
            "degenerate": self.degenerate,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumReport<T> {
    pub labels: Vec<String>,
    pub equilibria: Vec<Equilibrium<T>>,
    /// Support pairs whose system was singular with a solution family.
    pub degenerate_supports: Vec<(Vec<usize>, Vec<usize>)>,
}

impl<T: Scalar> EquilibriumReport<T> {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_supports.is_empty()
    }

    pub fn pure(&self) -> impl Iterator<Item = &Equilibrium<T>> {
        self.equilibria.iter().filter(|e| e.kind == EquilibriumKind::Pure)
    }

    pub fn mixed(&self) -> impl Iterator<Item = &Equilibrium<T>> {
        self.equilibria.iter().filter(|e| e.kind == EquilibriumKind::Mixed)
    }

    pub fn contains(&self, profile: &MixedProfile<T>) -> bool {
        self.equilibria.iter().any(|e| e.profile.approx_eq(profile))
    }

    /// `[{"p1", "p2", "payoff", "kind", "support1", "support2", "degenerate"}, ...]`
    pub fn to_json(&self) -> Value {
        Value::Array(self.equilibria.iter().map(Equilibrium::to_json).collect())
    }

    pub fn to_pretty(&self) -> String {
        let name = |s: &[usize]| s.iter().map(|&i| self.labels[i].as_str()).collect::<Vec<_>>().join("+");
        let vec = |x: &[T]| x.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        for e in &self.equilibria {
            out.push_str(&format!(
                "{:<5} ({}; {})  p1=({})  p2=({})  payoff={}{}\n",
                e.kind,
                name(&e.support1),
                name(&e.support2),
                vec(&e.profile.p1),
                vec(&e.profile.p2),
                e.payoff,
                if e.degenerate { "  [degenerate]" } else { "" }
            ));
        }
        out
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..(1 << n)).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Mix over `own` that makes the opponent indifferent across `other`.
/// `payoff(o, s)` is the opponent's payoff for own strategy `s` and opponent strategy `o`.
fn indifference<T: Scalar>(
    own: &[usize],
    other: &[usize],
    n: usize,
    payoff: impl Fn(usize, usize) -> T,
) -> Option<(Vec<T>, bool)> {
    // Unknowns: weights on `own`, then the common value.
    let k = own.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &o in other {
        let mut row: Vec<T> = own.iter().map(|&s| payoff(o, s)).collect();
        row.push(-T::one());
        a.push(row);
        b.push(T::zero());
    }
    let mut sum = vec![T::one(); k];
    sum.push(T::zero());
    a.push(sum);
    b.push(T::one());
    let (x, degenerate) = match solve_linear(&a, &b) {
        LinearSolution::Unique(x) => (x, false),
        LinearSolution::Family { particular, .. } => (particular, true),
        LinearSolution::Inconsistent => return None,
    };
    let mut mix = vec![T::zero(); n];
    for (i, &s) in own.iter().enumerate() {
        mix[s] = x[i].clone();
    }
    Some((mix, degenerate))
}

/// All equilibria found by enumerating every pair of nonempty supports.
pub fn mixed_equilibria<T: Scalar>(g: &ExtendedGame<T>) -> Result<EquilibriumReport<T>> {
    let n = g.size();
    if n > MAX_STRATEGIES {
        return Err(Error::Domain(format!("support enumeration handles at most {MAX_STRATEGIES} strategies, got {n}")));
    }
    let supports = subsets(n);
    let mut report = EquilibriumReport { labels: g.labels.clone(), equilibria: Vec::new(), degenerate_supports: Vec::new() };
    for s1 in &supports {
        for s2 in &supports {
            let Some((p2, d2)) = indifference(s2, s1, n, |i, j| g.get(i, j).get(1).clone()) else { continue };
            let Some((p1, d1)) = indifference(s1, s2, n, |j, i| g.get(i, j).get(2).clone()) else { continue };
            if d1 || d2 {
                report.degenerate_supports.push((s1.clone(), s2.clone()));
            }
            let positive = |p: &[T], s: &[usize]| s.iter().all(|&i| p[i].is_positive_tol());
            if !positive(&p1, s1) || !positive(&p2, s2) {
                continue;
            }
            let profile = MixedProfile { p1, p2 };
            if !verify_equilibrium(g, &profile) || report.contains(&profile) {
                continue;
            }
            let pure = s1.len() == 1 && s2.len() == 1;
            report.equilibria.push(Equilibrium {
                payoff: profile.expected_payoff(g),
                profile,
                kind: if pure { EquilibriumKind::Pure } else { EquilibriumKind::Mixed },
                support1: s1.clone(),
                support2: s2.clone(),
                degenerate: d1 || d2,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{extension_matrix, ClassId, ClassParams};
    use crate::payoff::Bimatrix2;
    use crate::scalar::Rational;
    use crate::Angle;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pd_c() -> ExtendedGame<Rational> {
        let p = ClassParams::defaults(ClassId::C, Some(Angle::pi_frac(1, 3))).unwrap();
        extension_matrix(&p, &Bimatrix2::prisoners_dilemma()).unwrap()
    }

    fn game(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> ExtendedGame<Rational> {
        let m = |x: [[i64; 2]; 2]| x.map(|r| r.map(|v| q(v, 1)));
        ExtendedGame::from_bimatrix(&Bimatrix2::from_matrices(m(a), m(b)))
    }

    #[test]
    fn linear_solver_cases() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        assert_eq!(solve_linear(&a, &[q(3, 1), q(5, 1)]), LinearSolution::Unique(vec![q(4, 5), q(7, 5)]));
        let s = vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]];
        assert_eq!(solve_linear(&s, &[q(1, 1), q(3, 1)]), LinearSolution::Inconsistent);
        assert!(matches!(solve_linear(&s, &[q(1, 1), q(2, 1)]), LinearSolution::Family { .. }));
        let f = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        match solve_linear(&f, &[3.0, 5.0]) {
            LinearSolution::Unique(x) => assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classical_pd() {
        let g = ExtendedGame::from_bimatrix(&Bimatrix2::<Rational>::prisoners_dilemma());
        assert_eq!(pure_equilibria(&g), vec![(1, 1)]);
        let r = mixed_equilibria(&g).unwrap();
        assert_eq!(r.equilibria.len(), 1);
        assert_eq!(r.equilibria[0].payoff, PayoffPair::new(q(1, 1), q(1, 1)));
    }

    #[test]
    fn pd_c_extension() {
        let g = pd_c();
        assert_eq!(pure_equilibria(&g), vec![(1, 2), (2, 1)]);
        let r = mixed_equilibria(&g).unwrap();
        for e in r.pure() {
            assert_eq!(e.payoff, PayoffPair::new(q(19, 8), q(19, 8)));
        }
        let mix = vec![q(0, 1), q(1, 3), q(2, 3), q(0, 1)];
        let target = MixedProfile { p1: mix.clone(), p2: mix.clone() };
        let e = r.equilibria.iter().find(|e| e.profile == target).expect("symmetric mixed equilibrium");
        assert_eq!(e.payoff, PayoffPair::new(q(23, 12), q(23, 12)));
        assert_eq!(e.kind, EquilibriumKind::Mixed);
        let br = best_response_values(&g, &mix, Side::Row).unwrap();
        assert_eq!((br[1].clone(), br[2].clone()), (q(23, 12), q(23, 12)));
        assert!(r.equilibria.iter().all(|e| verify_equilibrium(&g, &e.profile)));
    }

    #[test]
    fn matching_pennies() {
        let g = game([[1, -1], [-1, 1]], [[-1, 1], [1, -1]]);
        assert!(pure_equilibria(&g).is_empty());
        let r = mixed_equilibria(&g).unwrap();
        assert_eq!(r.equilibria.len(), 1);
        let h = vec![q(1, 2), q(1, 2)];
        assert_eq!(r.equilibria[0].profile, MixedProfile { p1: h.clone(), p2: h });
    }

    #[test]
    fn constant_game() {
        let g = game([[2, 2], [2, 2]], [[2, 2], [2, 2]]);
        assert_eq!(pure_equilibria(&g).len(), 4);
        let r = mixed_equilibria(&g).unwrap();
        assert_eq!(r.pure().count(), 4);
        assert!(r.is_degenerate());
        let v = best_response_values(&g, &[q(1, 2), q(1, 2)], Side::Column).unwrap();
        assert_eq!(v, vec![q(2, 1), q(2, 1)]);
    }

    #[test]
    fn best_response_against_pure_is_column() {
        let g = pd_c();
        let e = MixedProfile::<Rational>::pure(4, 0, 3).p2;
        let v = best_response_values(&g, &e, Side::Row).unwrap();
        assert_eq!(v, (0..4).map(|i| g.get(i, 3).get(1).clone()).collect::<Vec<_>>());
        assert!(best_response_values(&g, &[q(1, 1)], Side::Row).is_err());
    }

    #[test]
    fn float_mode_matches_exact() {
        let g = pd_c();
        let exact = mixed_equilibria(&g).unwrap();
        let float = mixed_equilibria(&g.to_f64()).unwrap();
        assert_eq!(exact.equilibria.len(), float.equilibria.len());
        for (a, b) in exact.equilibria.iter().zip(&float.equilibria) {
            assert!(a.profile.to_f64().approx_eq(&b.profile));
        }
    }

    #[test]
    fn json_shape() {
        let r = mixed_equilibria(&pd_c()).unwrap();
        let v = r.to_json();
        let first = &v[0];
        assert_eq!(first["kind"], "pure");
        assert_eq!(first["payoff"], json!(["19/8", "19/8"]));
        assert!(v.as_array().unwrap().iter().any(|e| e["p1"] == json!(["0", "1/3", "2/3", "0"])));
    }
}
