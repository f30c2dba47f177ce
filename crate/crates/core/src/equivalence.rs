//! Payoff equivalence of unitary strategies against a finite opponent set.
//!
//! Two strategies are equivalent for a player when their coefficient vectors
//! agree against every opponent. Coefficient-level equality makes the
//! relation independent of the classical game.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::payoff::{coefficients, coefficients_exact};
use crate::scalar::Mode;
use crate::su2::StrategyParams;

/// Coefficient tolerance in float mode.
pub const EQUIV_TOL: f64 = 1e-10;

/// Which player's strategies are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Player 1: `coefficients(p, o)`.
    Row,
    /// Player 2: `coefficients(o, p)`.
    Column,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Row, Side::Column];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Row => "row",
            Side::Column => "column",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "row" | "1" | "player1" => Ok(Side::Row),
            "column" | "col" | "2" | "player2" => Ok(Side::Column),
            other => Err(Error::parse(format!("unknown side {other:?}"))),
        }
    }
}

/// A coefficient vector in the arithmetic of its cache.
#[derive(Clone, Debug)]
pub enum Coefficients {
    Exact([Cyclo; 4]),
    Float([f64; 4]),
}

impl Coefficients {
    pub fn matches(&self, other: &Coefficients) -> bool {
        match (self, other) {
            (Coefficients::Exact(a), Coefficients::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a.iter().zip(b).all(|(x, y)| (x - y).abs() <= EQUIV_TOL)
            }
        }
    }

    pub fn to_f64(&self) -> [f64; 4] {
        match self {
            Coefficients::Exact(c) => [c[0].re_f64(), c[1].re_f64(), c[2].re_f64(), c[3].re_f64()],
            Coefficients::Float(c) => *c,
        }
    }
}

/// Memoized coefficient vectors keyed on the ordered strategy pair.
#[derive(Debug)]
pub struct CoefficientCache {
    mode: Mode,
    map: RwLock<HashMap<(StrategyParams, StrategyParams), Arc<Coefficients>>>,
}

impl CoefficientCache {
    pub fn new(mode: Mode) -> Self {
        CoefficientCache { mode, map: RwLock::new(HashMap::new()) }
    }

    /// Exact when every parameter is exact, float otherwise.
    pub fn for_params(params: &[StrategyParams]) -> Self {
        Self::new(natural_mode(params))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, p1: &StrategyParams, p2: &StrategyParams) -> Result<Arc<Coefficients>> {
        let key = (*p1, *p2);
        if let Some(c) = self.map.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(c);
        }
        let c = Arc::new(match self.mode {
            Mode::Exact => Coefficients::Exact(coefficients_exact(p1, p2)?),
            Mode::Float => Coefficients::Float(coefficients(p1, p2).0),
        });
        if let Ok(mut m) = self.map.write() {
            m.insert(key, c.clone());
        }
        Ok(c)
    }

    /// Coefficients of `p` against `o` seen from `side`.
    pub fn sided(&self, p: &StrategyParams, o: &StrategyParams, side: Side) -> Result<Arc<Coefficients>> {
        match side {
            Side::Row => self.get(p, o),
            Side::Column => self.get(o, p),
        }
    }

    pub fn equivalent(
        &self,
        p: &StrategyParams,
        q: &StrategyParams,
        opponents: &[StrategyParams],
        side: Side,
    ) -> Result<bool> {
        for o in opponents {
            if !self.sided(p, o, side)?.matches(&*self.sided(q, o, side)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn natural_mode(params: &[StrategyParams]) -> Mode {
    if params.iter().all(StrategyParams::is_exact) {
        Mode::Exact
    } else {
        Mode::Float
    }
}

/// Which opponents the relation is tested against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub mode: Mode,
    /// Extra seeded random opponents added to the strategy set itself.
    pub sampled_opponents: usize,
    pub seed: u64,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig { mode: Mode::Exact, sampled_opponents: 0, seed: 0 }
    }
}

impl EquivalenceConfig {
    /// `S` plus the sampled opponents. Exact mode samples the π/12 lattice.
    pub fn opponents(&self, s: &[StrategyParams]) -> Vec<StrategyParams> {
        let mut out = s.to_vec();
        let mut rng = StdRng::seed_from_u64(self.seed);
        for _ in 0..self.sampled_opponents {
            let p = match self.mode {
                Mode::Exact => StrategyParams::pi_fracs(
                    (rng.gen_range(0..=12), 12),
                    (rng.gen_range(0..24), 12),
                    (rng.gen_range(0..24), 12),
                ),
                Mode::Float => StrategyParams::new(
                    Angle::Radians(rng.gen_range(0.0..=std::f64::consts::PI)),
                    Angle::Radians(rng.gen_range(0.0..std::f64::consts::TAU)),
                    Angle::Radians(rng.gen_range(0.0..std::f64::consts::TAU)),
                ),
            };
            out.push(p.expect("sampled angles are in range"));
        }
        out
    }
}

/// True iff `p` and `q` have equal coefficients against every opponent.
/// Exact arithmetic is used when all parameters are exact.
pub fn are_equivalent(p: &StrategyParams, q: &StrategyParams, opponents: &[StrategyParams], side: Side) -> bool {
    let mut all = vec![*p, *q];
    all.extend_from_slice(opponents);
    CoefficientCache::for_params(&all)
        .equivalent(p, q, opponents, side)
        .expect("natural mode never rejects its own parameters")
}

/// Disjoint classes of indices into a strategy set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivClassPartition {
    pub classes: Vec<Vec<usize>>,
}

impl EquivClassPartition {
    /// Index of the class containing `i`.
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partition `items` by equivalence against `opponents`. Classes are ordered
/// by their smallest index; members ascend.
pub fn partition_against(
    cache: &CoefficientCache,
    items: &[StrategyParams],
    opponents: &[StrategyParams],
    side: Side,
) -> Result<EquivClassPartition> {
    let n = items.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if uf.find(i) != uf.find(j) && cache.equivalent(&items[i], &items[j], opponents, side)? {
                uf.union(i, j);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_to_class = HashMap::new();
    for i in 0..n {
        let r = uf.find(i);
        let k = *root_to_class.entry(r).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(i);
    }
    Ok(EquivClassPartition { classes })
}

/// The partition of `s` induced by equivalence with opponents `s` (plus any sampled ones).
pub fn partition(s: &[StrategyParams], side: Side, config: &EquivalenceConfig) -> Result<EquivClassPartition> {
    if s.is_empty() {
        return Err(Error::Domain("strategy set is empty".into()));
    }
    let cache = CoefficientCache::new(config.mode);
    partition_against(&cache, s, &config.opponents(s), side)
}
