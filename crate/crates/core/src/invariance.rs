//! Isomorphic variants of a classical game, strong isomorphism of finite
//! games, and the quotient-set invariance criterion.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equivalence::{partition_against, CoefficientCache, EquivClassPartition, EquivalenceConfig, Side};
use crate::error::{Error, Result};
use crate::payoff::{payoff_closed_form, payoff_oracle, Bimatrix2, PayoffPair};
use crate::scalar::{Rational, Scalar};
use crate::su2::StrategyParams;

/// Γ⁰ (identity), Γ¹ (rows swapped), Γ² (columns swapped), Γ³ (both).
///
/// Bit 0 is the row swap and bit 1 the column swap, so composition is XOR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IsoVariant {
    G0,
    G1,
    G2,
    G3,
}

impl IsoVariant {
    pub const ALL: [IsoVariant; 4] = [IsoVariant::G0, IsoVariant::G1, IsoVariant::G2, IsoVariant::G3];
    pub const NONTRIVIAL: [IsoVariant; 3] = [IsoVariant::G1, IsoVariant::G2, IsoVariant::G3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> IsoVariant {
        IsoVariant::ALL[k & 3]
    }

    pub fn swaps_rows(self) -> bool {
        self.index() & 1 == 1
    }

    pub fn swaps_cols(self) -> bool {
        self.index() & 2 == 2
    }

    pub fn compose(self, other: IsoVariant) -> IsoVariant {
        IsoVariant::from_index(self.index() ^ other.index())
    }
}

impl fmt::Display for IsoVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.index())
    }
}

impl FromStr for IsoVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim_start_matches(['G', 'g', 'Γ']) {
            "0" => Ok(IsoVariant::G0),
            "1" => Ok(IsoVariant::G1),
            "2" => Ok(IsoVariant::G2),
            "3" => Ok(IsoVariant::G3),
            _ => Err(Error::parse(format!("unknown variant {s:?}"))),
        }
    }
}

/// Apply the row/column swaps of `v` to a 2×2 game.
pub fn iso_variant<T: Scalar>(game: &Bimatrix2<T>, v: IsoVariant) -> Bimatrix2<T> {
    let r = |i: usize| if v.swaps_rows() { 1 - i } else { i };
    let c = |j: usize| if v.swaps_cols() { 1 - j } else { j };
    let d = &game.delta;
    Bimatrix2 {
        delta: [
            [d[r(0)][c(0)].clone(), d[r(0)][c(1)].clone()],
            [d[r(1)][c(0)].clone(), d[r(1)][c(1)].clone()],
        ],
    }
}

/// A square bimatrix over labelled strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedGame<T> {
    pub labels: Vec<String>,
    pub payoffs: Vec<Vec<PayoffPair<T>>>,
}

impl<T: Scalar> ExtendedGame<T> {
    pub fn new(labels: Vec<String>, payoffs: Vec<Vec<PayoffPair<T>>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || payoffs.len() != n || payoffs.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "{n} labels need an {n}x{n} payoff array"
            )));
        }
        let distinct: HashSet<&String> = labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::parse("strategy labels must be distinct"));
        }
        Ok(ExtendedGame { labels, payoffs })
    }

    /// The classical game itself, over the strategies `I` and `iX`.
    pub fn from_bimatrix(game: &Bimatrix2<T>) -> Self {
        ExtendedGame {
            labels: vec!["I".into(), "iX".into()],
            payoffs: game.delta.iter().map(|r| r.to_vec()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &PayoffPair<T> {
        &self.payoffs[i][j]
    }

    /// Player `1` (row) or `2` (column) payoff matrix.
    pub fn matrix(&self, player: usize) -> Vec<Vec<T>> {
        self.payoffs.iter().map(|r| r.iter().map(|p| p.get(player).clone()).collect()).collect()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.size() == other.size()
            && self
                .payoffs
                .iter()
                .zip(&other.payoffs)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.approx_eq(y)))
    }

    /// Largest entrywise deviation over both players.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for (a, b) in self.payoffs.iter().zip(&other.payoffs) {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x.u1.to_f64() - y.u1.to_f64()).abs());
                m = m.max((x.u2.to_f64() - y.u2.to_f64()).abs());
            }
        }
        m
    }

    /// `out[i][j] = self[row_perm[i]][col_perm[j]]`, labels permuted alike.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        ExtendedGame {
            labels: row_perm.iter().map(|&i| self.labels[i].clone()).collect(),
            payoffs: row_perm
                .iter()
                .map(|&i| col_perm.iter().map(|&j| self.payoffs[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn to_f64(&self) -> ExtendedGame<f64> {
        ExtendedGame {
            labels: self.labels.clone(),
            payoffs: self.payoffs.iter().map(|r| r.iter().map(PayoffPair::to_f64).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> =
            self.payoffs.iter().map(|r| Value::Array(r.iter().map(PayoffPair::to_json).collect())).collect();
        json!({ "labels": self.labels, "payoffs": rows })
    }

    /// Parse `{"labels": [...], "payoffs": [[[u1,u2], ...], ...]}`. A 2×2
    /// game without labels is read as the classical game.
    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .get("payoffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("game must have a \"payoffs\" array"))?;
        let payoffs = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::parse("payoff rows must be arrays"))?
                    .iter()
                    .map(PayoffPair::from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = match v.get("labels") {
            Some(Value::Array(ls)) => ls
                .iter()
                .map(|l| l.as_str().map(String::from).ok_or_else(|| Error::parse("labels must be strings")))
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::parse("labels must be an array")),
            None if payoffs.len() == 2 => vec!["I".into(), "iX".into()],
            None => (0..payoffs.len()).map(|k| format!("s{k}")).collect(),
        };
        ExtendedGame::new(labels, payoffs)
    }
}

impl<T: Scalar> fmt::Display for ExtendedGame<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.payoffs.iter().map(|r| r.iter().map(|p| p.to_string()).collect()).collect();
        let label_w = self.labels.iter().map(String::len).max().unwrap_or(0);
        let col_w = cells
            .iter()
            .flatten()
            .map(String::len)
            .chain(self.labels.iter().map(String::len))
            .max()
            .unwrap_or(0);
        write!(f, "{:label_w$}", "")?;
        for l in &self.labels {
            write!(f, "  {l:>col_w$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&cells) {
            write!(f, "{l:label_w$}")?;
            for c in row {
                write!(f, "  {c:>col_w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Strategy labels `I`, `iX`, then `U1`, `U2`, … for the rest.
pub fn default_labels(s: &[StrategyParams]) -> Vec<String> {
    let mut k = 0;
    s.iter()
        .map(|p| {
            if *p == StrategyParams::identity() {
                "I".to_string()
            } else if *p == StrategyParams::ix() {
                "iX".to_string()
            } else {
                k += 1;
                format!("U{k}")
            }
        })
        .collect()
}

/// Label a strategy set, making repeated labels unique.
pub fn labelled(s: &[StrategyParams]) -> Vec<(String, StrategyParams)> {
    let mut seen = HashSet::new();
    default_labels(s)
        .into_iter()
        .zip(s)
        .enumerate()
        .map(|(i, (l, p))| {
            let l = if seen.insert(l.clone()) { l } else { format!("{l}#{i}") };
            (l, *p)
        })
        .collect()
}

/// `payoffs[i][j] = payoff(game, S[i], S[j])` by the closed form.
pub fn build_extended_game<T: Scalar>(game: &Bimatrix2<T>, s: &[(String, StrategyParams)]) -> Result<ExtendedGame<T>> {
    build_with(game, s, payoff_closed_form)
}

/// Same as [`build_extended_game`] with every entry from the statevector oracle.
pub fn build_extended_game_oracle<T: Scalar>(
    game: &Bimatrix2<T>,
    s: &[(String, StrategyParams)],
) -> Result<ExtendedGame<T>> {
    build_with(game, s, payoff_oracle)
}

fn build_with<T: Scalar>(
    game: &Bimatrix2<T>,
    s: &[(String, StrategyParams)],
    f: fn(&Bimatrix2<T>, &StrategyParams, &StrategyParams) -> Result<PayoffPair<T>>,
) -> Result<ExtendedGame<T>> {
    let payoffs = s
        .iter()
        .map(|(_, p)| s.iter().map(|(_, q)| f(game, p, q)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ExtendedGame::new(s.iter().map(|(l, _)| l.clone()).collect(), payoffs)
}

/// Row and column bijections with `g1[i][j] = g2[row_perm[i]][col_perm[j]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoWitness {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl IsoWitness {
    pub fn identity(n: usize) -> Self {
        IsoWitness { row_perm: (0..n).collect(), col_perm: (0..n).collect() }
    }

    pub fn inverse(&self) -> Self {
        IsoWitness { row_perm: invert(&self.row_perm), col_perm: invert(&self.col_perm) }
    }

    /// Witness for `g1 ≅ g3` from `self: g1 ≅ g2` and `next: g2 ≅ g3`.
    pub fn then(&self, next: &IsoWitness) -> Self {
        IsoWitness {
            row_perm: self.row_perm.iter().map(|&i| next.row_perm[i]).collect(),
            col_perm: self.col_perm.iter().map(|&j| next.col_perm[j]).collect(),
        }
    }

    pub fn holds<T: Scalar>(&self, g1: &ExtendedGame<T>, g2: &ExtendedGame<T>) -> bool {
        let n = g1.size();
        n == g2.size()
            && (0..n).all(|i| (0..n).all(|j| g1.get(i, j).approx_eq(g2.get(self.row_perm[i], self.col_perm[j]))))
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &k) in p.iter().enumerate() {
        out[k] = i;
    }
    out
}

fn cmp_pair<T: Scalar>(a: &PayoffPair<T>, b: &PayoffPair<T>) -> Ordering {
    let key = |p: &PayoffPair<T>| (p.u1.to_f64(), p.u2.to_f64());
    let (x, y) = (key(a), key(b));
    x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1))
}

fn sorted_profile<T: Scalar>(cells: Vec<PayoffPair<T>>) -> Vec<PayoffPair<T>> {
    let mut cells = cells;
    cells.sort_by(cmp_pair);
    cells
}

fn same_profile<T: Scalar>(a: &[PayoffPair<T>], b: &[PayoffPair<T>]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

/// Exhaustive search for a strong isomorphism `g1 → g2` (players not exchanged).
///
/// Columns are assigned by backtracking, pruned by each column's sorted
/// payoff multiset; for each complete column map the rows are matched by
/// backtracking over compatible pairs. The first witness in lexicographic
/// order is returned.
pub fn strongly_isomorphic<T: Scalar>(g1: &ExtendedGame<T>, g2: &ExtendedGame<T>) -> Result<Option<IsoWitness>> {
    let n = g1.size();
    if n != g2.size() {
        return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", n, n, g2.size(), g2.size())));
    }
    let col = |g: &ExtendedGame<T>, j: usize| sorted_profile((0..n).map(|i| g.get(i, j).clone()).collect());
    let row = |g: &ExtendedGame<T>, i: usize| sorted_profile(g.payoffs[i].clone());
    let col_ok: Vec<Vec<bool>> = (0..n)
        .map(|j| (0..n).map(|k| same_profile(&col(g1, j), &col(g2, k))).collect())
        .collect();
    let row_ok: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|k| same_profile(&row(g1, i), &row(g2, k))).collect())
        .collect();

    let mut col_perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(search_cols(g1, g2, &col_ok, &row_ok, &mut col_perm, &mut used))
}

fn search_cols<T: Scalar>(
    g1: &ExtendedGame<T>,
    g2: &ExtendedGame<T>,
    col_ok: &[Vec<bool>],
    row_ok: &[Vec<bool>],
    col_perm: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<IsoWitness> {
    let n = g1.size();
    let j = col_perm.len();
    if j == n {
        let mut row_perm = Vec::with_capacity(n);
        let mut rows_used = vec![false; n];
        return match_rows(g1, g2, row_ok, col_perm, &mut row_perm, &mut rows_used)
            .then(|| IsoWitness { row_perm, col_perm: col_perm.clone() });
    }
    for k in 0..n {
        if used[k] || !col_ok[j][k] {
            continue;
        }
        used[k] = true;
        col_perm.push(k);
        if let Some(w) = search_cols(g1, g2, col_ok, row_ok, col_perm, used) {
            return Some(w);
        }
        col_perm.pop();
        used[k] = false;
    }
    None
}

fn match_rows<T: Scalar>(
    g1: &ExtendedGame<T>,
    g2: &ExtendedGame<T>,
    row_ok: &[Vec<bool>],
    col_perm: &[usize],
    row_perm: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let n = g1.size();
    let i = row_perm.len();
    if i == n {
        return true;
    }
    for k in 0..n {
        if used[k] || !row_ok[i][k] {
            continue;
        }
        if (0..n).all(|j| g1.get(i, j).approx_eq(g2.get(k, col_perm[j]))) {
            used[k] = true;
            row_perm.push(k);
            if match_rows(g1, g2, row_ok, col_perm, row_perm, used) {
                return true;
            }
            row_perm.pop();
            used[k] = false;
        }
    }
    false
}

/// One player's half of the criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    pub side: Side,
    /// Classes of `S`.
    pub classes: Vec<Vec<usize>>,
    /// For each `j`, the class of `S` containing `φ(U_j)`, if any.
    pub image_class: Vec<Option<usize>>,
    /// Classes of `φ(S)`, as indices `j` of the preimages.
    pub image_classes: Vec<Vec<usize>>,
    /// `matching[c]`: the `φ(S)` class matched to class `c` of `S`.
    pub matching: Vec<Option<usize>>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub holds: bool,
    pub sides: Vec<SideReport>,
}

/// `{[U_j]} = {[φ(U_j)]}` for both players, with default configuration.
pub fn criterion_holds(s: &[StrategyParams]) -> CriterionReport {
    let cache = CoefficientCache::for_params(s);
    criterion_holds_with(s, &cache, &EquivalenceConfig { mode: cache.mode(), ..Default::default() })
        .expect("natural mode never rejects its own parameters")
}

/// Criterion against `S` (plus sampled opponents), using a shared cache.
pub fn criterion_holds_with(
    s: &[StrategyParams],
    cache: &CoefficientCache,
    config: &EquivalenceConfig,
) -> Result<CriterionReport> {
    if s.is_empty() {
        return Err(Error::Domain("strategy set is empty".into()));
    }
    let opponents = config.opponents(s);
    let images: Vec<StrategyParams> = s.iter().map(StrategyParams::phi).collect();
    let mut sides = Vec::with_capacity(2);
    for side in Side::BOTH {
        sides.push(side_report(s, &images, &opponents, cache, side)?);
    }
    Ok(CriterionReport { holds: sides.iter().all(|r| r.holds), sides })
}

fn side_report(
    s: &[StrategyParams],
    images: &[StrategyParams],
    opponents: &[StrategyParams],
    cache: &CoefficientCache,
    side: Side,
) -> Result<SideReport> {
    let EquivClassPartition { classes } = partition_against(cache, s, opponents, side)?;
    let EquivClassPartition { classes: image_classes } = partition_against(cache, images, opponents, side)?;

    // adjacency: S-class c ~ image-class d when some members are equivalent
    let mut adj = vec![vec![false; image_classes.len()]; classes.len()];
    for (c, members) in classes.iter().enumerate() {
        for (d, imgs) in image_classes.iter().enumerate() {
            adj[c][d] = cache.equivalent(&s[members[0]], &images[imgs[0]], opponents, side)?;
        }
    }
    let image_class = (0..s.len())
        .map(|j| {
            let d = image_classes.iter().position(|m| m.contains(&j)).expect("partition covers all");
            (0..classes.len()).find(|&c| adj[c][d])
        })
        .collect::<Vec<_>>();
    let matching = kuhn(&adj, image_classes.len());
    let holds = classes.len() == image_classes.len() && matching.iter().all(Option::is_some);
    Ok(SideReport { side, classes, image_class, image_classes, matching, holds })
}

/// Maximum bipartite matching; `out[left] = Some(right)`.
fn kuhn(adj: &[Vec<bool>], n_right: usize) -> Vec<Option<usize>> {
    fn augment(u: usize, adj: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for v in 0..owner.len() {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; n_right];
    for u in 0..adj.len() {
        let mut seen = vec![false; n_right];
        augment(u, adj, &mut seen, &mut owner);
    }
    let mut out = vec![None; adj.len()];
    for (v, u) in owner.iter().enumerate() {
        if let Some(u) = u {
            out[*u] = Some(v);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: IsoVariant,
    pub isomorphic: bool,
    pub row_perm: Option<Vec<usize>>,
    pub col_perm: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub all_isomorphic: bool,
    pub variants: Vec<VariantReport>,
}

impl InvarianceReport {
    pub fn failing(&self) -> Vec<IsoVariant> {
        self.variants.iter().filter(|v| !v.isomorphic).map(|v| v.variant).collect()
    }
}

/// Extend `game` and each of its Γ¹–Γ³ variants over `s` and search for a
/// strong isomorphism from the Γ⁰ extension to each.
pub fn verify_invariance_end_to_end<T: Scalar>(
    game: &Bimatrix2<T>,
    s: &[(String, StrategyParams)],
) -> Result<InvarianceReport> {
    let base = build_extended_game(game, s)?;
    let mut variants = Vec::with_capacity(3);
    for v in IsoVariant::NONTRIVIAL {
        let other = build_extended_game(&iso_variant(game, v), s)?;
        let w = strongly_isomorphic(&base, &other)?;
        variants.push(VariantReport {
            variant: v,
            isomorphic: w.is_some(),
            row_perm: w.as_ref().map(|w| w.row_perm.clone()),
            col_perm: w.map(|w| w.col_perm),
        });
    }
    Ok(InvarianceReport { all_isomorphic: variants.iter().all(|v| v.isomorphic), variants })
}

/// `Σᵢ cᵢ Γⁱ` for `Γⁱ = iso_variant(game, i)`.
pub fn combine_variants<T: Scalar>(game: &Bimatrix2<T>, c: &[T; 4]) -> Bimatrix2<T> {
    let variants: Vec<Bimatrix2<T>> = IsoVariant::ALL.iter().map(|&v| iso_variant(game, v)).collect();
    let cell = |i: usize, j: usize| {
        variants
            .iter()
            .zip(c)
            .fold(PayoffPair::zero(), |acc, (g, k)| acc.plus(&g.delta[i][j].scaled(k)))
    };
    Bimatrix2 { delta: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]] }
}

/// Coefficients of the four 2×2 blocks `[[e, f], [g, h]]` on Γ⁰…Γ³.
pub type BlockCoefficients<T> = [[[T; 4]; 2]; 2];

/// The 4×4 game `[[Σeᵢ Γⁱ, Σfᵢ Γⁱ], [Σgᵢ Γⁱ, Σhᵢ Γⁱ]]`.
pub fn block_matrix<T: Scalar>(
    game: &Bimatrix2<T>,
    coeffs: &BlockCoefficients<T>,
    labels: Vec<String>,
) -> Result<ExtendedGame<T>> {
    let mut payoffs = vec![vec![PayoffPair::zero(); 4]; 4];
    for (a, block_row) in coeffs.iter().enumerate() {
        for (b, c) in block_row.iter().enumerate() {
            let block = combine_variants(game, c);
            for r in 0..2 {
                for s in 0..2 {
                    payoffs[2 * a + r][2 * b + s] = block.delta[r][s].clone();
                }
            }
        }
    }
    ExtendedGame::new(labels, payoffs)
}

/// Eight distinct payoff values with no additive coincidences among small combinations.
pub fn generic_game() -> Bimatrix2<Rational> {
    Bimatrix2::from_ints([[(2, 3), (5, 7)], [(11, 13), (17, 19)]])
}

/// For each of Γ¹, Γ², Γ³: the block combination rebuilt on the variant is
/// strongly isomorphic to the original via swapping rows 1↔2, 3↔4 (row
/// swap) and/or the same columns (column swap).
pub fn lemma2_block_invariance(coeffs: &BlockCoefficients<Rational>) -> bool {
    let game = generic_game();
    let labels: Vec<String> = (0..4).map(|k| format!("s{k}")).collect();
    let m = match block_matrix(&game, coeffs, labels.clone()) {
        Ok(m) => m,
        Err(_) => return false,
    };
    IsoVariant::NONTRIVIAL.iter().all(|&v| {
        let Ok(m2) = block_matrix(&iso_variant(&game, v), coeffs, labels.clone()) else {
            return false;
        };
        let swap = [1, 0, 3, 2];
        let ident = [0, 1, 2, 3];
        let w = IsoWitness {
            row_perm: if v.swaps_rows() { swap.to_vec() } else { ident.to_vec() },
            col_perm: if v.swaps_cols() { swap.to_vec() } else { ident.to_vec() },
        };
        w.holds(&m, &m2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn s(t: (i64, i64), a: (i64, i64), b: (i64, i64)) -> StrategyParams {
        StrategyParams::pi_fracs(t, a, b).unwrap()
    }

    fn pd() -> Bimatrix2<Rational> {
        Bimatrix2::prisoners_dilemma()
    }

    #[test]
    fn variants_of_pd() {
        let g1 = iso_variant(&pd(), IsoVariant::G1);
        assert_eq!(g1, Bimatrix2::from_ints([[(5, 0), (1, 1)], [(3, 3), (0, 5)]]));
        let g3 = iso_variant(&pd(), IsoVariant::G3);
        assert_eq!(g3, Bimatrix2::from_ints([[(1, 1), (5, 0)], [(0, 5), (3, 3)]]));
        assert_eq!(iso_variant(&pd(), IsoVariant::G0), pd());
    }

    #[test]
    fn klein_group() {
        for a in IsoVariant::ALL {
            assert_eq!(a.compose(a), IsoVariant::G0);
            for b in IsoVariant::ALL {
                let direct = iso_variant(&iso_variant(&pd(), a), b);
                assert_eq!(direct, iso_variant(&pd(), a.compose(b)));
            }
        }
    }

    #[test]
    fn identity_witness() {
        let g = ExtendedGame::from_bimatrix(&pd());
        assert_eq!(strongly_isomorphic(&g, &g).unwrap(), Some(IsoWitness::identity(2)));
    }

    #[test]
    fn perturbed_game_not_isomorphic() {
        let g = ExtendedGame::from_bimatrix(&pd());
        let mut h = g.clone();
        h.payoffs[1][1].u1 = q(2, 1);
        assert_eq!(strongly_isomorphic(&g, &h).unwrap(), None);
    }

    #[test]
    fn dimension_mismatch() {
        let g = ExtendedGame::from_bimatrix(&pd());
        let set = labelled(&[StrategyParams::identity(), StrategyParams::ix(), s((0, 1), (1, 2), (0, 1))]);
        let h = build_extended_game(&pd(), &set).unwrap();
        assert!(matches!(strongly_isomorphic(&g, &h), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn classical_set_criterion() {
        let set = [StrategyParams::identity(), StrategyParams::ix()];
        let r = criterion_holds(&set);
        assert!(r.holds);
        // φ(I) lands in [iX] and φ(iX) in [I]
        for side in &r.sides {
            assert_eq!(side.image_class, vec![Some(1), Some(0)]);
        }
    }

    #[test]
    fn b_class_criterion() {
        let set = [StrategyParams::identity(), StrategyParams::ix(), s((1, 2), (1, 4), (3, 4)), s((1, 2), (3, 4), (1, 4))];
        assert!(criterion_holds(&set).holds);
    }

    #[test]
    fn non_closed_set() {
        let set = [StrategyParams::identity(), StrategyParams::ix(), s((1, 2), (1, 2), (0, 1))];
        assert_eq!(s((1, 2), (1, 2), (0, 1)).phi(), s((1, 2), (0, 1), (1, 2)));
        assert!(!criterion_holds(&set).holds);
    }

    #[test]
    fn end_to_end_classical_and_bad_sets() {
        let classical = labelled(&[StrategyParams::identity(), StrategyParams::ix()]);
        assert!(verify_invariance_end_to_end(&pd(), &classical).unwrap().all_isomorphic);
        let bad = labelled(&[
            StrategyParams::identity(),
            StrategyParams::ix(),
            s((1, 2), (1, 2), (0, 1)),
            s((1, 2), (0, 1), (0, 1)),
        ]);
        let r = verify_invariance_end_to_end(&generic_game(), &bad).unwrap();
        assert!(!r.all_isomorphic);
        assert!(!r.failing().is_empty());
    }

    #[test]
    fn block_invariance_layouts() {
        let (o, z) = (Rational::one(), Rational::zero());
        let quarter = q(1, 4);
        let e = [o.clone(), z.clone(), z.clone(), z.clone()];
        let uniform = [quarter.clone(), quarter.clone(), quarter.clone(), quarter];
        assert!(lemma2_block_invariance(&[[e.clone(), uniform.clone()], [uniform.clone(), uniform]]));
        // A₂ with a = 1/4
        let (a, a_) = (q(1, 4), q(3, 4));
        let f = [z.clone(), a_.clone(), a.clone(), z.clone()];
        let g = [z.clone(), a.clone(), a_.clone(), z.clone()];
        let h = [q(3, 4), z.clone(), z.clone(), q(1, 4)];
        assert!(lemma2_block_invariance(&[[e.clone(), f], [g, h]]));
        // asymmetric layout: the block swap still maps M′ back onto M
        let f = [o.clone(), z.clone(), z.clone(), z.clone()];
        let g = [z.clone(), o, z.clone(), z.clone()];
        let h = [q(2, 7), q(-3, 5), q(11, 3), q(1, 9)];
        assert!(lemma2_block_invariance(&[[[z.clone(), z.clone(), z.clone(), z.clone()], f], [g, h]]));
    }

    #[test]
    fn json_round_trip() {
        let set = labelled(&[StrategyParams::identity(), StrategyParams::ix(), s((1, 2), (1, 4), (3, 4))]);
        let g = build_extended_game(&pd(), &set).unwrap();
        let v = g.to_json();
        assert_eq!(ExtendedGame::<Rational>::from_json(&v).unwrap(), g);
        assert_eq!(g.labels, vec!["I", "iX", "U1"]);
    }
}
