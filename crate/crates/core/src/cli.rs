//! Command-line front end for the `ewl` binary.
//!
//! Exit codes: 0 success, 1 verification failure or oracle mismatch, 2 input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::angle::Angle;
use crate::classes::{extension_matrix, limit_check_on, limit_reference_game, strategy_set, ClassId, ClassParams, Direction};
use crate::error::{Error, Result};
use crate::invariance::{
    build_extended_game, build_extended_game_oracle, criterion_holds, generic_game, verify_invariance_end_to_end,
    ExtendedGame,
};
use crate::nash::mixed_equilibria;
use crate::payoff::{coefficients, coefficients_exact, coefficients_oracle, payoff_closed_form, payoff_oracle, Bimatrix2};
use crate::scalar::{Mode, Rational, Scalar};
use crate::solver::{search_solutions, LatticeSpec};
use crate::su2::StrategyParams;

type Labelled = Vec<(String, StrategyParams)>;

#[derive(Parser, Debug)]
#[command(name = "ewl", version, about = "EWL quantum extensions of 2x2 games with finite strategy sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the extended game for a class or an explicit strategy set.
    Extend(ExtendArgs),
    /// Check that the extensions of all four isomorphic variants are strongly isomorphic.
    Verify(VerifyArgs),
    /// Search the phase lattice for strategy sets satisfying the invariance criterion.
    Enumerate(EnumerateArgs),
    /// Pure and mixed Nash equilibria.
    Equilibria(EquilibriaArgs),
    /// Payoff of a single strategy profile.
    Payoff(PayoffArgs),
    /// Convergence of classes D and E to their A-class limits.
    Limits(LimitsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug, Clone)]
pub struct GameArg {
    /// Game as a file path or inline JSON: {"payoffs": [[[a,b],[c,d]],[[e,f],[g,h]]]}.
    #[arg(long)]
    pub game: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct StrategyArgs {
    /// Strategy class: A1, A2, B, C, D1, D2, E1, E2.
    #[arg(long)]
    pub class: Option<ClassId>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Option<Angle>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<Angle>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: Option<Angle>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2: Option<Angle>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: Option<Angle>,
    /// JSON list of strategies, each [theta, alpha, beta] or {"theta", "alpha", "beta"}.
    #[arg(long, conflicts_with = "class")]
    pub strategies: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub game: GameArg,
    #[command(flatten)]
    pub set: StrategyArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Recompute every entry through the statevector and fail on mismatch.
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub game: GameArg,
    #[command(flatten)]
    pub set: StrategyArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// θ₁ value; repeat for several.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub theta: Vec<Angle>,
    /// Phase step: "1/4 pi" or "1/8 pi".
    #[arg(long, default_value = "1/4 pi")]
    pub step: Angle,
    /// Pair every θ₁ with every θ₂ instead of π − θ₁.
    #[arg(long)]
    pub free_theta2: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EquilibriaArgs {
    #[command(flatten)]
    pub game: GameArg,
    /// Extend the classical game with the given class or strategies first.
    #[arg(long)]
    pub extend_first: bool,
    #[command(flatten)]
    pub set: StrategyArgs,
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PayoffArgs {
    #[command(flatten)]
    pub game: GameArg,
    /// Player 1 strategy: "theta,alpha,beta" or JSON.
    #[arg(long, allow_hyphen_values = true)]
    pub p1: String,
    /// Player 2 strategy: "theta,alpha,beta" or JSON.
    #[arg(long, allow_hyphen_values = true)]
    pub p2: String,
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    /// D1, D2, E1 or E2; all four when absent.
    #[arg(long)]
    pub class: Option<ClassId>,
    /// 0 or pi; both when absent.
    #[arg(long)]
    pub direction: Option<Direction>,
    /// Game to evaluate on (float); defaults to PD/5.
    #[arg(long)]
    pub game: Option<String>,
    /// Offsets from the endpoint; repeat for several.
    #[arg(long = "epsilon", default_values_t = vec![1e-3, 1e-6])]
    pub epsilons: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Result of a command: text for stdout and a verdict.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

fn read_json(src: &str) -> Result<Value> {
    let t = src.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        src.to_string()
    } else {
        fs::read_to_string(src).map_err(|e| Error::parse(format!("cannot read {src}: {e}")))?
    };
    Ok(serde_json::from_str(&text)?)
}

fn load_game<T: Scalar>(src: Option<&str>) -> Result<Bimatrix2<T>> {
    match src {
        Some(s) => Bimatrix2::from_json(&read_json(s)?),
        None => Err(Error::parse("--game is required")),
    }
}

fn parse_strategy(v: &Value) -> Result<StrategyParams> {
    let angle = |x: &Value| -> Result<Angle> { Ok(serde_json::from_value(x.clone())?) };
    match v {
        Value::Array(a) if a.len() == 3 => StrategyParams::new(angle(&a[0])?, angle(&a[1])?, angle(&a[2])?),
        Value::Object(_) => Ok(serde_json::from_value(v.clone())?),
        other => Err(Error::parse(format!("strategy must be [theta, alpha, beta] or an object, got {other}"))),
    }
}

fn parse_strategy_arg(s: &str) -> Result<StrategyParams> {
    let t = s.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return parse_strategy(&serde_json::from_str(s)?);
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b, c] => StrategyParams::new(a.parse()?, b.parse()?, c.parse()?),
        _ => Err(Error::parse(format!("strategy {s:?} must be \"theta,alpha,beta\""))),
    }
}

impl StrategyArgs {
    fn class_params(&self, class_id: ClassId) -> Result<ClassParams> {
        let mut p = match class_id {
            ClassId::A1 if self.alpha1.is_some() && self.beta2.is_none() => {
                ClassParams::a1(self.alpha1.expect("checked"))
            }
            ClassId::A2 if self.alpha2.is_some() && self.beta1.is_none() => {
                ClassParams::a2(self.alpha2.expect("checked"))
            }
            _ => ClassParams::defaults(class_id, self.theta1)?,
        };
        if let Some(t) = self.theta1 {
            p.theta1 = t;
        }
        for (slot, v) in [
            (&mut p.alpha1, self.alpha1),
            (&mut p.beta1, self.beta1),
            (&mut p.alpha2, self.alpha2),
            (&mut p.beta2, self.beta2),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        p.validate()?;
        Ok(p)
    }

    fn has_any(&self) -> bool {
        self.class.is_some() || self.strategies.is_some()
    }

    /// Labelled strategy set, plus class parameters when given by class.
    fn resolve(&self) -> Result<(Labelled, Option<ClassParams>)> {
        if let Some(c) = self.class {
            let p = self.class_params(c)?;
            return Ok((strategy_set(&p)?, Some(p)));
        }
        let src = self.strategies.as_deref().ok_or_else(|| Error::parse("give --class or --strategies"))?;
        let list = match read_json(src)? {
            Value::Array(a) => a.iter().map(parse_strategy).collect::<Result<Vec<_>>>()?,
            other => return Err(Error::parse(format!("--strategies must be a JSON list, got {other}"))),
        };
        if list.is_empty() {
            return Err(Error::parse("--strategies is empty"));
        }
        Ok((crate::invariance::labelled(&list), None))
    }
}

fn check_exact(mode: Mode, s: &[(String, StrategyParams)]) -> Result<()> {
    if mode == Mode::Exact {
        if let Some((l, p)) = s.iter().find(|(_, p)| !p.is_exact()) {
            return Err(Error::NotExact(format!("angles as rational multiples of pi; strategy {l} = {p}")));
        }
    }
    Ok(())
}

fn game_csv<T: Scalar>(g: &ExtendedGame<T>) -> String {
    let mut out = String::from("row,col,u1,u2\n");
    for (i, r) in g.labels.iter().enumerate() {
        for (j, c) in g.labels.iter().enumerate() {
            let p = g.get(i, j);
            out.push_str(&format!("{r},{c},{},{}\n", p.get(1), p.get(2)));
        }
    }
    out
}

fn render_game<T: Scalar>(g: &ExtendedGame<T>, format: Format) -> String {
    match format {
        Format::Json => pretty_json(&g.to_json()),
        Format::Csv => game_csv(g),
        Format::Pretty => g.to_string(),
    }
}

fn pretty_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn build_game<T: Scalar>(
    game: &Bimatrix2<T>,
    s: &[(String, StrategyParams)],
    class: Option<&ClassParams>,
    oracle_check: bool,
) -> Result<(ExtendedGame<T>, bool)> {
    let g = match class {
        Some(p) => extension_matrix(p, game)?,
        None => build_extended_game(game, s)?,
    };
    if !oracle_check {
        return Ok((g, true));
    }
    let oracle = build_extended_game_oracle(game, s)?;
    let agrees = match T::MODE {
        Mode::Exact => g == oracle,
        Mode::Float => g.max_abs_diff(&oracle) <= 1e-10,
    };
    if !agrees {
        eprintln!("oracle mismatch: max deviation {}", g.max_abs_diff(&oracle));
    }
    Ok((g, agrees))
}

fn extend<T: Scalar>(a: &ExtendArgs) -> Result<Outcome> {
    let game: Bimatrix2<T> = load_game(a.game.game.as_deref())?;
    let (s, class) = a.set.resolve()?;
    check_exact(T::MODE, &s)?;
    let (g, ok) = build_game(&game, &s, class.as_ref(), a.oracle_check)?;
    Ok(Outcome { text: render_game(&g, a.format), ok })
}

fn verify<T: Scalar>(a: &VerifyArgs, game: Bimatrix2<T>) -> Result<Outcome> {
    let (s, _) = a.set.resolve()?;
    check_exact(T::MODE, &s)?;
    let params: Vec<StrategyParams> = s.iter().map(|(_, p)| *p).collect();
    let criterion = criterion_holds(&params);
    let report = verify_invariance_end_to_end(&game, &s)?;
    let text = match a.format {
        Format::Json => pretty_json(&json!({
            "labels": s.iter().map(|(l, _)| l).collect::<Vec<_>>(),
            "all_isomorphic": report.all_isomorphic,
            "criterion": criterion,
            "variants": report.variants,
        })),
        Format::Csv => {
            let mut out = String::from("variant,isomorphic,row_perm,col_perm\n");
            for v in &report.variants {
                let perm = |p: &Option<Vec<usize>>| {
                    p.as_ref().map(|p| p.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).unwrap_or_default()
                };
                out.push_str(&format!("{},{},{},{}\n", v.variant, v.isomorphic, perm(&v.row_perm), perm(&v.col_perm)));
            }
            out
        }
        Format::Pretty => {
            let mut out = format!("criterion {{[U]}} = {{[phi(U)]}}: {}\n", if criterion.holds { "holds" } else { "fails" });
            for v in &report.variants {
                match (&v.row_perm, &v.col_perm) {
                    (Some(r), Some(c)) => out.push_str(&format!("{}: isomorphic  rows {r:?}  cols {c:?}\n", v.variant)),
                    _ => out.push_str(&format!("{}: NOT isomorphic\n", v.variant)),
                }
            }
            out
        }
    };
    Ok(Outcome { text, ok: report.all_isomorphic })
}

fn enumerate(a: &EnumerateArgs) -> Result<Outcome> {
    let spec = LatticeSpec::new(a.theta.clone()).with_step(a.step).with_free_theta2(a.free_theta2);
    let r = search_solutions(&spec)?;
    let summary = r.summary();
    let mut notes = Vec::new();
    for t in &a.theta {
        for (at, pair, name) in [
            (Angle::zero(), (0, 3), "alpha1 + beta2 = n pi"),
            (Angle::pi(), (2, 1), "alpha2 + beta1 = n pi"),
        ] {
            if t.value_eq(at) {
                let hits: Vec<_> = r.hits.iter().filter(|h| h.theta1.value_eq(at)).collect();
                let sat = hits
                    .iter()
                    .filter(|h| (h.phases[pair.0] + h.phases[pair.1]).congruent(Angle::zero(), Angle::pi()))
                    .count();
                notes.push(json!({"theta1": at, "congruence": name, "hits": hits.len(), "satisfied": sat}));
            }
        }
    }
    let summary_line = summary.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
    let text = match a.format {
        Format::Csv => {
            eprintln!("summary: {summary_line} total={}", r.hits.len());
            for n in &notes {
                eprintln!("theta1={}: {}/{} hits satisfy {}", n["theta1"], n["satisfied"], n["hits"], n["congruence"]);
            }
            r.to_csv()
        }
        Format::Json => pretty_json(&json!({
            "points_tested": r.points_tested,
            "summary": summary,
            "congruences": notes,
            "hits": r.hits,
        })),
        Format::Pretty => {
            let mut out = format!("tested {} points, {} hits\n{summary_line}\n", r.points_tested, r.hits.len());
            for n in &notes {
                out.push_str(&format!(
                    "theta1={}: {}/{} hits satisfy {}\n",
                    n["theta1"].as_str().unwrap_or_default(),
                    n["satisfied"],
                    n["hits"],
                    n["congruence"].as_str().unwrap_or_default()
                ));
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

fn equilibria<T: Scalar>(a: &EquilibriaArgs) -> Result<Outcome> {
    let src = a.game.game.as_deref().ok_or_else(|| Error::parse("--game is required"))?;
    let v = read_json(src)?;
    let (g, ok) = if a.extend_first {
        let game = Bimatrix2::<T>::from_json(&v)?;
        let (s, class) = a.set.resolve()?;
        check_exact(T::MODE, &s)?;
        build_game(&game, &s, class.as_ref(), a.oracle_check)?
    } else {
        if a.set.has_any() {
            return Err(Error::parse("--class/--strategies need --extend-first"));
        }
        (ExtendedGame::<T>::from_json(&v)?, true)
    };
    let r = mixed_equilibria(&g)?;
    for (s1, s2) in &r.degenerate_supports {
        let name = |s: &[usize]| s.iter().map(|&i| g.labels[i].as_str()).collect::<Vec<_>>().join("+");
        eprintln!("warning: degenerate support pair ({}; {}): solution family sampled, not enumerated", name(s1), name(s2));
    }
    let text = match a.format {
        Format::Json => pretty_json(&r.to_json()),
        Format::Pretty => r.to_pretty(),
        Format::Csv => {
            let mut out = String::from("kind,p1,p2,u1,u2,degenerate\n");
            let v = |x: &[T]| x.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
            for e in &r.equilibria {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    e.kind,
                    v(&e.profile.p1),
                    v(&e.profile.p2),
                    e.payoff.get(1),
                    e.payoff.get(2),
                    e.degenerate
                ));
            }
            out
        }
    };
    Ok(Outcome { text, ok })
}

fn payoff<T: Scalar>(a: &PayoffArgs) -> Result<Outcome> {
    let game: Bimatrix2<T> = load_game(a.game.game.as_deref())?;
    let p1 = parse_strategy_arg(&a.p1)?;
    let p2 = parse_strategy_arg(&a.p2)?;
    check_exact(T::MODE, &[("p1".into(), p1), ("p2".into(), p2)])?;
    let u = payoff_closed_form(&game, &p1, &p2)?;
    let coeffs: Value = match T::MODE {
        Mode::Exact => coefficients_exact(&p1, &p2)?
            .iter()
            .map(|c| T::from_cyclo(c).map(|x| x.to_json()).unwrap_or_else(|_| json!(c.re_f64())))
            .collect(),
        Mode::Float => json!(coefficients(&p1, &p2).0),
    };
    let mut ok = true;
    if a.oracle_check {
        let o = payoff_oracle(&game, &p1, &p2)?;
        ok = match T::MODE {
            Mode::Exact => o == u,
            Mode::Float => o.approx_eq(&u),
        };
        let dev = coefficients(&p1, &p2).max_abs_diff(&coefficients_oracle(&p1, &p2));
        if !ok || dev > 1e-10 {
            ok = false;
            eprintln!("oracle mismatch: closed form {u}, statevector {o}, coefficient deviation {dev:e}");
        }
    }
    let text = match a.format {
        Format::Json => pretty_json(&json!({
            "p1": p1,
            "p2": p2,
            "coefficients": coeffs,
            "payoff": u.to_json(),
        })),
        Format::Csv => format!("u1,u2\n{},{}\n", u.get(1), u.get(2)),
        Format::Pretty => format!("{p1} vs {p2}: payoff {u}\n"),
    };
    Ok(Outcome { text, ok })
}

fn limits(a: &LimitsArgs) -> Result<Outcome> {
    let game = match a.game.as_deref() {
        Some(s) => Bimatrix2::<f64>::from_json(&read_json(s)?)?,
        None => limit_reference_game(),
    };
    let classes = match a.class {
        Some(c) => vec![c],
        None => vec![ClassId::D1, ClassId::D2, ClassId::E1, ClassId::E2],
    };
    let dirs = a.direction.map_or(Direction::BOTH.to_vec(), |d| vec![d]);
    let mut reports = Vec::new();
    for c in classes {
        for &d in &dirs {
            reports.push(limit_check_on(&game, c, d, &a.epsilons)?);
        }
    }
    let ok = reports.iter().all(|r| r.converged);
    let text = match a.format {
        Format::Json => pretty_json(&serde_json::to_value(&reports)?),
        _ => {
            let mut out = String::from("class,direction,target,theta1,weight,max_deviation,bound,within\n");
            for r in &reports {
                let target = format!("{}|{}", r.target.class_id, target_phase(&r.target));
                for s in &r.samples {
                    out.push_str(&format!(
                        "{},{},{},{},{:e},{:e},{:e},{}\n",
                        r.class, r.direction, target, s.theta1, s.weight, s.max_deviation, s.bound, s.within
                    ));
                }
            }
            out
        }
    };
    Ok(Outcome { text, ok })
}

fn target_phase(p: &ClassParams) -> String {
    match p.class_id {
        ClassId::A1 => format!("alpha1={}", p.alpha1),
        ClassId::A2 => format!("alpha2={}", p.alpha2),
        _ => String::new(),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Extend(a) => match a.game.mode {
            ModeArg::Exact => extend::<Rational>(a),
            ModeArg::Float => extend::<f64>(a),
        },
        Command::Verify(a) => match (a.game.mode, a.game.game.as_deref()) {
            (ModeArg::Exact, None) => verify(a, generic_game()),
            (ModeArg::Float, None) => verify(a, generic_game().to_f64()),
            (ModeArg::Exact, Some(s)) => verify(a, load_game::<Rational>(Some(s))?),
            (ModeArg::Float, Some(s)) => verify(a, load_game::<f64>(Some(s))?),
        },
        Command::Enumerate(a) => enumerate(a),
        Command::Equilibria(a) => match a.game.mode {
            ModeArg::Exact => equilibria::<Rational>(a),
            ModeArg::Float => equilibria::<f64>(a),
        },
        Command::Payoff(a) => match a.game.mode {
            ModeArg::Exact => payoff::<Rational>(a),
            ModeArg::Float => payoff::<f64>(a),
        },
        Command::Limits(a) => limits(a),
    }
}

fn output_of(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Extend(a) => a.output.as_ref(),
        Command::Verify(a) => a.output.as_ref(),
        Command::Enumerate(a) => a.output.as_ref(),
        Command::Equilibria(a) => a.output.as_ref(),
        Command::Payoff(a) => a.output.as_ref(),
        Command::Limits(a) => a.output.as_ref(),
    }
}

/// Runs a parsed command and maps the outcome to an exit code.
pub fn run(cli: &Cli) -> ExitCode {
    let outcome = match dispatch(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match output_of(cli) {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", outcome.text),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

pub fn main() -> ExitCode {
    run(&Cli::parse())
}
