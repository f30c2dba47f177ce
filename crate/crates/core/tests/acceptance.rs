//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use ewl_core::angle::Angle;
use ewl_core::classes::{
    enumerate_discrete_solutions, extension_matrix, limit_check_on, strategy_set, ClassId, ClassParams, Direction,
    Family,
};
use ewl_core::cyclotomic::Cyclo;
use ewl_core::invariance::{build_extended_game, labelled, verify_invariance_end_to_end, ExtendedGame};
use ewl_core::nash::{mixed_equilibria, MixedProfile};
use ewl_core::payoff::{
    coefficients, coefficients_exact, coefficients_oracle, payoff_closed_form, payoff_oracle, Bimatrix2, PayoffPair,
};
use ewl_core::solver::{search_solutions, LatticeSpec, SearchResult};
use ewl_core::{Rational, StrategyParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn pi(n: i64, d: i64) -> Angle {
    Angle::pi_frac(n, d)
}

fn pd() -> Bimatrix2<Rational> {
    Bimatrix2::prisoners_dilemma()
}

fn pd_c() -> Result<ExtendedGame<Rational>, String> {
    let p = ClassParams::defaults(ClassId::C, Some(pi(1, 3))).map_err(|e| e.to_string())?;
    extension_matrix(&p, &pd()).map_err(|e| e.to_string())
}

fn random_rational_game(rng: &mut StdRng) -> Bimatrix2<Rational> {
    let mut v = || q(rng.gen_range(-20..=20), rng.gen_range(1..=4));
    Bimatrix2::from_matrices([[v(), v()], [v(), v()]], [[v(), v()], [v(), v()]])
}

fn random_float_game(rng: &mut StdRng, hi: f64) -> Bimatrix2<f64> {
    let mut v = || rng.gen_range(0.0..=hi);
    Bimatrix2::from_matrices([[v(), v()], [v(), v()]], [[v(), v()], [v(), v()]])
}

fn random_params(rng: &mut StdRng) -> StrategyParams {
    use std::f64::consts::{PI, TAU};
    StrategyParams::new(
        Angle::radians(rng.gen_range(0.0..=PI)),
        Angle::radians(rng.gen_range(0.0..TAU)),
        Angle::radians(rng.gen_range(0.0..TAU)),
    )
    .expect("in range")
}

/// Reference member of every class; C, D and E at θ₁ = π/3 (t = 3/4).
fn reference_classes() -> Vec<ClassParams> {
    ClassId::ALL
        .into_iter()
        .map(|c| {
            let theta = if c.has_free_theta() { Some(pi(1, 3)) } else { None };
            ClassParams::defaults(c, theta).expect("reference parameters")
        })
        .collect()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:.0?}"))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let g = pd_c()?;
    let p = |a: (i64, i64), b: (i64, i64)| PayoffPair::new(q(a.0, a.1), q(b.0, b.1));
    let c = |n, d| PayoffPair::new(q(n, d), q(n, d));
    let expected = [
        [c(3, 1), p((0, 1), (5, 1)), c(17, 8), c(19, 8)],
        [p((5, 1), (0, 1)), c(1, 1), c(19, 8), c(17, 8)],
        [c(17, 8), c(19, 8), c(27, 16), p((57, 16), (17, 16))],
        [c(19, 8), c(17, 8), p((17, 16), (57, 16)), c(43, 16)],
    ];
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            ensure(g.get(i, j) == e, format!("entry ({i},{j}) = {}, expected {e}", g.get(i, j)))?;
        }
    }
    ensure(g.labels == ["I", "iX", "U1", "U2"], format!("labels {:?}", g.labels))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("all 16 entries exact in {:.1?}", start.elapsed()))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let g = pd_c()?;
    let r = mixed_equilibria(&g).map_err(|e| e.to_string())?;
    for (i, j) in [(1, 2), (2, 1)] {
        let prof = MixedProfile::<Rational>::pure(4, i, j);
        let e = r.equilibria.iter().find(|e| e.profile == prof).ok_or(format!("missing pure ({i},{j})"))?;
        ensure(e.payoff == PayoffPair::new(q(19, 8), q(19, 8)), format!("pure payoff {}", e.payoff))?;
    }
    let mix = vec![q(0, 1), q(1, 3), q(2, 3), q(0, 1)];
    let target = MixedProfile { p1: mix.clone(), p2: mix };
    let e = r.equilibria.iter().find(|e| e.profile == target).ok_or("missing mixed (0,1/3,2/3,0)")?;
    ensure(e.payoff == PayoffPair::new(q(23, 12), q(23, 12)), format!("mixed payoff {}", e.payoff))?;
    let classical = mixed_equilibria(&ExtendedGame::from_bimatrix(&pd())).map_err(|e| e.to_string())?;
    ensure(classical.equilibria.len() == 1, format!("classical PD has {} equilibria", classical.equilibria.len()))?;
    ensure(
        classical.equilibria[0].payoff == PayoffPair::new(q(1, 1), q(1, 1)),
        format!("classical payoff {}", classical.equilibria[0].payoff),
    )?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{} equilibria on the C extension, classical PD unique at (1, 1)", r.equilibria.len()))
}

fn matches_family(r: &SearchResult, fam: Family) -> Result<usize, String> {
    let listed = enumerate_discrete_solutions(fam).map_err(|e| e.to_string())?;
    let found: Vec<[Angle; 4]> =
        r.hits.iter().filter(|h| h.classes.iter().any(|c| c.family() == fam)).map(|h| h.phases).collect();
    for t in &listed {
        ensure(found.iter().any(|f| f == t), format!("{fam} tuple {t:?} not found"))?;
    }
    ensure(found.len() == listed.len(), format!("{fam}: {} hits vs {} listed", found.len(), listed.len()))?;
    Ok(found.len())
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let half = search_solutions(&LatticeSpec::new(vec![pi(1, 2)])).map_err(|e| e.to_string())?;
    let third = search_solutions(&LatticeSpec::new(vec![pi(1, 3)])).map_err(|e| e.to_string())?;
    let b = matches_family(&half, Family::B)?;
    let c = matches_family(&half, Family::C)?;
    let d = matches_family(&third, Family::D)?;
    let e = matches_family(&third, Family::E)?;
    ensure(third.summary()["B"] == 0, "B hits at theta1 = pi/3")?;
    within(start.elapsed(), Duration::from_secs(60))?;
    let counts = format!("B={b} C={c} (pi/2), D={d} E={e} (pi/3)");
    let (u_half, u_third) = (half.unclassified().count(), third.unclassified().count());
    ensure(
        u_half == 0 && u_third == 0,
        format!("{counts} match, but {u_half} unclassified at pi/2 and {u_third} at pi/3 (expected 0)"),
    )?;
    Ok(counts)
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let games: Vec<_> = (0..20).map(|_| random_rational_game(&mut rng)).collect();
    for p in reference_classes() {
        let s = strategy_set(&p).map_err(|e| e.to_string())?;
        for g in &games {
            let r = verify_invariance_end_to_end(g, &s).map_err(|e| e.to_string())?;
            ensure(r.all_isomorphic, format!("class {} not invariant on {g:?}", p.class_id))?;
        }
    }
    let bad = labelled(&[
        StrategyParams::identity(),
        StrategyParams::ix(),
        StrategyParams::pi_fracs((1, 2), (1, 2), (0, 1)).map_err(|e| e.to_string())?,
        StrategyParams::pi_fracs((1, 2), (0, 1), (0, 1)).map_err(|e| e.to_string())?,
    ]);
    let r = verify_invariance_end_to_end(&games[0], &bad).map_err(|e| e.to_string())?;
    ensure(!r.all_isomorphic, "known non-closed set passed every variant")?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("8 classes x 20 games invariant, non-closed set fails {} variant(s)", r.failing().len()))
}

fn criterion_5() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut worst, mut worst_sum) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let g = random_float_game(&mut rng, 10.0);
        let (a, b) = (random_params(&mut rng), random_params(&mut rng));
        let closed = payoff_closed_form(&g, &a, &b).map_err(|e| e.to_string())?;
        let oracle = payoff_oracle(&g, &a, &b).map_err(|e| e.to_string())?;
        worst = worst.max((closed.u1 - oracle.u1).abs()).max((closed.u2 - oracle.u2).abs());
        worst = worst.max(coefficients(&a, &b).max_abs_diff(&coefficients_oracle(&a, &b)));
        worst_sum = worst_sum.max((coefficients(&a, &b).sum() - 1.0).abs());
    }
    ensure(worst <= 1e-10, format!("max closed-form/statevector deviation {worst:e}"))?;
    ensure(worst_sum <= 1e-12, format!("coefficient sum off by {worst_sum:e}"))?;
    Ok(format!("max deviation {worst:.1e}, max |sum - 1| {worst_sum:.1e}"))
}

fn shifted(phases: [Angle; 4], by: [Angle; 4]) -> [Angle; 4] {
    [phases[0] + by[0], phases[1] + by[1], phases[2] + by[2], phases[3] + by[3]]
}

fn lemma1_shifts() -> Vec<[Angle; 4]> {
    let z = Angle::zero();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let mut s = [z; 4];
            s[i] = Angle::pi();
            s[j] = Angle::pi();
            out.push(s);
        }
    }
    out.push([pi(1, 2); 4]);
    out
}

fn pair(t1: Angle, t2: Angle, ph: [Angle; 4]) -> (StrategyParams, StrategyParams) {
    (StrategyParams::new(t1, ph[0], ph[1]).expect("valid"), StrategyParams::new(t2, ph[2], ph[3]).expect("valid"))
}

fn criterion_6() -> Check {
    let thetas = [Angle::zero(), pi(1, 3), pi(1, 2), Angle::pi()];
    let lattice: Vec<Angle> = (0..8).map(|k| pi(k, 4)).collect();
    let mut exact_checks = 0;
    for &t1 in &thetas {
        for &t2 in &thetas {
            for k in 0..64usize {
                let ph = [lattice[k % 8], lattice[(k / 8) % 8], lattice[(k * 3) % 8], lattice[(k * 5 + 1) % 8]];
                let (a, b) = pair(t1, t2, ph);
                let base: [Cyclo; 4] = coefficients_exact(&a, &b).map_err(|e| e.to_string())?;
                for s in lemma1_shifts() {
                    let (a2, b2) = pair(t1, t2, shifted(ph, s));
                    ensure(coefficients_exact(&a2, &b2).map_err(|e| e.to_string())? == base, format!("{a:?} {b:?} {s:?}"))?;
                    exact_checks += 1;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (a, b) = (random_params(&mut rng), random_params(&mut rng));
        let ph = [a.alpha, a.beta, b.alpha, b.beta];
        let base = coefficients(&a, &b);
        for s in lemma1_shifts() {
            let (a2, b2) = pair(a.theta, b.theta, shifted(ph, s.map(|x| Angle::radians(x.to_radians()))));
            worst = worst.max(coefficients(&a2, &b2).max_abs_diff(&base));
        }
    }
    ensure(worst <= 1e-12, format!("float deviation {worst:e}"))?;
    Ok(format!("{exact_checks} exact lattice checks, float max deviation {worst:.1e}"))
}

fn criterion_7() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let games: Vec<_> = (0..10).map(|_| random_rational_game(&mut rng)).collect();
    for p in reference_classes() {
        let s = strategy_set(&p).map_err(|e| e.to_string())?;
        for g in &games {
            let block = extension_matrix(&p, g).map_err(|e| e.to_string())?;
            let direct = build_extended_game(g, &s).map_err(|e| e.to_string())?;
            ensure(block == direct, format!("class {} differs on {g:?}", p.class_id))?;
        }
    }
    Ok("block formulas equal the closed form for 8 classes x 10 games".into())
}

fn criterion_8() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let g = random_float_game(&mut rng, 5.0);
        for c in [ClassId::D1, ClassId::D2, ClassId::E1, ClassId::E2] {
            for d in Direction::BOTH {
                let r = limit_check_on(&g, c, d, &[1e-6]).map_err(|e| e.to_string())?;
                let dev = r.samples[0].max_deviation;
                ensure(dev <= 1e-5, format!("{c} towards {d}: deviation {dev:e}"))?;
                worst = worst.max(dev);
            }
        }
    }
    Ok(format!("max deviation {worst:.1e} at 1e-6 from the endpoint"))
}

fn criterion_9() -> Check {
    let u1 = StrategyParams::pi_fracs((1, 2), (1, 2), (1, 2)).map_err(|e| e.to_string())?;
    let u2 = StrategyParams::pi_fracs((1, 2), (3, 2), (1, 2)).map_err(|e| e.to_string())?;
    let s = [StrategyParams::identity(), StrategyParams::ix(), u1, u2];
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..5 {
        let g = random_rational_game(&mut rng);
        let a = |i: usize, j: usize| g.delta[i][j].u1.clone();
        let quarter = (a(0, 0) + a(0, 1) + a(1, 0) + a(1, 1)) / q(4, 1);
        let expected = [(a(0, 1) + a(1, 1)) / q(2, 1), (a(0, 0) + a(1, 0)) / q(2, 1), quarter.clone(), quarter];
        for (o, want) in s.iter().zip(&expected) {
            let x = payoff_closed_form(&g, &u1, o).map_err(|e| e.to_string())?.u1;
            let y = payoff_closed_form(&g, &u2, o).map_err(|e| e.to_string())?.u1;
            ensure(x == y, format!("u1(U1, {o}) = {x} but u1(U2, {o}) = {y}"))?;
            ensure(&x == want, format!("u1(U1, {o}) = {x}, expected {want}"))?;
        }
    }
    Ok("U1 and U2 payoff-equivalent for player 1 with the stated values".into())
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        ("PD C-class golden matrix", criterion_1),
        ("PD equilibria", criterion_2),
        ("solution-count reproduction", criterion_3),
        ("invariance end-to-end", criterion_4),
        ("oracle equivalence", criterion_5),
        ("symmetry suite", criterion_6),
        ("structural identity", criterion_7),
        ("limit convergence", criterion_8),
        ("equivalence regression", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
