//! C ABI over `ewl-core`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free` function. Every fallible call returns an [`EwlStatus`];
//! on failure [`ewl_last_error_message`] describes the cause. Strings returned
//! through out-parameters are heap allocated and must be released with
//! [`ewl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ewl_core::classes::{extension_matrix, strategy_set, ClassId, ClassParams};
use ewl_core::invariance::{build_extended_game, labelled, verify_invariance_end_to_end, ExtendedGame};
use ewl_core::nash::mixed_equilibria;
use ewl_core::payoff::{payoff_closed_form, Bimatrix2};
use ewl_core::{Angle, Error, Rational, Scalar, StrategyParams};
use serde_json::Value;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EwlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    NotExact = 5,
    NotRational = 6,
    InvalidClassParams = 7,
    NotDiscrete = 8,
    DimensionMismatch = 9,
    OutOfRange = 10,
    Panic = 11,
}

impl From<&Error> for EwlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => EwlStatus::Domain,
            Error::NotExact(_) => EwlStatus::NotExact,
            Error::NotRational(_) => EwlStatus::NotRational,
            Error::InvalidClassParams { .. } => EwlStatus::InvalidClassParams,
            Error::NotDiscrete(_) => EwlStatus::NotDiscrete,
            Error::DimensionMismatch(_) => EwlStatus::DimensionMismatch,
            Error::Parse(_) => EwlStatus::Parse,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(EwlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EwlStatus::from(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(EwlStatus::Parse, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EwlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EwlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EwlStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(EwlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(EwlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

enum Game {
    Exact(Box<Bimatrix2<Rational>>),
    Float(Bimatrix2<f64>),
}

/// A classical 2×2 game.
pub struct EwlGame(Game);

enum Extended {
    Exact(ExtendedGame<Rational>),
    Float(ExtendedGame<f64>),
}

/// An extended game over a finite set of unitary strategies.
pub struct EwlExtendedGame(Extended);

unsafe fn game_ref<'a>(g: *const EwlGame) -> Result<&'a Game, Failure> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("game"))
}

unsafe fn ext_ref<'a>(g: *const EwlExtendedGame) -> Result<&'a Extended, Failure> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("extended game"))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ewl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ewl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `{"payoffs": [[[a,b],[c,d]],[[e,f],[g,h]]]}`. With `exact`, entries
/// must be integers or rational strings such as `"17/8"`.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ewl_game_from_json(json: *const c_char, exact: bool, out: *mut *mut EwlGame) -> EwlStatus {
    guard(|| {
        let v: Value = serde_json::from_str(str_arg(json, "json")?)?;
        let g = if exact { Game::Exact(Box::new(Bimatrix2::from_json(&v)?)) } else { Game::Float(Bimatrix2::from_json(&v)?) };
        write_out(out, Box::into_raw(Box::new(EwlGame(g))), "out")
    })
}

/// Float game from `a00, b00, a01, b01, a10, b10, a11, b11`.
///
/// # Safety
/// `payoffs` must point to 8 doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_game_from_doubles(payoffs: *const f64, out: *mut *mut EwlGame) -> EwlStatus {
    guard(|| {
        if payoffs.is_null() {
            return Err(null("payoffs"));
        }
        let v = std::slice::from_raw_parts(payoffs, 8);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Failure(EwlStatus::Domain, "payoffs must be finite".into()));
        }
        let g = Bimatrix2::from_matrices([[v[0], v[2]], [v[4], v[6]]], [[v[1], v[3]], [v[5], v[7]]]);
        write_out(out, Box::into_raw(Box::new(EwlGame(Game::Float(g)))), "out")
    })
}

/// # Safety
/// `game` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ewl_game_free(game: *mut EwlGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

fn class_params(class: &str, theta1: Option<&str>) -> Result<ClassParams, Failure> {
    let id: ClassId = class.parse()?;
    let theta = theta1.map(str::parse::<Angle>).transpose()?;
    Ok(ClassParams::defaults(id, theta)?)
}

fn extend_with<T: Scalar>(
    game: &Bimatrix2<T>,
    class: Option<&ClassParams>,
    s: &[(String, StrategyParams)],
) -> Result<ExtendedGame<T>, Failure> {
    Ok(match class {
        Some(p) => extension_matrix(p, game)?,
        None => build_extended_game(game, s)?,
    })
}

unsafe fn extend(
    game: *const EwlGame,
    class: Option<ClassParams>,
    s: Vec<(String, StrategyParams)>,
    out: *mut *mut EwlExtendedGame,
) -> Result<(), Failure> {
    let ext = match game_ref(game)? {
        Game::Exact(g) => {
            if let Some((l, p)) = s.iter().find(|(_, p)| !p.is_exact()) {
                return Err(Error::NotExact(format!("exact angles; strategy {l} = {p}")).into());
            }
            Extended::Exact(extend_with(g, class.as_ref(), &s)?)
        }
        Game::Float(g) => Extended::Float(extend_with(g, class.as_ref(), &s)?),
    };
    write_out(out, Box::into_raw(Box::new(EwlExtendedGame(ext))), "out")
}

/// Extends `game` with the reference member of a class (`"A1"` … `"E2"`).
/// `theta1` is an angle such as `"1/3 pi"`; pass null for A1, A2 and B.
///
/// # Safety
/// Pointers must be valid; `theta1` may be null.
#[no_mangle]
pub unsafe extern "C" fn ewl_extend_class(
    game: *const EwlGame,
    class_name: *const c_char,
    theta1: *const c_char,
    out: *mut *mut EwlExtendedGame,
) -> EwlStatus {
    guard(|| {
        let theta = if theta1.is_null() { None } else { Some(str_arg(theta1, "theta1")?) };
        let p = class_params(str_arg(class_name, "class_name")?, theta)?;
        let s = strategy_set(&p)?;
        extend(game, Some(p), s, out)
    })
}

fn parse_strategies(json: &str) -> Result<Vec<(String, StrategyParams)>, Failure> {
    let list: Vec<Value> = serde_json::from_str(json)?;
    let params = list
        .into_iter()
        .map(|v| match v {
            Value::Array(a) if a.len() == 3 => {
                let ang = |x: &Value| serde_json::from_value::<Angle>(x.clone());
                Ok(StrategyParams::new(ang(&a[0])?, ang(&a[1])?, ang(&a[2])?)?)
            }
            other => Ok(serde_json::from_value::<StrategyParams>(other)?),
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if params.is_empty() {
        return Err(Failure(EwlStatus::Parse, "strategy list is empty".into()));
    }
    Ok(labelled(&params))
}

/// Extends `game` with a JSON list of strategies, each `[theta, alpha, beta]`
/// or `{"theta", "alpha", "beta"}`; angles are strings like `"1/2 pi"` or
/// numbers in radians.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_extend_strategies(
    game: *const EwlGame,
    strategies_json: *const c_char,
    out: *mut *mut EwlExtendedGame,
) -> EwlStatus {
    guard(|| {
        let s = parse_strategies(str_arg(strategies_json, "strategies_json")?)?;
        extend(game, None, s, out)
    })
}

/// # Safety
/// `game` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ewl_extended_free(game: *mut EwlExtendedGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of strategies per player, or 0 for a null handle.
///
/// # Safety
/// `game` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ewl_extended_size(game: *const EwlExtendedGame) -> usize {
    match game.as_ref().map(|g| &g.0) {
        Some(Extended::Exact(g)) => g.size(),
        Some(Extended::Float(g)) => g.size(),
        None => 0,
    }
}

/// Payoff pair at `(row, col)` as doubles.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_extended_payoff(
    game: *const EwlExtendedGame,
    row: usize,
    col: usize,
    u1: *mut f64,
    u2: *mut f64,
) -> EwlStatus {
    guard(|| {
        let (n, pair) = match ext_ref(game)? {
            Extended::Exact(g) if row < g.size() && col < g.size() => (g.size(), Some(g.get(row, col).to_f64())),
            Extended::Float(g) if row < g.size() && col < g.size() => (g.size(), Some(g.get(row, col).clone())),
            Extended::Exact(g) => (g.size(), None),
            Extended::Float(g) => (g.size(), None),
        };
        let p = pair.ok_or_else(|| Failure(EwlStatus::OutOfRange, format!("cell ({row}, {col}) outside {n}x{n}")))?;
        write_out(u1, p.u1, "u1")?;
        write_out(u2, p.u2, "u2")
    })
}

/// `{"labels": [...], "payoffs": [[[u1, u2], ...], ...]}`; exact games use rational strings.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_extended_to_json(game: *const EwlExtendedGame, out: *mut *mut c_char) -> EwlStatus {
    guard(|| {
        let v = match ext_ref(game)? {
            Extended::Exact(g) => g.to_json(),
            Extended::Float(g) => g.to_json(),
        };
        write_out(out, into_c_string(v.to_string()), "out")
    })
}

/// All equilibria as a JSON array of `{"p1", "p2", "payoff", "kind", ...}`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_equilibria_json(game: *const EwlExtendedGame, out: *mut *mut c_char) -> EwlStatus {
    guard(|| {
        let v = match ext_ref(game)? {
            Extended::Exact(g) => mixed_equilibria(g)?.to_json(),
            Extended::Float(g) => mixed_equilibria(g)?.to_json(),
        };
        write_out(out, into_c_string(v.to_string()), "out")
    })
}

/// Checks whether the extensions of all four isomorphic variants of `game`
/// are strongly isomorphic. A failed check is not an error: `*isomorphic` is false.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_verify(
    game: *const EwlGame,
    strategies_json: *const c_char,
    isomorphic: *mut bool,
) -> EwlStatus {
    guard(|| {
        let s = parse_strategies(str_arg(strategies_json, "strategies_json")?)?;
        let ok = match game_ref(game)? {
            Game::Exact(g) => verify_invariance_end_to_end(g, &s)?.all_isomorphic,
            Game::Float(g) => verify_invariance_end_to_end(g, &s)?.all_isomorphic,
        };
        write_out(isomorphic, ok, "isomorphic")
    })
}

/// Payoffs of `U(p1)` against `U(p2)`, each given as `{theta, alpha, beta}` in radians.
///
/// # Safety
/// `p1` and `p2` must point to 3 doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ewl_payoff(
    game: *const EwlGame,
    p1: *const f64,
    p2: *const f64,
    u1: *mut f64,
    u2: *mut f64,
) -> EwlStatus {
    guard(|| {
        let strategy = |p: *const f64, what: &str| -> Result<StrategyParams, Failure> {
            if p.is_null() {
                return Err(null(what));
            }
            let v = std::slice::from_raw_parts(p, 3);
            Ok(StrategyParams::new(Angle::radians(v[0]), Angle::radians(v[1]), Angle::radians(v[2]))?)
        };
        let (a, b) = (strategy(p1, "p1")?, strategy(p2, "p2")?);
        let g = match game_ref(game)? {
            Game::Exact(g) => g.to_f64(),
            Game::Float(g) => g.clone(),
        };
        let u = payoff_closed_form(&g, &a, &b)?;
        write_out(u1, u.u1, "u1")?;
        write_out(u2, u.u2, "u2")
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ewl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
