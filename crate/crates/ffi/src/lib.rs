//! C interface to `qbayes`.
//!
//! Every function returns a [`QbStatus`]; results go through out-pointers.
//! Games and solutions are opaque handles released with their `_free`
//! function, strings returned by the library are released with
//! [`qb_string_free`]. After a non-OK status, [`qb_last_error_message`]
//! describes the failure for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qbayes::bell::bell_report;
use qbayes::equilibrium::{find_equilibria, SolveOutcome, SolverConfig};
use qbayes::format;
use qbayes::{joint_for, payoffs, CoordinatorParams, Error, GameSpec, StrategyProfile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    NoResult = 4,
    Internal = 5,
    Panic = 6,
}

/// A validated game definition.
pub struct QbGame {
    spec: GameSpec,
}

/// Equilibria found by [`qb_solve`].
pub struct QbSolution {
    game: GameSpec,
    coord: CoordinatorParams,
    outcome: SolveOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(QbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => QbStatus::Parse,
            Error::Internal(_) => QbStatus::Internal,
            _ => QbStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QbStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside qbayes");
            QbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QbStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn profile_from(angles: &[f64]) -> Result<StrategyProfile, Fail> {
    if !angles.len().is_multiple_of(2) || angles.len() < 4 {
        return Err(Fail(
            QbStatus::InvalidInput,
            format!("expected 2 angles per player, got {}", angles.len()),
        ));
    }
    Ok(StrategyProfile::new(
        angles.chunks(2).map(|c| [c[0], c[1]]).collect(),
    )?)
}

fn string_out(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail(QbStatus::Internal, e.to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn qb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Built-in game by name (`extended-bos` or `three-player`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_game_builtin(name: *const c_char, out: *mut *mut QbGame) -> QbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = str_arg(name, "name")?;
        let spec = qbayes::builtin(name).ok_or_else(|| {
            Fail(
                QbStatus::InvalidInput,
                format!("unknown built-in game \"{name}\""),
            )
        })?;
        *out = Box::into_raw(Box::new(QbGame { spec }));
        Ok(())
    })
}

/// Parses and validates a game definition in the JSON file format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_game_from_json(json: *const c_char, out: *mut *mut QbGame) -> QbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = format::parse_game(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(QbGame { spec }));
        Ok(())
    })
}

/// Serializes a game; free the string with [`qb_string_free`].
///
/// # Safety
/// `game` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_game_to_json(game: *const QbGame, out: *mut *mut c_char) -> QbStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        string_out(out, format::game_to_json(&game.spec))
    })
}

/// # Safety
/// `game` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_game_player_count(game: *const QbGame, out: *mut usize) -> QbStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = game.spec.n_players();
        Ok(())
    })
}

/// # Safety
/// `game` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_game_free(game: *mut QbGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `s` must be a string returned by this library or null.
#[no_mangle]
pub unsafe extern "C" fn qb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Joint probabilities for `n_angles / 2` players. `angles` holds two angles
/// per player (type 0, type 1), each in `[0, 2π)`. `out` receives
/// `4^n` values, type profile outer and move profile inner, player 0 as the
/// most significant bit.
///
/// # Safety
/// `angles` must hold `n_angles` values and `out` room for `out_len`.
#[no_mangle]
pub unsafe extern "C" fn qb_joint_probabilities(
    angles: *const f64,
    n_angles: usize,
    gamma: f64,
    phi: f64,
    out: *mut f64,
    out_len: usize,
) -> QbStatus {
    guard(|| {
        let profile = profile_from(slice_arg(angles, n_angles, "angles")?)?;
        let probs = joint_for(&profile, &CoordinatorParams::new(gamma, phi)?)?;
        if out_len != probs.values().len() {
            return Err(Fail(
                QbStatus::InvalidInput,
                format!("out_len must be {}, got {out_len}", probs.values().len()),
            ));
        }
        out_slice(out, out_len, "out")?.copy_from_slice(probs.values());
        Ok(())
    })
}

/// Type-averaged payoff of every player; `out` receives one value per player.
///
/// # Safety
/// `game` must come from this library; `angles` must hold `n_angles` values
/// and `out` room for `out_len`.
#[no_mangle]
pub unsafe extern "C" fn qb_payoffs(
    game: *const QbGame,
    angles: *const f64,
    n_angles: usize,
    gamma: f64,
    phi: f64,
    out: *mut f64,
    out_len: usize,
) -> QbStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        let n = game.spec.n_players();
        if n_angles != 2 * n || out_len != n {
            return Err(Fail(
                QbStatus::InvalidInput,
                format!(
                    "game has {n} players: need {} angles and {n} outputs",
                    2 * n
                ),
            ));
        }
        let profile = profile_from(slice_arg(angles, n_angles, "angles")?)?;
        let probs = joint_for(&profile, &CoordinatorParams::new(gamma, phi)?)?;
        out_slice(out, out_len, "out")?.copy_from_slice(&payoffs(&probs, &game.spec)?.total);
        Ok(())
    })
}

/// Largest left-hand side over the 64 two-player Cereceda variants.
///
/// # Safety
/// `angles` must hold 4 values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_max_cereceda(
    angles: *const f64,
    gamma: f64,
    phi: f64,
    out: *mut f64,
) -> QbStatus {
    guard(|| {
        let profile = profile_from(slice_arg(angles, 4, "angles")?)?;
        let probs = joint_for(&profile, &CoordinatorParams::new(gamma, phi)?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = bell_report(&probs)?.max_lhs;
        Ok(())
    })
}

/// Searches for equilibria of a two-player game. `n_starts` random starts
/// are added to the corner profiles; `seed` fixes them. Returns
/// [`QbStatus::NoResult`] (and no handle) when nothing converges.
///
/// # Safety
/// `game` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_solve(
    game: *const QbGame,
    gamma: f64,
    phi: f64,
    n_starts: usize,
    seed: u64,
    out: *mut *mut QbSolution,
) -> QbStatus {
    guard(|| {
        let game = game.as_ref().ok_or_else(|| null("game"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let coord = CoordinatorParams::new(gamma, phi)?;
        let cfg = SolverConfig {
            n_starts,
            seed,
            ..SolverConfig::default()
        };
        let outcome = find_equilibria(&game.spec, &coord, &cfg)?;
        if outcome.reports.is_empty() {
            return Err(Fail(QbStatus::NoResult, "no converged equilibria".into()));
        }
        *out = Box::into_raw(Box::new(QbSolution {
            game: game.spec.clone(),
            coord,
            outcome,
        }));
        Ok(())
    })
}

/// Number of distinct equilibria or families in a solution.
///
/// # Safety
/// `solution` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_count(
    solution: *const QbSolution,
    out: *mut usize,
) -> QbStatus {
    guard(|| {
        let sol = solution.as_ref().ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = sol.outcome.reports.len();
        Ok(())
    })
}

/// Representative profile and payoffs of equilibrium `index`. `angles_out`
/// needs room for 2 values per player, `payoffs_out` for one per player.
///
/// # Safety
/// `solution` must come from this library; the output buffers must have the
/// stated sizes.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_get(
    solution: *const QbSolution,
    index: usize,
    angles_out: *mut f64,
    payoffs_out: *mut f64,
) -> QbStatus {
    guard(|| {
        let sol = solution.as_ref().ok_or_else(|| null("solution"))?;
        let rep = sol.outcome.reports.get(index).ok_or_else(|| {
            Fail(
                QbStatus::InvalidInput,
                format!(
                    "index {index} out of range (count {})",
                    sol.outcome.reports.len()
                ),
            )
        })?;
        let n = sol.game.n_players();
        out_slice(angles_out, 2 * n, "angles_out")?.copy_from_slice(&rep.profile.to_flat());
        out_slice(payoffs_out, n, "payoffs_out")?.copy_from_slice(&rep.payoffs.total);
        Ok(())
    })
}

/// Full-precision JSON report; free the string with [`qb_string_free`].
///
/// # Safety
/// `solution` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_to_json(
    solution: *const QbSolution,
    out: *mut *mut c_char,
) -> QbStatus {
    guard(|| {
        let sol = solution.as_ref().ok_or_else(|| null("solution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = format::outcome_to_json(&sol.game, &sol.coord, &sol.outcome);
        string_out(
            out,
            serde_json::to_string_pretty(&json)
                .map_err(|e| Fail(QbStatus::Internal, e.to_string()))?,
        )
    })
}

/// # Safety
/// `solution` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_solution_free(solution: *mut QbSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
