//! C ABI over the `qgame` engine.
//!
//! Games and equilibrium reports are opaque heap handles created by `qg_*`
//! constructors and released by the matching `*_free`. Every fallible call
//! returns a [`QgStatus`]; on failure a message is available from
//! [`qg_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qgame::analysis::{
    ne_search, quantum_classical_crossings, Baseline, EquilibriumFamily, FamilyDescriptor,
    NeConfig, SweepProfiles,
};
use qgame::{
    builtin_game, classical_payoffs, outcome_distribution, quantum_payoffs, BasisPair,
    BimatrixGame, ClassicalMove, CorruptionRate, Error, GameId, PayoffPair, Player, StrategyParams,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QgStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    InvalidArgument = 3,
    UnknownGame = 4,
    /// Malformed or invalid game-definition document.
    ParseError = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QgStrategy {
    pub theta: f64,
    pub phi: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QgPayoffs {
    pub alice: f64,
    pub bob: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QgFamilyKind {
    Point = 0,
    PhiSum = 1,
    AllStrategies = 2,
    Custom = 3,
}

/// One equilibrium family: its representative profile and summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QgFamily {
    pub kind: QgFamilyKind,
    pub alice: QgStrategy,
    pub bob: QgStrategy,
    pub payoffs: QgPayoffs,
    pub max_gain: f64,
    pub member_count: usize,
    /// Nonzero when members do not share one payoff pair.
    pub payoff_parametric: i32,
}

/// A 2×2 game, optionally tagged with its builtin id.
pub struct QgGame {
    game: BimatrixGame,
    id: Option<GameId>,
}

/// Equilibrium families found at one corruption rate.
pub struct QgNeReport {
    families: Vec<EquilibriumFamily>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: QgStatus, msg: impl Into<String>) -> QgStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> QgStatus {
    let status = match e {
        Error::OutOfRange { .. } => QgStatus::OutOfRange,
        Error::UnknownGame(_) => QgStatus::UnknownGame,
        Error::Json(_) | Error::Parse(_) | Error::Io(_) | Error::InvalidGame(_) => {
            QgStatus::ParseError
        }
        _ => QgStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), QgStatus>) -> QgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QgStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(QgStatus::Internal, "internal panic"),
    }
}

fn null(name: &str) -> QgStatus {
    fail(QgStatus::NullPointer, format!("{name} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, QgStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QgStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn game_ref<'a>(game: *const QgGame) -> Result<&'a QgGame, QgStatus> {
    game.as_ref().ok_or_else(|| null("game"))
}

fn rate(r: f64) -> Result<CorruptionRate, QgStatus> {
    CorruptionRate::new(r).map_err(from_error)
}

fn strategy(s: QgStrategy) -> Result<StrategyParams, QgStatus> {
    StrategyParams::new(s.theta, s.phi).map_err(from_error)
}

fn payoffs(p: PayoffPair) -> QgPayoffs {
    QgPayoffs {
        alice: p.a,
        bob: p.b,
    }
}

fn write<T>(out: *mut T, value: T) -> Result<(), QgStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { out.write(value) };
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates one of the builtin games `"pd"`, `"sd"` or `"bos"`.
///
/// # Safety
/// `id` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_game_builtin(id: *const c_char, out: *mut *mut QgGame) -> QgStatus {
    guard(|| {
        let id: GameId = c_str(id, "id")?.parse().map_err(from_error)?;
        let handle = Box::new(QgGame {
            game: builtin_game(id),
            id: Some(id),
        });
        write(out, Box::into_raw(handle))
    })
}

/// Creates a game from a game-definition JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_game_from_json(json: *const c_char, out: *mut *mut QgGame) -> QgStatus {
    guard(|| {
        let game = BimatrixGame::from_json(c_str(json, "json")?).map_err(from_error)?;
        write(out, Box::into_raw(Box::new(QgGame { game, id: None })))
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must come from a `qg_game_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qg_game_free(game: *mut QgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Expected payoffs of a quantum strategy pair at corruption rate `r`.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_quantum_payoffs(
    game: *const QgGame,
    r: f64,
    alice: QgStrategy,
    bob: QgStrategy,
    out: *mut QgPayoffs,
) -> QgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let p = quantum_payoffs(
            &g.game,
            rate(r)?,
            strategy(alice)?,
            strategy(bob)?,
            BasisPair::default(),
        );
        write(out, payoffs(p))
    })
}

/// Expected payoffs when each player applies `σ₀` with the given probability
/// and `iσ_y` otherwise.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_classical_payoffs(
    game: *const QgGame,
    r: f64,
    alice_p0: f64,
    bob_p0: f64,
    out: *mut QgPayoffs,
) -> QgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let a = ClassicalMove::new(alice_p0).map_err(from_error)?;
        let b = ClassicalMove::new(bob_p0).map_err(from_error)?;
        write(
            out,
            payoffs(classical_payoffs(
                &g.game,
                rate(r)?,
                a,
                b,
                BasisPair::default(),
            )),
        )
    })
}

/// Outcome probabilities `p[2j + l]`, Alice's action `j`, Bob's `l`.
///
/// # Safety
/// `out` must point to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qg_outcome_distribution(
    r: f64,
    alice: QgStrategy,
    bob: QgStrategy,
    out: *mut f64,
) -> QgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = outcome_distribution(
            rate(r)?,
            strategy(alice)?,
            strategy(bob)?,
            BasisPair::default(),
        );
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&p.probs());
        Ok(())
    })
}

/// Corruption rates where `player` (0 Alice, 1 Bob) gets the same payoff
/// from the default quantum profile as from the classical equilibrium played
/// through the same corrupt source. Writes up to `capacity` rates and the
/// total count; fails with `BufferTooSmall` when they do not fit.
///
/// # Safety
/// `game` must be a live handle; `rates` must hold `capacity` doubles (may
/// be null when `capacity` is 0); `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_critical_rates(
    game: *const QgGame,
    player: i32,
    rates: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> QgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let player = match player {
            0 => Player::Alice,
            1 => Player::Bob,
            _ => return Err(fail(QgStatus::InvalidArgument, "player must be 0 or 1")),
        };
        let profiles = SweepProfiles::defaults_for(&g.game, g.id).map_err(from_error)?;
        let found = quantum_classical_crossings(&g.game, &profiles, player, Baseline::Corrupt);
        write(count, found.len())?;
        if found.len() > capacity {
            return Err(fail(
                QgStatus::BufferTooSmall,
                format!("{} rates do not fit in {capacity}", found.len()),
            ));
        }
        if !found.is_empty() {
            if rates.is_null() {
                return Err(null("rates"));
            }
            let dst = std::slice::from_raw_parts_mut(rates, found.len());
            for (d, c) in dst.iter_mut().zip(&found) {
                *d = c.r_star;
            }
        }
        Ok(())
    })
}

/// Searches the two-parameter strategy space for ε-equilibria at rate `r`
/// with the default grids and ε = 1e-6.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_ne_search(
    game: *const QgGame,
    r: f64,
    out: *mut *mut QgNeReport,
) -> QgStatus {
    guard(|| {
        let g = game_ref(game)?;
        let families = ne_search(&g.game, rate(r)?, &NeConfig::default()).map_err(from_error)?;
        write(out, Box::into_raw(Box::new(QgNeReport { families })))
    })
}

/// Number of families in a report; 0 for null.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qg_ne_report_len(report: *const QgNeReport) -> usize {
    report.as_ref().map_or(0, |r| r.families.len())
}

/// Summary of family `index`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qg_ne_report_family(
    report: *const QgNeReport,
    index: usize,
    out: *mut QgFamily,
) -> QgStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        let f = report.families.get(index).ok_or_else(|| {
            fail(
                QgStatus::OutOfRange,
                format!("family {index} of {}", report.families.len()),
            )
        })?;
        let rep = &f.representative;
        let kind = match f.descriptor {
            FamilyDescriptor::Point => QgFamilyKind::Point,
            FamilyDescriptor::PhiSum { .. } => QgFamilyKind::PhiSum,
            FamilyDescriptor::AllStrategies => QgFamilyKind::AllStrategies,
            FamilyDescriptor::Custom { .. } => QgFamilyKind::Custom,
        };
        let s = |p: StrategyParams| QgStrategy {
            theta: p.theta(),
            phi: p.phi(),
        };
        write(
            out,
            QgFamily {
                kind,
                alice: s(rep.alice),
                bob: s(rep.bob),
                payoffs: payoffs(rep.payoffs),
                max_gain: rep.max_gain,
                member_count: f.members.len(),
                payoff_parametric: f.payoff_parametric as i32,
            },
        )
    })
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `report` must come from [`qg_ne_search`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qg_ne_report_free(report: *mut QgNeReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
