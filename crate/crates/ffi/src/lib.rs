//! C ABI for sfc-core.
//!
//! Positions and model tables are opaque heap handles released with their
//! `_free` function. Fallible calls return an [`SfcStatus`]; the message for
//! the last failure on the calling thread is available from
//! [`sfc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sfc_core::arena::{self, MatchTally};
use sfc_core::board::{Color, Move, Position, Square};
use sfc_core::estimators::{load_model, PhaseTable};
use sfc_core::evaluator::{Evaluator, HeuristicEval};
use sfc_core::features;
use sfc_core::search::{iterative_deepening, SearchLimits};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IllegalMove = 3,
    TerminalPosition = 4,
    Io = 5,
    BadModel = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque position handle.
pub struct SfcPosition(Position);

/// Opaque per-phase model table.
pub struct SfcModel(PhaseTable);

pub const SFC_PASS: i32 = -1;
pub const SFC_NUM_FEATURES: usize = 10;
const _: () = assert!(SFC_NUM_FEATURES == features::NUM_FEATURES);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: SfcStatus, msg: impl Into<String>) -> SfcStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn guard(f: impl FnOnce() -> SfcStatus) -> SfcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SfcStatus::Panic, "internal panic"))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sfc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

fn boxed(p: Position) -> *mut SfcPosition {
    Box::into_raw(Box::new(SfcPosition(p)))
}

/// Standard starting position. Never null.
#[no_mangle]
pub extern "C" fn sfc_position_initial() -> *mut SfcPosition {
    boxed(Position::initial())
}

/// Builds a position from bitboards (bit `rank * 8 + file`, a1 = bit 0).
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn sfc_position_from_masks(
    black: u64,
    white: u64,
    black_to_move: bool,
    out: *mut *mut SfcPosition,
) -> SfcStatus {
    guard(|| {
        if out.is_null() {
            return fail(SfcStatus::NullPointer, "out is null");
        }
        let colour = if black_to_move { Color::Black } else { Color::White };
        match Position::from_masks(black, white, colour) {
            Ok(p) => {
                *out = boxed(p);
                SfcStatus::Ok
            }
            Err(e) => fail(SfcStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `pos` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfc_position_free(pos: *mut SfcPosition) {
    if !pos.is_null() {
        drop(Box::from_raw(pos));
    }
}

unsafe fn position<'a>(pos: *const SfcPosition) -> Option<&'a Position> {
    pos.as_ref().map(|p| &p.0)
}

/// # Safety
/// `pos` must be a live handle; `black`, `white` and `black_to_move` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn sfc_position_masks(
    pos: *const SfcPosition,
    black: *mut u64,
    white: *mut u64,
    black_to_move: *mut bool,
) -> SfcStatus {
    let Some(p) = position(pos) else { return fail(SfcStatus::NullPointer, "pos is null") };
    if let Some(b) = black.as_mut() {
        *b = p.black();
    }
    if let Some(w) = white.as_mut() {
        *w = p.white();
    }
    if let Some(t) = black_to_move.as_mut() {
        *t = p.to_move() == Color::Black;
    }
    SfcStatus::Ok
}

/// Bitmask of legal placements; zero when the mover must pass or the game
/// is over.
///
/// # Safety
/// `pos` must be a live handle or null (null yields 0).
#[no_mangle]
pub unsafe extern "C" fn sfc_position_moves(pos: *const SfcPosition) -> u64 {
    position(pos).map_or(0, Position::moves_mask)
}

/// # Safety
/// `pos` must be a live handle or null (null yields false).
#[no_mangle]
pub unsafe extern "C" fn sfc_position_is_terminal(pos: *const SfcPosition) -> bool {
    position(pos).is_some_and(Position::is_terminal)
}

/// Plays `square` (0..63) or [`SFC_PASS`], writing a new handle to `out`.
///
/// # Safety
/// `pos` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sfc_position_apply(
    pos: *const SfcPosition,
    square: i32,
    out: *mut *mut SfcPosition,
) -> SfcStatus {
    guard(|| {
        let Some(p) = position(pos) else { return fail(SfcStatus::NullPointer, "pos is null") };
        if out.is_null() {
            return fail(SfcStatus::NullPointer, "out is null");
        }
        let mv = if square == SFC_PASS {
            Move::Pass
        } else {
            match u8::try_from(square).ok().and_then(Square::new) {
                Some(sq) => Move::Place(sq),
                None => return fail(SfcStatus::InvalidArgument, format!("no square {square}")),
            }
        };
        match p.apply_move(mv) {
            Ok(next) => {
                *out = boxed(next);
                SfcStatus::Ok
            }
            Err(e) => fail(SfcStatus::IllegalMove, e.to_string()),
        }
    })
}

/// Black's discs minus White's.
///
/// # Safety
/// `pos` must be a live handle or null (null yields 0).
#[no_mangle]
pub unsafe extern "C" fn sfc_position_black_differential(pos: *const SfcPosition) -> i32 {
    position(pos).map_or(0, Position::black_differential)
}

/// Writes the [`SFC_NUM_FEATURES`] feature values into `out`.
///
/// # Safety
/// `pos` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sfc_position_features(pos: *const SfcPosition, out: *mut f64, len: usize) -> SfcStatus {
    guard(|| {
        let Some(p) = position(pos) else { return fail(SfcStatus::NullPointer, "pos is null") };
        if out.is_null() {
            return fail(SfcStatus::NullPointer, "out is null");
        }
        if len < SFC_NUM_FEATURES {
            return fail(SfcStatus::BufferTooSmall, format!("need {SFC_NUM_FEATURES} slots, got {len}"));
        }
        match features::extract(p) {
            Ok(x) => {
                std::slice::from_raw_parts_mut(out, SFC_NUM_FEATURES).copy_from_slice(x.values());
                SfcStatus::Ok
            }
            Err(e) => fail(SfcStatus::TerminalPosition, e.to_string()),
        }
    })
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, SfcStatus> {
    if path.is_null() {
        return Err(fail(SfcStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| fail(SfcStatus::InvalidArgument, "path is not UTF-8"))
}

fn model_status(e: sfc_core::estimators::EstimatorError) -> SfcStatus {
    let status = match e {
        sfc_core::estimators::EstimatorError::Io(_) => SfcStatus::Io,
        _ => SfcStatus::BadModel,
    };
    fail(status, e.to_string())
}

/// Loads every model file in a directory as one phase table.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sfc_model_load_dir(dir: *const c_char, out: *mut *mut SfcModel) -> SfcStatus {
    guard(|| {
        let dir = match path_arg(dir) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SfcStatus::NullPointer, "out is null");
        }
        match PhaseTable::load_dir(dir) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(SfcModel(t)));
                SfcStatus::Ok
            }
            Err(e) => model_status(e),
        }
    })
}

/// Loads a single model file, used for every phase.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sfc_model_load_file(path: *const c_char, out: *mut *mut SfcModel) -> SfcStatus {
    guard(|| {
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(SfcStatus::NullPointer, "out is null");
        }
        match load_model(path).and_then(PhaseTable::single) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(SfcModel(t)));
                SfcStatus::Ok
            }
            Err(e) => model_status(e),
        }
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfc_model_free(model: *mut SfcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Winning probability of the side to move.
///
/// # Safety
/// `model` and `pos` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sfc_model_evaluate(model: *const SfcModel, pos: *const SfcPosition, out: *mut f64) -> SfcStatus {
    guard(|| {
        let (Some(m), Some(p)) = (model.as_ref(), position(pos)) else {
            return fail(SfcStatus::NullPointer, "model or pos is null");
        };
        if out.is_null() {
            return fail(SfcStatus::NullPointer, "out is null");
        }
        match m.0.evaluate(p) {
            Ok(v) => {
                *out = v;
                SfcStatus::Ok
            }
            Err(e) => fail(SfcStatus::TerminalPosition, e.to_string()),
        }
    })
}

/// Iterative-deepening search. A null `model` uses the built-in heuristic.
/// Writes the chosen square (or [`SFC_PASS`]) and its value in [0, 1].
///
/// # Safety
/// `model` must be null or live, `pos` live, outputs writable or null.
#[no_mangle]
pub unsafe extern "C" fn sfc_search(
    model: *const SfcModel,
    pos: *const SfcPosition,
    depth: u32,
    wdl_empties: u32,
    out_square: *mut i32,
    out_score: *mut f64,
) -> SfcStatus {
    guard(|| {
        let Some(p) = position(pos) else { return fail(SfcStatus::NullPointer, "pos is null") };
        let eval: &dyn Evaluator = match model.as_ref() {
            Some(m) => &m.0,
            None => &HeuristicEval,
        };
        let limits = SearchLimits { max_depth: depth, wdl_empties_threshold: wdl_empties, node_budget: None };
        match iterative_deepening(p, &limits, eval) {
            Ok(r) => {
                if let Some(s) = out_square.as_mut() {
                    *s = match r.best_move {
                        Move::Place(sq) => sq.index() as i32,
                        Move::Pass => SFC_PASS,
                    };
                }
                if let Some(v) = out_score.as_mut() {
                    *v = r.score;
                }
                SfcStatus::Ok
            }
            Err(e) => {
                let status = if p.is_terminal() { SfcStatus::TerminalPosition } else { SfcStatus::InvalidArgument };
                fail(status, e.to_string())
            }
        }
    })
}

/// `(wins + draws/2) / games`; 0.5 when no games were played.
#[no_mangle]
pub extern "C" fn sfc_winning_percentage(wins: u32, draws: u32, losses: u32) -> f64 {
    arena::winning_percentage(&MatchTally::from_counts(wins, draws, losses))
}

/// Conservative match p-value; `significant` is set when it is below `level`.
///
/// # Safety
/// Outputs must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn sfc_significance(
    wins: u32,
    draws: u32,
    losses: u32,
    level: f64,
    out_p: *mut f64,
    out_significant: *mut bool,
) -> SfcStatus {
    guard(|| {
        if !(level > 0.0 && level < 1.0) {
            return fail(SfcStatus::InvalidArgument, format!("level {level} outside (0, 1)"));
        }
        let (p, sig) = arena::significance(&MatchTally::from_counts(wins, draws, losses), level);
        if let Some(o) = out_p.as_mut() {
            *o = p;
        }
        if let Some(o) = out_significant.as_mut() {
            *o = sig;
        }
        SfcStatus::Ok
    })
}
