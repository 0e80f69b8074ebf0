//! C ABI over the sugarmine miner.
//!
//! Conventions:
//! * Every fallible function returns an [`SmStatus`]; on anything but
//!   `SM_STATUS_OK` a message is available from [`sm_last_error`] on the same
//!   thread until the next call into this library.
//! * Handles (`SmMiner`, `SmPatternSet`) are opaque and owned by the caller,
//!   who releases them with the matching `*_free` function.
//! * Strings returned through `char **` out-parameters are NUL-terminated
//!   UTF-8 owned by the caller and must be released with [`sm_string_free`].
//! * No function unwinds across the boundary; a Rust panic becomes
//!   `SM_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sugarmine::frontend::build_file;
use sugarmine::generalize::{baseline_label, generalize_full, GeneralizedCfg};
use sugarmine::mining::{canonical_form, mine, MineParams, PatternGraph, PatternStats, DEFAULT_WITNESSES};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    Internal = 5,
}

/// Node labeling applied to methods added to a miner.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmMode {
    Generalized = 0,
    Baseline = 1,
}

/// Accumulates labeled method CFGs to mine over.
pub struct SmMiner {
    mode: SmMode,
    graphs: Vec<GeneralizedCfg>,
}

/// Result of one mining run, in size/support/canonical order.
pub struct SmPatternSet {
    patterns: Vec<PatternStats>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(SmStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: SmStatus, message: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, message.into()))
}

/// Runs `body`, records any failure as the thread's last error and maps
/// panics to `Internal`.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> SmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SmStatus::Internal
        }
    }
}

/// # Safety
/// `p` is null or points at a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(SmStatus::NullArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(SmStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn to_c_string(text: String) -> FfiResult<*mut c_char> {
    match CString::new(text) {
        Ok(s) => Ok(s.into_raw()),
        Err(_) => fail(SmStatus::Internal, "output contains an interior NUL"),
    }
}

/// # Safety
/// `out` is null or a valid, writable pointer.
unsafe fn write_out<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return fail(SmStatus::NullArgument, "output pointer is null");
    }
    out.write(value);
    Ok(())
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New empty miner labeling methods with `mode` (an [`SmMode`] value), or
/// NULL if `mode` is out of range.
#[no_mangle]
pub extern "C" fn sm_miner_new(mode: i32) -> *mut SmMiner {
    clear_error();
    let mode = match mode {
        0 => SmMode::Generalized,
        1 => SmMode::Baseline,
        _ => {
            set_error(format!("unknown mode {mode}"));
            return ptr::null_mut();
        }
    };
    Box::into_raw(Box::new(SmMiner { mode, graphs: Vec::new() }))
}

/// # Safety
/// `miner` is null or was returned by [`sm_miner_new`] and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_miner_free(miner: *mut SmMiner) {
    if !miner.is_null() {
        drop(Box::from_raw(miner));
    }
}

/// Parses a Java compilation unit and adds one labeled CFG per method.
/// `file_path` only names the methods. `out_added` (nullable) receives the
/// number of methods added. A unit that does not parse is `PARSE_ERROR` and
/// adds nothing; methods the frontend cannot model are skipped silently.
///
/// # Safety
/// `miner` is a live handle; string arguments are NUL-terminated;
/// `out_added` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn sm_miner_add_source(
    miner: *mut SmMiner,
    file_path: *const c_char,
    source: *const c_char,
    out_added: *mut usize,
) -> SmStatus {
    guard(|| {
        let Some(miner) = miner.as_mut() else { return fail(SmStatus::NullArgument, "miner is null") };
        let path = read_str(file_path, "file_path")?;
        let text = read_str(source, "source")?;
        let (cfgs, warnings) = build_file(path, text);
        if cfgs.is_empty() {
            if let Some(w) = warnings.into_iter().find(|w| w.method.is_none()) {
                return fail(SmStatus::ParseError, w.message);
            }
        }
        let added = cfgs.len();
        miner.graphs.extend(cfgs.iter().map(|c| match miner.mode {
            SmMode::Generalized => generalize_full(c),
            SmMode::Baseline => baseline_label(c, text),
        }));
        if !out_added.is_null() {
            out_added.write(added);
        }
        Ok(())
    })
}

/// Number of method CFGs held by the miner (0 for NULL).
///
/// # Safety
/// `miner` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sm_miner_len(miner: *const SmMiner) -> usize {
    miner.as_ref().map_or(0, |m| m.graphs.len())
}

/// Mines patterns with `min_support_ratio` in (0, 1] and up to `max_size`
/// nodes. On success `*out` receives a new pattern set.
///
/// # Safety
/// `miner` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sm_miner_run(
    miner: *const SmMiner,
    min_support_ratio: f64,
    max_size: usize,
    out: *mut *mut SmPatternSet,
) -> SmStatus {
    guard(|| {
        let Some(miner) = miner.as_ref() else { return fail(SmStatus::NullArgument, "miner is null") };
        if out.is_null() {
            return fail(SmStatus::NullArgument, "output pointer is null");
        }
        let params = MineParams { min_support_ratio, max_size, witnesses: DEFAULT_WITNESSES };
        let patterns = mine(&miner.graphs, &params).or_else(|e| fail(SmStatus::InvalidArgument, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(SmPatternSet { patterns })))
    })
}

/// # Safety
/// `set` is null or a live pattern set handle.
#[no_mangle]
pub unsafe extern "C" fn sm_pattern_set_len(set: *const SmPatternSet) -> usize {
    set.as_ref().map_or(0, |s| s.patterns.len())
}

/// JSON object for pattern `index` (id, canonical, size, support, graph,
/// witnesses).
///
/// # Safety
/// `set` is a live handle; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn sm_pattern_set_get_json(
    set: *const SmPatternSet,
    index: usize,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guard(|| {
        let Some(set) = set.as_ref() else { return fail(SmStatus::NullArgument, "pattern set is null") };
        let Some(p) = set.patterns.get(index) else {
            return fail(SmStatus::InvalidArgument, format!("index {index} out of range ({})", set.patterns.len()));
        };
        let json = serde_json::to_string(p).or_else(|e| fail(SmStatus::Internal, e.to_string()))?;
        write_out(out_json, to_c_string(json)?)
    })
}

/// # Safety
/// `set` is null or a live handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_pattern_set_free(set: *mut SmPatternSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// JSON array of the raw CFGs for every method in a Java compilation unit.
///
/// # Safety
/// `source` is NUL-terminated; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn sm_build_cfg_json(source: *const c_char, out_json: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let text = read_str(source, "source")?;
        let (cfgs, warnings) = build_file("<memory>", text);
        if cfgs.is_empty() {
            if let Some(w) = warnings.into_iter().find(|w| w.method.is_none()) {
                return fail(SmStatus::ParseError, w.message);
            }
        }
        let json = serde_json::to_string(&cfgs).or_else(|e| fail(SmStatus::Internal, e.to_string()))?;
        write_out(out_json, to_c_string(json)?)
    })
}

/// Canonical text of a pattern given as JSON
/// (`{"nodes":[...],"edges":[{"src":0,"dst":1,"label":"TRUE"}]}`).
///
/// # Safety
/// `pattern_json` is NUL-terminated; `out_canonical` is writable.
#[no_mangle]
pub unsafe extern "C" fn sm_canonical_form(
    pattern_json: *const c_char,
    max_size: usize,
    out_canonical: *mut *mut c_char,
) -> SmStatus {
    guard(|| {
        let text = read_str(pattern_json, "pattern_json")?;
        let graph: PatternGraph = serde_json::from_str(text).or_else(|e| fail(SmStatus::ParseError, e.to_string()))?;
        let form = canonical_form(&graph, max_size).or_else(|e| fail(SmStatus::InvalidArgument, e.to_string()))?;
        write_out(out_canonical, to_c_string(form.0)?)
    })
}
