//! C ABI for the twistee entropy engine.
//!
//! Every fallible call returns a [`TwisteeStatus`]; on failure the message is
//! kept per thread and read with [`twistee_last_error_message`]. Panics are
//! caught at the boundary and reported as [`TwisteeStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twistee::bits::BitVec;
use twistee::entropy::{extract_dimension, predict_s_ann, region_entropy, FusionOutcome};
use twistee::experiment::{run_config, ConfigFile, RunOptions};
use twistee::lattice::{DefectLattice, Rect, StabilizerState};
use twistee::report::write_json;
use twistee::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwisteeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Lattice = 4,
    Geometry = 5,
    Logical = 6,
    Oracle = 7,
    FusionTable = 8,
    OutOfRange = 9,
    Internal = 10,
    Panic = 11,
}

/// A prepared pure stabilizer state together with its lattice. Opaque to C.
pub struct TwisteeState {
    lattice: DefectLattice,
    state: StabilizerState,
}

/// One row of a fusion table.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TwisteeFusionOutcome {
    pub probability: f64,
    pub d_inner: f64,
    pub d_outer: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(TwisteeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config { .. } | Error::Parse(_) | Error::Io(_) => TwisteeStatus::Config,
            Error::Spec(_) | Error::Dimension { .. } | Error::MissingQubit(_) => TwisteeStatus::Lattice,
            Error::Geometry(_) | Error::Canonical(_) => TwisteeStatus::Geometry,
            Error::InvalidLogical { .. } | Error::LogicalChain { .. } | Error::NotPure { .. } => TwisteeStatus::Logical,
            Error::OracleSize { .. } | Error::Contradiction => TwisteeStatus::Oracle,
            Error::FusionTable(_) => TwisteeStatus::FusionTable,
            _ => TwisteeStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: TwisteeStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `f`, records any error, and never lets a panic cross the boundary.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TwisteeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwisteeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            TwisteeStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(TwisteeStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(TwisteeStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn state_ref<'a>(p: *const TwisteeState) -> Result<&'a TwisteeState, Failure> {
    p.as_ref().ok_or_else(|| fail(TwisteeStatus::NullPointer, "null state handle"))
}

fn null_out() -> Failure {
    fail(TwisteeStatus::NullPointer, "null output pointer")
}

/// Builds the state of experiment `index` in a TOML config, anyon strings
/// applied. Free the handle with [`twistee_state_free`].
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twistee_state_from_toml(
    config_toml: *const c_char,
    index: usize,
    out: *mut *mut TwisteeState,
) -> TwisteeStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null_out)?;
        *out = ptr::null_mut();
        let text = read_str(config_toml)?;
        let file = ConfigFile::parse(text, "<ffi>")?;
        let cfg = file.experiments.get(index).ok_or_else(|| {
            fail(TwisteeStatus::OutOfRange, format!("experiment {index} of {}", file.experiments.len()))
        })?;
        let (lattice, _, state) = cfg.prepare()?;
        *out = Box::into_raw(Box::new(TwisteeState { lattice, state }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `state` must come from [`twistee_state_from_toml`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn twistee_state_free(state: *mut TwisteeState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Physical qubits of the lattice, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twistee_state_num_qubits(state: *const TwisteeState) -> usize {
    state.as_ref().map_or(0, |s| s.lattice.num_qubits())
}

/// Logical qubits encoded by the local terms, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twistee_state_logical_qubits(state: *const TwisteeState) -> usize {
    state.as_ref().map_or(0, |s| s.lattice.logical_qubit_count())
}

/// Entropy in bits of the qubits inside an axis-aligned rectangle (wrapping
/// around the torus).
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twistee_rect_entropy(
    state: *const TwisteeState,
    x: usize,
    y: usize,
    width: usize,
    height: usize,
    out: *mut usize,
) -> TwisteeStatus {
    guard(|| {
        let s = state_ref(state)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        if width == 0 || height == 0 || width > s.lattice.width() || height > s.lattice.height() {
            return Err(fail(TwisteeStatus::Geometry, format!("rectangle {width}x{height} does not fit")));
        }
        let mask = s.lattice.rect_mask(&[Rect::new(x, y, width, height)]);
        *out = region_entropy(s.state.generators(), &mask)?;
        Ok(())
    })
}

/// Entropy in bits of an arbitrary set of qubit indices.
///
/// # Safety
/// `qubits` must point to `len` readable values (or be null with `len == 0`);
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twistee_region_entropy(
    state: *const TwisteeState,
    qubits: *const usize,
    len: usize,
    out: *mut usize,
) -> TwisteeStatus {
    guard(|| {
        let s = state_ref(state)?;
        let out = out.as_mut().ok_or_else(null_out)?;
        let list: &[usize] = if len == 0 {
            &[]
        } else if qubits.is_null() {
            return Err(fail(TwisteeStatus::NullPointer, "null qubit list"));
        } else {
            std::slice::from_raw_parts(qubits, len)
        };
        let n = s.lattice.num_qubits();
        if let Some(q) = list.iter().find(|&&q| q >= n) {
            return Err(fail(TwisteeStatus::OutOfRange, format!("qubit index {q} with {n} qubits")));
        }
        let mask = BitVec::from_indices(n, list.iter().copied());
        *out = region_entropy(s.state.generators(), &mask)?;
        Ok(())
    })
}

/// Runs every experiment of a TOML config and returns the JSON report.
/// Free the string with [`twistee_string_free`].
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn twistee_run_config_json(
    config_toml: *const c_char,
    oracle_cap: usize,
    cross_check: bool,
    out: *mut *mut c_char,
) -> TwisteeStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null_out)?;
        *out = ptr::null_mut();
        let file = ConfigFile::parse(read_str(config_toml)?, "<ffi>")?;
        let reports = run_config(&file, &RunOptions { oracle_cap, cross_check })?;
        let mut buf = Vec::new();
        write_json(&reports, &mut buf)?;
        *out = CString::new(buf).map_err(|_| fail(TwisteeStatus::Internal, "report contains NUL"))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn twistee_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Annular entropy predicted by a fusion table.
///
/// # Safety
/// `table` must point to `len` readable rows and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn twistee_predict_s_ann(
    table: *const TwisteeFusionOutcome,
    len: usize,
    total_dimension: f64,
    out: *mut f64,
) -> TwisteeStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null_out)?;
        if table.is_null() && len > 0 {
            return Err(fail(TwisteeStatus::NullPointer, "null fusion table"));
        }
        let rows: Vec<FusionOutcome> = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(table, len)
                .iter()
                .map(|r| FusionOutcome::new(r.probability, r.d_inner, r.d_outer))
                .collect()
        };
        *out = predict_s_ann(&rows, total_dimension)?;
        Ok(())
    })
}

/// Quantum dimension `d = D · 2^(s_ann / 2)`.
#[no_mangle]
pub extern "C" fn twistee_extract_dimension(s_ann: f64, total_dimension: f64) -> f64 {
    extract_dimension(s_ann, total_dimension)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn twistee_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn twistee_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
