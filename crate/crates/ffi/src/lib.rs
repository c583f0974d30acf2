//! C ABI over the baseparam library.
//!
//! Objects are opaque handles created by `bp_*` constructors and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`BpStatus`]; the message of the last failure on the calling thread is
//! available from [`bp_last_error`]. Strings returned by the library are
//! released with [`bp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use baseparam::analysis::{self, ValidateOptions};
use baseparam::model::RobotModel;
use baseparam::{robots, Error};
use nalgebra::Vector3;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Schema = 4,
    InvalidModel = 5,
    OutOfWorkspace = 6,
    NoAcceptedSamples = 7,
    InvalidArgument = 8,
    BufferTooSmall = 9,
    NotFound = 10,
    Internal = 11,
    Panic = 12,
}

/// Opaque robot model.
pub struct BpModel(RobotModel);

/// Opaque result of the nullspace analysis.
pub struct BpAnalysis(analysis::Analysis);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BpStatus {
    match e {
        Error::Io { .. } => BpStatus::Io,
        Error::Schema { .. } => BpStatus::Schema,
        Error::Model { .. } | Error::NonUnitMotor { .. } | Error::NonRigidTransform { .. } => BpStatus::InvalidModel,
        Error::OutOfWorkspace { .. } | Error::Singular { .. } => BpStatus::OutOfWorkspace,
        Error::NoAcceptedSamples { .. } => BpStatus::NoAcceptedSamples,
        Error::InvalidArgument(_) | Error::Shape(_) | Error::Empty(_) => BpStatus::InvalidArgument,
        _ => BpStatus::Internal,
    }
}

/// Runs `f`, recording the error message and mapping panics.
fn guard(f: impl FnOnce() -> Result<(), (BpStatus, String)>) -> BpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BpStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BpStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (BpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (BpStatus, String) {
    (BpStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BpStatus, String)> {
    if p.is_null() {
        return Err(null_err(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (BpStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn model_ref<'a>(m: *const BpModel) -> Result<&'a RobotModel, (BpStatus, String)> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null_err("model"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (BpStatus, String)> {
    if out.is_null() {
        return Err(null_err("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn bp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a robot description file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_model_load(path: *const c_char, out: *mut *mut BpModel) -> BpStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put(out, BpModel(RobotModel::load(path).map_err(lib_err)?))
    })
}

/// Parses a robot description from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_model_from_json(json: *const c_char, out: *mut *mut BpModel) -> BpStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        put(out, BpModel(RobotModel::from_json(text, "<json>").map_err(lib_err)?))
    })
}

/// Loads a bundled robot: `puma560`, `go2`, `2rru1rrs` or `2prs1psr`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_model_bundled(name: *const c_char, out: *mut *mut BpModel) -> BpStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let model = robots::bundled(name).ok_or_else(|| (BpStatus::NotFound, format!("no bundled robot `{name}`")))?;
        put(out, BpModel(model.map_err(lib_err)?))
    })
}

/// Replaces the apparent gravity acceleration (`0, 0, 9.81` when gravity
/// pulls along -z).
///
/// # Safety
/// `model` must be a handle from a `bp_model_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn bp_model_set_gravity(model: *mut BpModel, x: f64, y: f64, z: f64) -> BpStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null_err("model"))?;
        m.0 = m.0.with_gravity(Vector3::new(x, y, z));
        Ok(())
    })
}

/// Number of bodies, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a handle from a `bp_model_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn bp_model_bodies(model: *const BpModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.n)
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet released.
#[no_mangle]
pub unsafe extern "C" fn bp_model_free(model: *mut BpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Computes the regressor nullspace and base space of a model.
///
/// # Safety
/// `model` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_analyze(model: *const BpModel, out: *mut *mut BpAnalysis) -> BpStatus {
    guard(|| {
        let m = model_ref(model)?;
        put(out, BpAnalysis(analysis::analyze(m).map_err(lib_err)?))
    })
}

/// Nullspace dimension, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a handle from [`bp_analyze`].
#[no_mangle]
pub unsafe extern "C" fn bp_analysis_nullspace_dim(a: *const BpAnalysis) -> usize {
    a.as_ref().map_or(0, |a| a.0.report.d)
}

/// Number of base parameters, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a handle from [`bp_analyze`].
#[no_mangle]
pub unsafe extern "C" fn bp_analysis_base_count(a: *const BpAnalysis) -> usize {
    a.as_ref().map_or(0, |a| a.0.report.base)
}

/// Copies the `10n x d` nullspace basis into `buf` in row-major order.
/// `len` is the capacity of `buf` in doubles; `*rows` and `*cols` receive
/// the shape (also when the buffer is too small).
///
/// # Safety
/// `a` must be a valid handle; `buf` must hold `len` doubles; `rows` and
/// `cols` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bp_analysis_nullspace(
    a: *const BpAnalysis,
    buf: *mut f64,
    len: usize,
    rows: *mut usize,
    cols: *mut usize,
) -> BpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null_err("analysis"))?;
        if rows.is_null() || cols.is_null() {
            return Err(null_err("rows/cols"));
        }
        let b = &a.0.b_null;
        *rows = b.nrows();
        *cols = b.ncols();
        let need = b.len();
        if need > len {
            return Err((BpStatus::BufferTooSmall, format!("need {need} doubles, buffer holds {len}")));
        }
        if need > 0 && buf.is_null() {
            return Err(null_err("buf"));
        }
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                *buf.add(r * b.ncols() + c) = b[(r, c)];
            }
        }
        Ok(())
    })
}

/// Analysis report as JSON. Release with [`bp_string_free`].
///
/// # Safety
/// `a` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_analysis_report_json(a: *const BpAnalysis, out: *mut *mut c_char) -> BpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null_err("analysis"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        *out = into_c_string(serde_json::to_string(&a.0.report).map_err(|e| (BpStatus::Internal, e.to_string()))?);
        Ok(())
    })
}

/// Releases an analysis. Null is ignored.
///
/// # Safety
/// `a` must be null or a handle not yet released.
#[no_mangle]
pub unsafe extern "C" fn bp_analysis_free(a: *mut BpAnalysis) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Cross-validates the analytical nullspace against `samples` seeded
/// random samples. `*pass` receives 1 when both criteria hold, else 0;
/// `report_json`, when not null, receives the JSON report (release with
/// [`bp_string_free`]). `cond_gate` and `rank_tol` use the library
/// defaults when not positive.
///
/// # Safety
/// `model` must be a valid handle; `pass` a valid pointer; `report_json`
/// null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_validate(
    model: *const BpModel,
    samples: usize,
    seed: u64,
    cond_gate: f64,
    rank_tol: f64,
    pass: *mut i32,
    report_json: *mut *mut c_char,
) -> BpStatus {
    guard(|| {
        let m = model_ref(model)?;
        if pass.is_null() {
            return Err(null_err("pass"));
        }
        let defaults = ValidateOptions::default();
        let opts = ValidateOptions {
            samples,
            seed,
            cond_gate: if cond_gate > 0.0 { cond_gate } else { defaults.cond_gate },
            rank_tol: if rank_tol > 0.0 { rank_tol } else { defaults.rank_tol },
            parallel: true,
        };
        let v = analysis::validate(m, &opts).map_err(lib_err)?;
        *pass = i32::from(v.report.pass);
        if !report_json.is_null() {
            *report_json =
                into_c_string(serde_json::to_string(&v.report).map_err(|e| (BpStatus::Internal, e.to_string()))?);
        }
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet released.
#[no_mangle]
pub unsafe extern "C" fn bp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
