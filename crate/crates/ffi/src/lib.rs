//! C ABI over the `intres` library.
//!
//! Posets and modules cross the boundary as opaque handles built from the
//! JSON documents the command-line tool reads. Every fallible function
//! returns an [`IntresStatus`]; on failure a description is available from
//! [`intres_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with
//! [`intres_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use intres::approx::{interval_cover, interval_resolution, ResolutionOptions};
use intres::classify::classify_zero_gldim;
use intres::homological::{interval_gldim, projective_gldim};
use intres::io::{cover_value, parse_module, parse_poset, resolution_value};
use intres::{Error, Field, PersModule, Poset};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntresStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unparseable JSON, schema violation or unsupported characteristic.
    Malformed = 3,
    /// Non-commutative module, cyclic relations or a non-interval.
    Validation = 4,
    /// Step limit or internal invariant breach.
    Internal = 5,
    Panic = 6,
}

/// Opaque poset handle.
pub struct IntresPoset(Arc<Poset>);

/// Opaque module handle.
pub struct IntresModule(Arc<PersModule>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IntresStatus {
    match e.exit_code() {
        2 => IntresStatus::Validation,
        3 => IntresStatus::Internal,
        _ => IntresStatus::Malformed,
    }
}

struct Fail(IntresStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IntresStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IntresStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
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
            IntresStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail(IntresStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Fail(IntresStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(IntresStatus::NullPointer, format!("null {what}")))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(IntresStatus::NullPointer, "null out pointer".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: &serde_json::Value) -> Result<(), Fail> {
    let s = CString::new(v.to_string()).expect("JSON has no nul bytes");
    write(out, s.into_raw())
}

fn field(prime: u32) -> Result<Field, Fail> {
    Ok(Field::new(prime)?)
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn intres_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn intres_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn intres_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a poset document `{"elements": [...], "relations": [[a, b], ...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_from_json(json: *const c_char, out: *mut *mut IntresPoset) -> IntresStatus {
    guard(|| {
        let p = parse_poset(read_str(json)?)?;
        write(out, Box::into_raw(Box::new(IntresPoset(Arc::new(p)))))
    })
}

/// # Safety
/// `p` must be null or a handle from [`intres_poset_from_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_free(p: *mut IntresPoset) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live poset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_len(p: *const IntresPoset, out: *mut usize) -> IntresStatus {
    guard(|| write(out, deref(p, "poset")?.0.len()))
}

/// Number of intervals (connected convex subsets).
///
/// # Safety
/// `p` must be a live poset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_interval_count(p: *const IntresPoset, out: *mut usize) -> IntresStatus {
    guard(|| write(out, deref(p, "poset")?.0.enumerate_intervals().len()))
}

/// Interval resolution global dimension over GF(`prime`).
///
/// # Safety
/// `p` must be a live poset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_interval_gldim(
    p: *const IntresPoset,
    prime: u32,
    out: *mut usize,
) -> IntresStatus {
    guard(|| {
        let g = interval_gldim(&deref(p, "poset")?.0, field(prime)?)?;
        write(out, g)
    })
}

/// Global dimension of the incidence algebra over GF(`prime`).
///
/// # Safety
/// `p` must be a live poset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_projective_gldim(
    p: *const IntresPoset,
    prime: u32,
    out: *mut usize,
) -> IntresStatus {
    guard(|| {
        let g = projective_gldim(&deref(p, "poset")?.0, field(prime)?)?;
        write(out, g)
    })
}

/// Shape verdict as JSON; `*accepted` is set when the poset has interval
/// resolution global dimension zero. Either out pointer may be null.
///
/// # Safety
/// `p` must be a live poset handle.
#[no_mangle]
pub unsafe extern "C" fn intres_poset_classify(
    p: *const IntresPoset,
    accepted: *mut bool,
    out_json: *mut *mut c_char,
) -> IntresStatus {
    guard(|| {
        let verdict = classify_zero_gldim(&deref(p, "poset")?.0);
        if !accepted.is_null() {
            accepted.write(verdict.accepted);
        }
        if !out_json.is_null() {
            write_json(out_json, &serde_json::to_value(&verdict).expect("verdicts serialize"))?;
        }
        Ok(())
    })
}

/// Parses and validates a module document. `default_prime` applies when
/// the document has no `p`. Poset file references resolve against the
/// working directory.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_module_from_json(
    json: *const c_char,
    default_prime: u32,
    out: *mut *mut IntresModule,
) -> IntresStatus {
    guard(|| {
        let m = parse_module(read_str(json)?, field(default_prime)?, None)?;
        write(out, Box::into_raw(Box::new(IntresModule(Arc::new(m)))))
    })
}

/// # Safety
/// `m` must be null or a handle from [`intres_module_from_json`], freed once.
#[no_mangle]
pub unsafe extern "C" fn intres_module_free(m: *mut IntresModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Total dimension of the module.
///
/// # Safety
/// `m` must be a live module handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_module_total_dim(m: *const IntresModule, out: *mut usize) -> IntresStatus {
    guard(|| write(out, deref(m, "module")?.0.total_dim()))
}

/// Interval resolution dimension.
///
/// # Safety
/// `m` must be a live module handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_module_resdim(m: *const IntresModule, out: *mut usize) -> IntresStatus {
    guard(|| {
        let r = interval_resolution(&deref(m, "module")?.0, ResolutionOptions::default())?;
        write(out, r.length())
    })
}

/// Interval cover as JSON: summands, generators and the covering map.
///
/// # Safety
/// `m` must be a live module handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_module_cover_json(m: *const IntresModule, out: *mut *mut c_char) -> IntresStatus {
    guard(|| {
        let c = interval_cover(&deref(m, "module")?.0)?;
        write_json(out, &cover_value(&c))
    })
}

/// Minimal interval resolution as JSON.
///
/// # Safety
/// `m` must be a live module handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn intres_module_resolution_json(
    m: *const IntresModule,
    reduce_support: bool,
    out: *mut *mut c_char,
) -> IntresStatus {
    guard(|| {
        let opts = ResolutionOptions {
            reduce_support,
            ..Default::default()
        };
        let r = interval_resolution(&deref(m, "module")?.0, opts)?;
        write_json(out, &resolution_value(&r))
    })
}

/// Number of indecomposable modules over the cycle poset `C(m, l)`.
#[no_mangle]
pub extern "C" fn intres_count_indecomposables(m: usize, l: usize) -> usize {
    intres::classify::count_indecomposables(m, l)
}
