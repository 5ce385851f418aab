//! C interface. Monoids and acts live behind opaque handles; results come
//! back as status codes plus JSON strings owned by the caller, to be
//! released with `ra_string_free`. After a non-OK status,
//! `ra_last_error` describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use regacts::act::{parse_act, write_act, Act, MonoidSource};
use regacts::deciders::{build_counterexample, decide_class, necessity_violation, theorem1_check, Verdict};
use regacts::monoid::{parse_monoid, Monoid};

/// Status of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The input text does not parse or violates the axioms.
    Parse = 3,
    /// Well-formed input that the operation rejects.
    Rejected = 4,
    Panic = 5,
}

/// A finite monoid.
pub struct RaMonoid(Arc<Monoid>);

/// A finite left act.
pub struct RaAct(Act);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("no interior nul"));
}

fn fail(status: RaStatus, msg: impl Into<String>) -> RaStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `RaStatus::Panic`.
fn guarded(f: impl FnOnce() -> RaStatus) -> RaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == RaStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RaStatus::Panic, msg)
        }
    }
}

/// # Safety
/// `s` is null or a valid nul-terminated string.
unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, RaStatus> {
    if s.is_null() {
        return Err(fail(RaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(RaStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// # Safety
/// `out` is null or writable.
unsafe fn put<T>(out: *mut T, v: T) -> Result<(), RaStatus> {
    if out.is_null() {
        return Err(fail(RaStatus::NullPointer, "null output argument"));
    }
    out.write(v);
    Ok(())
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failure on this thread; empty after a success. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ra_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ra_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is null or came from this library and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn ra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a monoid in the table format.
///
/// # Safety
/// `src` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ra_monoid_parse(src: *const c_char, out: *mut *mut RaMonoid) -> RaStatus {
    guarded(|| {
        let src = tri!(text(src));
        match parse_monoid(src) {
            Ok(m) => {
                tri!(put(out, Box::into_raw(Box::new(RaMonoid(Arc::new(m))))));
                RaStatus::Ok
            }
            Err(e) => fail(RaStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `m` is null or an unfreed handle from `ra_monoid_parse`.
#[no_mangle]
pub unsafe extern "C" fn ra_monoid_free(m: *mut RaMonoid) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of elements; 0 for a null handle.
///
/// # Safety
/// `m` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_monoid_order(m: *const RaMonoid) -> usize {
    m.as_ref().map_or(0, |m| m.0.order())
}

/// Class-level verdict. `code` receives 0 (primitive normal),
/// 1 (not primitive normal) or 2 (inapplicable); `json` the full decision.
///
/// # Safety
/// `m` is a live handle; `code` and `json` are writable.
#[no_mangle]
pub unsafe extern "C" fn ra_monoid_decide(m: *const RaMonoid, code: *mut i32, json: *mut *mut c_char) -> RaStatus {
    guarded(|| {
        let Some(m) = m.as_ref() else { return fail(RaStatus::NullPointer, "null monoid") };
        let d = decide_class(&m.0);
        let s = serde_json::to_string(&d).expect("decision serializes");
        tri!(put(code, d.exit_code()));
        tri!(put(json, to_c(s)));
        RaStatus::Ok
    })
}

/// Parses an act. A `monoid-file:` line is resolved against `base_dir`,
/// which may be null for acts with an inline monoid.
///
/// # Safety
/// `src` is a nul-terminated string, `base_dir` null or one; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_act_parse(src: *const c_char, base_dir: *const c_char, out: *mut *mut RaAct) -> RaStatus {
    guarded(|| {
        let src = tri!(text(src));
        let base = if base_dir.is_null() { "." } else { tri!(text(base_dir)) };
        match parse_act(src, Path::new(base)) {
            Ok((a, _)) => {
                tri!(put(out, Box::into_raw(Box::new(RaAct(a)))));
                RaStatus::Ok
            }
            Err(e) => fail(RaStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `a` is null or an unfreed act handle.
#[no_mangle]
pub unsafe extern "C" fn ra_act_free(a: *mut RaAct) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `a` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_act_size(a: *const RaAct) -> usize {
    a.as_ref().map_or(0, |a| a.0.size())
}

/// Whether every point is act-regular.
///
/// # Safety
/// `a` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_act_is_regular(a: *const RaAct) -> bool {
    a.as_ref().is_some_and(|a| a.0.is_regular())
}

/// The act in the text format, with its monoid inline.
///
/// # Safety
/// `a` is a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_act_write(a: *const RaAct, out: *mut *mut c_char) -> RaStatus {
    guarded(|| {
        let Some(a) = a.as_ref() else { return fail(RaStatus::NullPointer, "null act") };
        tri!(put(out, to_c(write_act(&a.0, &MonoidSource::Inline))));
        RaStatus::Ok
    })
}

/// Per-act primitive normality. `holds` receives the verdict; `json` the
/// witness triple and the necessity formula when it fails, or `null`.
///
/// # Safety
/// `a` is a live handle; `holds` and `json` are writable.
#[no_mangle]
pub unsafe extern "C" fn ra_act_check(a: *const RaAct, holds: *mut bool, json: *mut *mut c_char) -> RaStatus {
    guarded(|| {
        let Some(a) = a.as_ref() else { return fail(RaStatus::NullPointer, "null act") };
        let (ok, body) = match theorem1_check(&a.0) {
            Verdict::Fails(w) => {
                let nv = necessity_violation(&w);
                let body = serde_json::json!({
                    "witness": w,
                    "formula": nv.formula.display(a.0.monoid()).to_string(),
                    "params": nv.params,
                    "shared": nv.shared,
                    "separating": nv.separating,
                    "verified": nv.verify(&a.0),
                });
                (false, body.to_string())
            }
            _ => (true, "null".to_string()),
        };
        tri!(put(holds, ok));
        tri!(put(json, to_c(body)));
        RaStatus::Ok
    })
}

/// Glued counterexample from element names `a`, `b`, `c`. On success `act`
/// receives a new handle and `json` the construction details.
///
/// # Safety
/// `m` is a live handle; the names are nul-terminated; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ra_counterexample(
    m: *const RaMonoid,
    a: *const c_char,
    b: *const c_char,
    c: *const c_char,
    act: *mut *mut RaAct,
    json: *mut *mut c_char,
) -> RaStatus {
    guarded(|| {
        let Some(m) = m.as_ref() else { return fail(RaStatus::NullPointer, "null monoid") };
        let mut elems = [0; 3];
        for (slot, name) in elems.iter_mut().zip([a, b, c]) {
            let name = tri!(text(name));
            *slot = match m.0.element(name) {
                Some(e) => e,
                None => return fail(RaStatus::Rejected, format!("unknown element `{name}`")),
            };
        }
        match build_counterexample(&m.0, elems[0], elems[1], elems[2]) {
            Ok(ce) => {
                let body = serde_json::to_string(&ce).expect("counterexample serializes");
                if act.is_null() || json.is_null() {
                    return fail(RaStatus::NullPointer, "null output argument");
                }
                tri!(put(json, to_c(body)));
                tri!(put(act, Box::into_raw(Box::new(RaAct(ce.act)))));
                RaStatus::Ok
            }
            Err(e) => fail(RaStatus::Rejected, e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn parse_errors_set_last_error() {
        let mut m = ptr::null_mut();
        let s = unsafe { ra_monoid_parse(c("elements: 1\nidentity: 2\n").as_ptr(), &mut m) };
        assert_eq!(s, RaStatus::Parse);
        assert!(m.is_null());
        let msg = unsafe { CStr::from_ptr(ra_last_error()) }.to_str().unwrap();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn null_arguments() {
        let mut m = ptr::null_mut();
        assert_eq!(unsafe { ra_monoid_parse(ptr::null(), &mut m) }, RaStatus::NullPointer);
        assert_eq!(unsafe { ra_monoid_order(ptr::null()) }, 0);
        let mut code = 0;
        let mut json = ptr::null_mut();
        assert_eq!(unsafe { ra_monoid_decide(ptr::null(), &mut code, &mut json) }, RaStatus::NullPointer);
        unsafe { ra_string_free(ptr::null_mut()) };
        unsafe { ra_monoid_free(ptr::null_mut()) };
    }
}
