//! C ABI for the `tongues` library.
//!
//! Every function returns a [`TonguesStatus`]; on failure a message is
//! available from [`tongues_last_error`] until the next call on the same
//! thread. Rationals cross the boundary as `"a/b"` strings. Strings handed
//! out by the library must be released with [`tongues_string_free`], and
//! handles with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;

use tongues::circle_map::{CircleMapError, FamilyPoint, ModeLock};
use tongues::cli;
use tongues::forcing::Forcing;
use tongues::numeric::{fmt_rational, from_f64, parse_rational, rat, Rational};
use tongues::pinch::{enumerate_pinches, pinch_b, PinchError};
use tongues::pl::{pl_from_family, PLMap};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TonguesStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Unresolved = 3,
    Invalid = 4,
    Compute = 5,
    Panic = 6,
}

/// Opaque forcing handle.
pub struct TonguesForcing(Forcing);

/// Opaque handle for an exact PL circle-map lift.
pub struct TonguesPlMap(PLMap);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(TonguesStatus, String);

impl Failure {
    fn new(status: TonguesStatus, msg: impl ToString) -> Failure {
        Failure(status, msg.to_string())
    }
}

impl From<cli::CliError> for Failure {
    fn from(e: cli::CliError) -> Failure {
        let status = match e.exit_code() {
            2 => TonguesStatus::Parse,
            3 => TonguesStatus::Unresolved,
            _ => TonguesStatus::Compute,
        };
        Failure(status, e.to_json())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TonguesStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TonguesStatus::Ok
        }
        Ok(Err(Failure(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TonguesStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(TonguesStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(TonguesStatus::Parse, format!("{name} is not UTF-8")))
}

unsafe fn rat_arg(p: *const c_char, name: &str) -> Result<Rational, Failure> {
    let s = str_arg(p, name)?;
    parse_rational(s).map_err(|e| Failure::new(TonguesStatus::Parse, format!("{name}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(TonguesStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(TonguesStatus::NullPointer, format!("{name} is null")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn map_failure(e: PinchError) -> Failure {
    let status = match e {
        PinchError::Unresolved(_) => TonguesStatus::Unresolved,
        PinchError::JOutOfRange { .. } | PinchError::NonPositiveWeight | PinchError::NotTwoBreak => {
            TonguesStatus::Invalid
        }
        _ => TonguesStatus::Compute,
    };
    Failure::new(status, e)
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn tongues_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tongues_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `sine`, `triangle:<rat>` or `pl:w=<rat,...>;l=<rat,...>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_forcing_parse(spec: *const c_char, out: *mut *mut TonguesForcing) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = str_arg(spec, "spec")?;
        let f = Forcing::from_str(s).map_err(|e| Failure::new(TonguesStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(TonguesForcing(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from [`tongues_forcing_parse`].
#[no_mangle]
pub unsafe extern "C" fn tongues_forcing_free(f: *mut TonguesForcing) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Canonical spec string of a forcing.
///
/// # Safety
/// `f` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_forcing_spec(f: *const TonguesForcing, out: *mut *mut c_char) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = c_string(ref_arg(f, "forcing")?.0.to_string());
        Ok(())
    })
}

/// Compares the rotation number of `f_{b,ω}` with `p/q`: writes -1 (below),
/// 0 (locked) or 1 (above).
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tongues_mode_lock(
    f: *const TonguesForcing,
    b: *const c_char,
    omega: *const c_char,
    p: i64,
    q: u32,
    out: *mut i32,
) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if q == 0 {
            return Err(Failure::new(TonguesStatus::Invalid, "q must be positive"));
        }
        let f = ref_arg(f, "forcing")?;
        let fp = FamilyPoint::new(rat_arg(b, "b")?, rat_arg(omega, "omega")?, f.0.clone())
            .map_err(|e| Failure::new(TonguesStatus::Invalid, e))?;
        *out = match fp.mode_lock_test(p, q) {
            Ok(ModeLock::Below) => -1,
            Ok(ModeLock::Locked) => 0,
            Ok(ModeLock::Above) => 1,
            Err(e @ CircleMapError::Unresolved { .. }) => return Err(Failure::new(TonguesStatus::Unresolved, e)),
            Err(e) => return Err(Failure::new(TonguesStatus::Compute, e)),
        };
        Ok(())
    })
}

/// The exact lift `x ↦ x + ω + b·φ(x)` of a PL forcing.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tongues_pl_map_new(
    f: *const TonguesForcing,
    b: *const c_char,
    omega: *const c_char,
    out: *mut *mut TonguesPlMap,
) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f = ref_arg(f, "forcing")?;
        let pl =
            f.0.as_pl()
                .ok_or_else(|| Failure::new(TonguesStatus::Invalid, "forcing is not piecewise linear"))?;
        let m = pl_from_family(&rat_arg(b, "b")?, &rat_arg(omega, "omega")?, pl)
            .map_err(|e| Failure::new(TonguesStatus::Invalid, e))?;
        *out = Box::into_raw(Box::new(TonguesPlMap(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tongues_pl_map_free(m: *mut TonguesPlMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `m^q` as a new handle.
///
/// # Safety
/// `m` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_pl_map_power(
    m: *const TonguesPlMap,
    q: u32,
    out: *mut *mut TonguesPlMap,
) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let m = ref_arg(m, "map")?;
        let r = m.0.power(q).map_err(|e| Failure::new(TonguesStatus::Compute, e))?;
        *out = Box::into_raw(Box::new(TonguesPlMap(r)));
        Ok(())
    })
}

/// Writes 1 when the lift is exactly `x ↦ x + p`, else 0.
///
/// # Safety
/// `m` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_pl_map_is_translation(m: *const TonguesPlMap, p: i64, out: *mut i32) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = i32::from(ref_arg(m, "map")?.0.is_translation(p));
        Ok(())
    })
}

/// Exact value of the lift at `x`, as `"a/b"`.
///
/// # Safety
/// `m` must be valid; `x` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_pl_map_eval(
    m: *const TonguesPlMap,
    x: *const c_char,
    out: *mut *mut c_char,
) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = ref_arg(m, "map")?;
        *out = c_string(fmt_rational(&m.0.eval(&rat_arg(x, "x")?)));
        Ok(())
    })
}

/// JSON form `{"breakpoints":[…],"slopes":[…],"anchor":"a/b"}`.
///
/// # Safety
/// `m` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_pl_map_to_json(m: *const TonguesPlMap, out: *mut *mut c_char) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = ref_arg(m, "map")?;
        *out = c_string(serde_json::to_string(&m.0).map_err(|e| Failure::new(TonguesStatus::Compute, e))?);
        Ok(())
    })
}

/// Tongue sweep as CSV (`b = i/b_steps`, `1 ≤ i ≤ b_steps`). `tol` may be
/// null for the default `2^-40`.
///
/// # Safety
/// `f` must be valid; `tol` null or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_scan_csv(
    f: *const TonguesForcing,
    q_max: u32,
    b_steps: u32,
    tol: *const c_char,
    out: *mut *mut c_char,
) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f = ref_arg(f, "forcing")?;
        let tol = if tol.is_null() {
            tongues::tongue_scan::default_tol()
        } else {
            cli::parse_tol(str_arg(tol, "tol")?)?
        };
        let (records, _, failures) = cli::scan(&f.0, q_max, b_steps, &tol)?;
        if let Some(e) = failures.first() {
            return Err(Failure::new(TonguesStatus::Unresolved, e));
        }
        let mut buf = Vec::new();
        cli::write_csv(&records, &mut buf)?;
        *out = c_string(String::from_utf8(buf).map_err(|e| Failure::new(TonguesStatus::Compute, e))?);
        Ok(())
    })
}

/// JSON pinch report for a two-break forcing, all `p/q` with `q ≤ q_max`.
///
/// # Safety
/// `f` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_pinch_json(
    f: *const TonguesForcing,
    q_max: u32,
    out: *mut *mut c_char,
) -> TonguesStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let f = ref_arg(f, "forcing")?;
        let w =
            f.0.as_pl()
                .and_then(|p| p.two_break_weight())
                .ok_or_else(|| map_failure(PinchError::NotTwoBreak))?;
        let pinches = enumerate_pinches(w, q_max, &rat(1, 1 << 50))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(map_failure)?;
        *out = c_string(serde_json::to_string(&pinches).map_err(|e| Failure::new(TonguesStatus::Compute, e))?);
        Ok(())
    })
}

/// Enclosure `[lo, hi]` of the pinch coupling `b_{q,j,w}` as floats rounded
/// outward.
///
/// # Safety
/// `w` NUL-terminated; `lo`, `hi` writable.
#[no_mangle]
pub unsafe extern "C" fn tongues_pinch_b(
    q: u32,
    j: u32,
    w: *const c_char,
    lo: *mut f64,
    hi: *mut f64,
) -> TonguesStatus {
    guard(|| {
        let lo = out_arg(lo, "lo")?;
        let hi = out_arg(hi, "hi")?;
        let b = pinch_b(q, j, &rat_arg(w, "w")?).map_err(map_failure)?;
        let e = b.enclosure();
        let (l, h) = e.to_f64_pair();
        *lo = if from_f64(l).is_some_and(|x| &x > e.lo()) {
            l.next_down()
        } else {
            l
        };
        *hi = if from_f64(h).is_some_and(|x| &x < e.hi()) {
            h.next_up()
        } else {
            h
        };
        Ok(())
    })
}
