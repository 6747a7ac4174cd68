//! C ABI for wreathcoh.
//!
//! Graded groups cross the boundary as opaque `WcGraded` handles or as JSON
//! strings. Every call returns a `WcStatus`; on failure `wc_last_error`
//! gives a message for the calling thread. Strings returned through `char**`
//! are owned by the caller and released with `wc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wreathcoh::arith::Tower;
use wreathcoh::cli::single_summand;
use wreathcoh::complexes::{GradedAbelianGroup, Window};
use wreathcoh::equivariant::{bruteforce_cyclic, bruteforce_graded};
use wreathcoh::formulas::{detection_kernel, detection_kernel_sigma_p, predict_wreath_cohomology};
use wreathcoh::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    Malformed = 2,
    Precondition = 3,
    Unsupported = 4,
    InsufficientPadding = 5,
    Overflow = 6,
    Internal = 7,
}

/// Opaque graded abelian group.
pub struct WcGraded {
    inner: GradedAbelianGroup,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> WcStatus {
    match e {
        Error::Malformed(_) | Error::DimensionMismatch(_) | Error::NotAChainMap { .. } | Error::NotACocycle { .. } => {
            WcStatus::Malformed
        }
        Error::Precondition(_) => WcStatus::Precondition,
        Error::Unsupported(_) => WcStatus::Unsupported,
        Error::InsufficientPadding { .. } => WcStatus::InsufficientPadding,
        Error::Overflow(_) => WcStatus::Overflow,
    }
}

fn guard(f: impl FnOnce() -> Result<(), WcStatus>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            WcStatus::Internal
        }
    }
}

fn lift<T>(r: wreathcoh::Result<T>) -> Result<T, WcStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, WcStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(WcStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not UTF-8");
        WcStatus::Malformed
    })
}

unsafe fn graded_arg<'a>(h: *const WcGraded) -> Result<&'a GradedAbelianGroup, WcStatus> {
    h.as_ref().map(|g| &g.inner).ok_or_else(|| {
        set_error("null graded group handle");
        WcStatus::NullPointer
    })
}

unsafe fn put_graded(out: *mut *mut WcGraded, g: GradedAbelianGroup) -> Result<(), WcStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(WcStatus::NullPointer);
    }
    *out = Box::into_raw(Box::new(WcGraded { inner: g }));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), WcStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(WcStatus::NullPointer);
    }
    *out = CString::new(s).map_err(|_| WcStatus::Internal)?.into_raw();
    Ok(())
}

fn window(lo: i64, hi: i64) -> Result<Window, WcStatus> {
    lift(Window::new(lo, hi))
}

/// Message of the last failed call on this thread; empty if none.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn wc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn wc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `h` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn wc_graded_free(h: *mut WcGraded) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses GradedAbelianGroup JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_graded_from_json(json: *const c_char, out: *mut *mut WcGraded) -> WcStatus {
    guard(|| {
        let s = str_arg(json)?;
        put_graded(out, lift(GradedAbelianGroup::from_json(s))?)
    })
}

/// # Safety
/// `h` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_graded_to_json(h: *const WcGraded, out: *mut *mut c_char) -> WcStatus {
    guard(|| {
        let g = graded_arg(h)?;
        put_string(out, g.to_json())
    })
}

/// Writes up to `cap` orders of the summands in `degree` (0 = Z) into `buf`
/// and their total number into `count`.
///
/// # Safety
/// `buf` must hold `cap` values (or be null with `cap` = 0); `count` valid.
#[no_mangle]
pub unsafe extern "C" fn wc_graded_orders_at(
    h: *const WcGraded,
    degree: i64,
    buf: *mut u64,
    cap: usize,
    count: *mut usize,
) -> WcStatus {
    guard(|| {
        let g = graded_arg(h)?;
        if count.is_null() || (buf.is_null() && cap > 0) {
            set_error("null output pointer");
            return Err(WcStatus::NullPointer);
        }
        let orders = g.orders_at(degree);
        for (k, o) in orders.iter().take(cap).enumerate() {
            *buf.add(k) = *o;
        }
        *count = orders.len();
        Ok(())
    })
}

/// Closed-form cohomology of the wreath product with C_p, exact through `max_degree`.
///
/// # Safety
/// `h` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_predict(h: *const WcGraded, p: u64, max_degree: i64, out: *mut *mut WcGraded) -> WcStatus {
    guard(|| {
        let g = graded_arg(h)?;
        put_graded(out, lift(predict_wreath_cohomology(g, p, max_degree))?.result)
    })
}

/// Brute-force cohomology on [lo, hi] for the minimal model of `h`.
///
/// # Safety
/// `h` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_bruteforce(h: *const WcGraded, p: u64, lo: i64, hi: i64, out: *mut *mut WcGraded) -> WcStatus {
    guard(|| {
        let g = graded_arg(h)?;
        put_graded(out, lift(bruteforce_graded(g, p, window(lo, hi)?))?)
    })
}

/// Brute-force cohomology on [lo, hi] for D(n, d).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_bruteforce_cyclic(p: u64, n: u64, d: i64, lo: i64, hi: i64, out: *mut *mut WcGraded) -> WcStatus {
    guard(|| put_graded(out, lift(bruteforce_cyclic(p, n, d, window(lo, hi)?))?))
}

/// Detection kernel; `symmetric` nonzero selects the symmetric group on p letters.
///
/// # Safety
/// `h` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_detection_kernel(
    h: *const WcGraded,
    p: u64,
    max_degree: i64,
    symmetric: c_int,
    out: *mut *mut WcGraded,
) -> WcStatus {
    guard(|| {
        let g = graded_arg(h)?;
        let k = if symmetric != 0 { detection_kernel_sigma_p(g, p, max_degree) } else { detection_kernel(g, p, max_degree) };
        put_graded(out, lift(k)?)
    })
}

/// Exponent JSON for a tower such as "C:9 wr C_3".
///
/// # Safety
/// `tower` must be NUL-terminated; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_exponents(tower: *const c_char, out: *mut *mut c_char) -> WcStatus {
    guard(|| {
        let t: Tower = lift(str_arg(tower)?.parse())?;
        put_string(out, lift(t.exponents())?.to_json())
    })
}

/// Compares brute force with prediction for D(n, d); `matches` gets 1 or 0.
///
/// # Safety
/// `matches` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_verify(p: u64, n: u64, d: i64, lo: i64, hi: i64, matches: *mut c_int) -> WcStatus {
    guard(|| {
        if matches.is_null() {
            set_error("null output pointer");
            return Err(WcStatus::NullPointer);
        }
        let w = window(lo, hi)?;
        let brute = lift(bruteforce_cyclic(p, n, d, w))?;
        let pred = lift(predict_wreath_cohomology(&single_summand(n, d), p, hi))?.result;
        *matches = c_int::from(brute.equal_on(&pred, lo, hi));
        Ok(())
    })
}
