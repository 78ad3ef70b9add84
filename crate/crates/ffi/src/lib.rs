//! C ABI over the `approxlat` core.
//!
//! Every function returns an [`ApxStatus`]; on failure the message is kept
//! in a thread-local slot readable with [`apx_last_error`]. Schemes and
//! point sets are opaque heap handles released with their `_free`
//! functions. Strings returned to the caller are released with
//! [`apx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use num_traits::ToPrimitive;

use approxlat::cli::{run_config, Command, RunOptions};
use approxlat::exactnum::parse_rational;
use approxlat::scheme::{enumerate, PadicScheme, PointSet, QuadScheme, Scheme};
use approxlat::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApxStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad argument or violated precondition.
    InvalidArgument = 2,
    Capacity = 3,
    OutOfRange = 4,
    Verification = 5,
    Io = 6,
    Panic = 7,
}

/// A cut-and-project scheme (quadratic or p-adic).
pub struct ApxScheme(SchemeImpl);

enum SchemeImpl {
    Quad(QuadScheme),
    Padic(PadicScheme),
}

/// Points of a model set inside a region, in canonical order.
pub struct ApxPointSet(SetImpl);

enum SetImpl {
    Quad(PointSet<QuadScheme>),
    Padic(PointSet<PadicScheme>),
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: ApxStatus, msg: impl Into<String>) -> ApxStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> ApxStatus {
    let status = match &e {
        Error::Usage(_) | Error::Arith(_) | Error::Config(_) => ApxStatus::InvalidArgument,
        Error::Capacity { .. } => ApxStatus::Capacity,
        Error::Verification(_) => ApxStatus::Verification,
        Error::Io(_) => ApxStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`ApxStatus::Panic`].
fn guard(f: impl FnOnce() -> ApxStatus) -> ApxStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ApxStatus::Panic, "internal panic"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, ApxStatus> {
    if p.is_null() {
        return Err(fail(ApxStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ApxStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn apx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn apx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn apx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Scheme with lattice `Z[sqrt d]` and window `[-w, w]` (open unless
/// `closed`), `w` given as `"a"` or `"a/b"`.
///
/// # Safety
/// `window` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apx_scheme_quadratic_new(
    d: u64,
    window: *const c_char,
    closed: bool,
    out: *mut *mut ApxScheme,
) -> ApxStatus {
    guard(|| {
        new_scheme(window, out, |w| {
            QuadScheme::new(d, w, closed).map(SchemeImpl::Quad)
        })
    })
}

/// Scheme with lattice `Z[1/p]` diagonally in `Q_p x R`.
///
/// # Safety
/// As [`apx_scheme_quadratic_new`].
#[no_mangle]
pub unsafe extern "C" fn apx_scheme_padic_new(
    p: u64,
    window: *const c_char,
    closed: bool,
    out: *mut *mut ApxScheme,
) -> ApxStatus {
    guard(|| {
        new_scheme(window, out, |w| {
            PadicScheme::new(p, w, closed).map(SchemeImpl::Padic)
        })
    })
}

unsafe fn new_scheme(
    window: *const c_char,
    out: *mut *mut ApxScheme,
    make: impl FnOnce(approxlat::exactnum::Rational) -> approxlat::Result<SchemeImpl>,
) -> ApxStatus {
    if out.is_null() {
        return fail(ApxStatus::NullPointer, "out is null");
    }
    let w = match text(window, "window") {
        Ok(t) => t,
        Err(s) => return s,
    };
    let w = match parse_rational(w) {
        Ok(w) => w,
        Err(e) => return from_error(e.into()),
    };
    match make(w) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(ApxScheme(s)));
            ApxStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `s` must come from a scheme constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn apx_scheme_free(s: *mut ApxScheme) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

fn member<S: Scheme>(s: &S, a: i64, b: i64) -> approxlat::Result<bool> {
    Ok(s.in_lambda(&s.from_coords(a.into(), b.into())?))
}

/// Whether the point with coordinates `(a, b)` (`a + b sqrt d`, or
/// `a / p^b`) lies in the model set.
///
/// # Safety
/// `s` must be a live scheme and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apx_scheme_contains(
    s: *const ApxScheme,
    a: i64,
    b: i64,
    out: *mut bool,
) -> ApxStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return fail(ApxStatus::NullPointer, "scheme or out is null");
        }
        let r = match &(*s).0 {
            SchemeImpl::Quad(q) => member(q, a, b),
            SchemeImpl::Padic(p) => member(p, a, b),
        };
        match r {
            Ok(v) => {
                *out = v;
                ApxStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

fn enumerate_in<S: Scheme>(
    s: &S,
    center: (i64, i64),
    extent: &str,
    cap: u64,
) -> approxlat::Result<PointSet<S>> {
    let c = s.from_coords(center.0.into(), center.1.into())?;
    let r = s.parse_radius(extent)?;
    enumerate(s, &s.ball(&c, &r), cap)
}

/// All model-set points in the ball around `(center_a, center_b)`:
/// half-width `extent` (`"a"` or `"a/b"`) for the quadratic scheme, ball
/// level `extent` for the p-adic one. Refuses when the estimated count
/// exceeds `cap`.
///
/// # Safety
/// `s` must be a live scheme, `extent` a valid C string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn apx_enumerate(
    s: *const ApxScheme,
    center_a: i64,
    center_b: i64,
    extent: *const c_char,
    cap: u64,
    out: *mut *mut ApxPointSet,
) -> ApxStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return fail(ApxStatus::NullPointer, "scheme or out is null");
        }
        let extent = match text(extent, "extent") {
            Ok(t) => t,
            Err(st) => return st,
        };
        let c = (center_a, center_b);
        let set = match &(*s).0 {
            SchemeImpl::Quad(q) => enumerate_in(q, c, extent, cap).map(SetImpl::Quad),
            SchemeImpl::Padic(p) => enumerate_in(p, c, extent, cap).map(SetImpl::Padic),
        };
        match set {
            Ok(set) => {
                *out = Box::into_raw(Box::new(ApxPointSet(set)));
                ApxStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `set` must come from [`apx_enumerate`], or be null.
#[no_mangle]
pub unsafe extern "C" fn apx_pointset_free(set: *mut ApxPointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `set` must be a live point set or null.
#[no_mangle]
pub unsafe extern "C" fn apx_pointset_len(set: *const ApxPointSet) -> usize {
    if set.is_null() {
        return 0;
    }
    match &(*set).0 {
        SetImpl::Quad(s) => s.len(),
        SetImpl::Padic(s) => s.len(),
    }
}

fn coords_at<S: Scheme>(set: &PointSet<S>, i: usize) -> Result<(i64, i64), ApxStatus> {
    let x = set.points().get(i).ok_or_else(|| {
        fail(
            ApxStatus::OutOfRange,
            format!("index {i} out of range for {} points", set.len()),
        )
    })?;
    let (a, b) = set.scheme().coords(x);
    match (a.to_i64(), b.to_i64()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(fail(ApxStatus::OutOfRange, format!("coordinates of {x} exceed 64 bits"))),
    }
}

/// Coordinates of the `index`-th point.
///
/// # Safety
/// `set` must be a live point set; `a` and `b` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn apx_pointset_coords(
    set: *const ApxPointSet,
    index: usize,
    a: *mut i64,
    b: *mut i64,
) -> ApxStatus {
    guard(|| {
        if set.is_null() || a.is_null() || b.is_null() {
            return fail(ApxStatus::NullPointer, "set or output is null");
        }
        let r = match &(*set).0 {
            SetImpl::Quad(s) => coords_at(s, index),
            SetImpl::Padic(s) => coords_at(s, index),
        };
        match r {
            Ok((x, y)) => {
                *a = x;
                *b = y;
                ApxStatus::Ok
            }
            Err(st) => st,
        }
    })
}

/// The point set as CSV text; free with [`apx_string_free`].
///
/// # Safety
/// `set` must be a live point set; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn apx_pointset_csv(set: *const ApxPointSet, out: *mut *mut c_char) -> ApxStatus {
    guard(|| {
        if set.is_null() || out.is_null() {
            return fail(ApxStatus::NullPointer, "set or out is null");
        }
        let csv = match &(*set).0 {
            SetImpl::Quad(s) => s.to_csv(),
            SetImpl::Padic(s) => s.to_csv(),
        };
        *out = into_c_string(csv);
        ApxStatus::Ok
    })
}

/// Runs a command-line subcommand (`"generate"`, `"axioms"`, ...) on a
/// TOML config text, writing its reports and manifest into `out_dir`.
///
/// # Safety
/// All pointers must be valid C strings.
#[no_mangle]
pub unsafe extern "C" fn apx_run(
    command: *const c_char,
    config: *const c_char,
    out_dir: *const c_char,
    recheck: bool,
) -> ApxStatus {
    guard(|| {
        let (name, cfg, dir) = match (
            text(command, "command"),
            text(config, "config"),
            text(out_dir, "out_dir"),
        ) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
        let Some(cmd) = Command::from_name(name) else {
            return fail(ApxStatus::InvalidArgument, format!("unknown command {name:?}"));
        };
        let opts = RunOptions {
            command: cmd,
            out: PathBuf::from(dir),
            workers: None,
            recheck,
            cap: approxlat::scheme::DEFAULT_POINT_CAP,
        };
        match run_config(cfg, &opts) {
            Ok(_) => ApxStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}
