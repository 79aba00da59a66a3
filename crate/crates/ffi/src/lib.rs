//! C ABI over `telesigma`.
//!
//! Curves and sigma functions are opaque handles created by `ts_*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`TsStatus`]; on failure [`ts_last_error_message`] describes the
//! error for the calling thread. Strings handed out by the library are owned
//! by the caller and must be released with [`ts_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use telesigma::curve::{build_equations, CanonicalEquations, CurveError, CurveSpec, DefaultLambda};
use telesigma::differentials::holomorphic_basis;
use telesigma::fundform;
use telesigma::riemann::{period_matrices, verify_report, QuadConfig, RiemannError, SigmaFunction, ThetaParams, VerifyConfig};
use telesigma::semigroup::check_telescopic;

/// Result codes. `TS_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed spec, non-telescopic sequence, inadmissible parameter, wrong length.
    InvalidInput = 3,
    /// Outside the supported scope (e.g. periods for `a_1 != 2`).
    Unsupported = 4,
    /// The curve is singular or its cycle geometry degenerates.
    Singular = 5,
    /// A numeric or algebraic step failed.
    Numeric = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

/// A curve: its spec and canonical equations.
pub struct TsCurve {
    eqs: CanonicalEquations,
}

/// A sigma function of a hyperelliptic curve.
pub struct TsSigma {
    sigma: SigmaFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: TsStatus, msg: impl Into<String>) -> TsStatus {
    set_error(msg);
    status
}

fn curve_status(e: &CurveError) -> TsStatus {
    fail(TsStatus::InvalidInput, e.to_string())
}

fn riemann_status(e: &RiemannError) -> TsStatus {
    let status = match e {
        RiemannError::Unsupported(_) => TsStatus::Unsupported,
        RiemannError::Curve(_) => TsStatus::InvalidInput,
        RiemannError::Singular(..) | RiemannError::Geometry(_) => TsStatus::Singular,
        _ => TsStatus::Numeric,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> TsStatus) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == TsStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(TsStatus::Panic, "panic inside telesigma"),
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> TsStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers checked `out` for null.
            unsafe { *out = c.into_raw() };
            TsStatus::Ok
        }
        Err(_) => fail(TsStatus::Numeric, "output contained a NUL byte"),
    }
}

/// Message for the last failing call on this thread; empty after a success.
/// The pointer stays valid until the next `ts_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a curve spec JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ts_curve_from_json(json: *const c_char, out: *mut *mut TsCurve) -> TsStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(TsStatus::NullPointer, "null argument");
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => return fail(TsStatus::InvalidUtf8, "spec is not UTF-8"),
        };
        match CurveSpec::from_json(text) {
            Ok(spec) => {
                let h = Box::new(TsCurve { eqs: build_equations(&spec) });
                // SAFETY: `out` is non-null.
                unsafe { *out = Box::into_raw(h) };
                TsStatus::Ok
            }
            Err(e) => curve_status(&e),
        }
    })
}

/// A curve from a bare sequence; omitted parameters are symbolic when
/// `symbolic` is nonzero and zero otherwise.
///
/// # Safety
/// `a` must point to `len` integers and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ts_curve_from_sequence(
    a: *const u32,
    len: usize,
    symbolic: i32,
    out: *mut *mut TsCurve,
) -> TsStatus {
    guard(|| {
        if a.is_null() || out.is_null() {
            return fail(TsStatus::NullPointer, "null argument");
        }
        // SAFETY: `a` points to `len` values per the contract.
        let a = unsafe { std::slice::from_raw_parts(a, len) };
        let seq = match check_telescopic(a) {
            Ok(s) => s,
            Err(e) => return fail(TsStatus::InvalidInput, e.to_string()),
        };
        let dl = if symbolic != 0 { DefaultLambda::Symbolic } else { DefaultLambda::Zero };
        match CurveSpec::with_values(seq, &Default::default(), dl) {
            Ok(spec) => {
                // SAFETY: `out` is non-null.
                unsafe { *out = Box::into_raw(Box::new(TsCurve { eqs: build_equations(&spec) })) };
                TsStatus::Ok
            }
            Err(e) => curve_status(&e),
        }
    })
}

/// # Safety
/// `curve` must come from a `ts_curve_*` constructor (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_curve_free(curve: *mut TsCurve) {
    if !curve.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(curve) });
    }
}

/// # Safety
/// `curve` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ts_curve_genus(curve: *const TsCurve, out: *mut u32) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(c) = (unsafe { curve.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null curve");
        };
        if out.is_null() {
            return fail(TsStatus::NullPointer, "null output");
        }
        // SAFETY: non-null.
        unsafe { *out = c.eqs.ring().sequence().genus() };
        TsStatus::Ok
    })
}

/// The canonical equations, one per line, in the polynomial text format.
///
/// # Safety
/// `curve` and `out` must be valid; release `*out` with [`ts_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ts_curve_equations(curve: *const TsCurve, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(c) = (unsafe { curve.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null curve");
        };
        if out.is_null() {
            return fail(TsStatus::NullPointer, "null output");
        }
        let text: Vec<String> = c.eqs.equations().iter().map(|f| f.to_text()).collect();
        give_string(text.join("\n"), out)
    })
}

/// q-table, c-table and second-kind differentials as JSON.
///
/// # Safety
/// `curve` and `out` must be valid; release `*out` with [`ts_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ts_curve_fundform_json(curve: *const TsCurve, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(c) = (unsafe { curve.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null curve");
        };
        if out.is_null() {
            return fail(TsStatus::NullPointer, "null output");
        }
        let basis = holomorphic_basis(c.eqs.ring().sequence());
        match fundform::compute(&c.eqs, &basis) {
            Ok(ff) => give_string(ff.to_json(&c.eqs, &basis).to_string(), out),
            Err(e) => fail(TsStatus::Numeric, e.to_string()),
        }
    })
}

/// The verification report as JSON, with default settings.
///
/// # Safety
/// `curve` and `out` must be valid; release `*out` with [`ts_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ts_curve_verify_json(curve: *const TsCurve, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(c) = (unsafe { curve.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null curve");
        };
        if out.is_null() {
            return fail(TsStatus::NullPointer, "null output");
        }
        match verify_report(&c.eqs, &VerifyConfig::default()) {
            Ok(r) => give_string(r.to_json().to_string(), out),
            Err(e) => riemann_status(&e),
        }
    })
}

/// Periods and sigma for a concrete hyperelliptic curve.
///
/// # Safety
/// `curve` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ts_sigma_new(curve: *const TsCurve, out: *mut *mut TsSigma) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(c) = (unsafe { curve.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null curve");
        };
        if out.is_null() {
            return fail(TsStatus::NullPointer, "null output");
        }
        let built = period_matrices(&c.eqs, &QuadConfig::default())
            .and_then(|hp| SigmaFunction::new(&hp.periods, ThetaParams::default()));
        match built {
            Ok(sigma) => {
                // SAFETY: `out` is non-null.
                unsafe { *out = Box::into_raw(Box::new(TsSigma { sigma })) };
                TsStatus::Ok
            }
            Err(e) => riemann_status(&e),
        }
    })
}

/// # Safety
/// `sigma` must come from [`ts_sigma_new`] (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_sigma_free(sigma: *mut TsSigma) {
    if !sigma.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(sigma) });
    }
}

/// # Safety
/// `sigma` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ts_sigma_genus(sigma: *const TsSigma, out: *mut u32) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(s) = (unsafe { sigma.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null sigma");
        };
        if out.is_null() {
            return fail(TsStatus::NullPointer, "null output");
        }
        // SAFETY: non-null.
        unsafe { *out = s.sigma.genus() as u32 };
        TsStatus::Ok
    })
}

/// Evaluate sigma at `u = (u_re[k] + i u_im[k])`, `k < len`, where `len`
/// must equal the genus.
///
/// # Safety
/// `u_re` and `u_im` must point to `len` doubles; `out_re`, `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ts_sigma_eval(
    sigma: *const TsSigma,
    u_re: *const f64,
    u_im: *const f64,
    len: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TsStatus {
    guard(|| {
        // SAFETY: checked for null; valid per the contract.
        let Some(s) = (unsafe { sigma.as_ref() }) else {
            return fail(TsStatus::NullPointer, "null sigma");
        };
        if u_re.is_null() || u_im.is_null() || out_re.is_null() || out_im.is_null() {
            return fail(TsStatus::NullPointer, "null argument");
        }
        if len != s.sigma.genus() {
            return fail(TsStatus::InvalidInput, format!("expected {} coordinates, got {len}", s.sigma.genus()));
        }
        // SAFETY: both point to `len` doubles per the contract.
        let (re, im) = unsafe { (std::slice::from_raw_parts(u_re, len), std::slice::from_raw_parts(u_im, len)) };
        let u: Vec<Complex64> = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        match s.sigma.eval(&u) {
            Ok(v) => {
                // SAFETY: non-null.
                unsafe {
                    *out_re = v.re;
                    *out_im = v.im;
                }
                TsStatus::Ok
            }
            Err(e) => riemann_status(&e),
        }
    })
}

/// # Safety
/// `s` must be a string returned by this library (or null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}
