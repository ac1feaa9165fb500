//! C interface. Handles are opaque pointers created by `*_new`/`*_parse`
//! functions and released by the matching `*_free`. Every fallible call
//! returns a [`GlsStatus`]; the message of the last failure on the calling
//! thread is available from [`gls_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use gls::gls_core::{fundamental_direct, ForwardPipeline, GeneratingFunction};
use gls::inverse_problem::{
    choose_c, orlicz_from_fundamental, psi_from_fundamental, FundamentalFunction,
};
use gls::scalar_fn::{Interpolation, ScalarFunction};
use gls::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlsStatus {
    Ok = 0,
    Domain = 1,
    NotMonotone = 2,
    OutOfRange = 3,
    TruncationUncertain = 4,
    TailUncertain = 5,
    NotIncreasing = 6,
    NonYoung = 7,
    NonConvex = 8,
    AllNonConvex = 9,
    NotVanishingAtZero = 10,
    BracketFailure = 11,
    ExtensionNotConvex = 12,
    NoValidC5 = 13,
    InvalidInput = 14,
    Io = 15,
    Csv = 16,
    NullPointer = 17,
    Panic = 18,
}

impl From<&Error> for GlsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } => GlsStatus::Domain,
            Error::NotMonotone { .. } => GlsStatus::NotMonotone,
            Error::OutOfRange { .. } => GlsStatus::OutOfRange,
            Error::TruncationUncertain { .. } => GlsStatus::TruncationUncertain,
            Error::TailUncertain { .. } => GlsStatus::TailUncertain,
            Error::NotIncreasing { .. } => GlsStatus::NotIncreasing,
            Error::NonYoung { .. } => GlsStatus::NonYoung,
            Error::NonConvex { .. } => GlsStatus::NonConvex,
            Error::AllNonConvex { .. } => GlsStatus::AllNonConvex,
            Error::NotVanishingAtZero { .. } => GlsStatus::NotVanishingAtZero,
            Error::BracketFailure { .. } => GlsStatus::BracketFailure,
            Error::ExtensionNotConvex { .. } => GlsStatus::ExtensionNotConvex,
            Error::NoValidC5 { .. } => GlsStatus::NoValidC5,
            Error::InvalidInput(_) => GlsStatus::InvalidInput,
            Error::Io { .. } => GlsStatus::Io,
            Error::Csv { .. } => GlsStatus::Csv,
        }
    }
}

/// A generating function.
pub struct GlsPsi(GeneratingFunction);

/// The forward pipeline built from a generating function.
pub struct GlsForward(ForwardPipeline);

/// A fundamental function given by a table.
pub struct GlsPhi(FundamentalFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (GlsStatus, String)>) -> GlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GlsStatus::Panic
        }
    }
}

fn lift(e: Error) -> (GlsStatus, String) {
    (GlsStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (GlsStatus, String) {
    (GlsStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (GlsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out(out: *mut f64, v: f64) -> Result<(), (GlsStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = v;
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a generating function spec such as `power:m=2`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_parse(spec: *const c_char, out: *mut *mut GlsPsi) -> GlsStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| (GlsStatus::InvalidInput, "spec is not UTF-8".to_string()))?;
        let psi = GeneratingFunction::parse(s).map_err(lift)?;
        *out = Box::into_raw(Box::new(GlsPsi(psi)));
        Ok(())
    })
}

/// # Safety
/// `psi` must come from [`gls_psi_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_free(psi: *mut GlsPsi) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

/// `psi(p)`.
///
/// # Safety
/// `psi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_eval(psi: *const GlsPsi, p: f64, out: *mut f64) -> GlsStatus {
    guard(|| {
        let psi = as_ref(psi, "psi")?;
        write_out(out, psi.0.evaluate(p).map_err(lift)?)
    })
}

/// `sup_p delta^(1/p) / psi(p)`.
///
/// # Safety
/// `psi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_fundamental_direct(
    psi: *const GlsPsi,
    delta: f64,
    out: *mut f64,
) -> GlsStatus {
    guard(|| {
        let psi = as_ref(psi, "psi")?;
        write_out(out, fundamental_direct(&psi.0, delta).map_err(lift)?)
    })
}

/// Builds `nu`, `N` and `theta` for `psi`.
///
/// # Safety
/// `psi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_forward_new(
    psi: *const GlsPsi,
    out: *mut *mut GlsForward,
) -> GlsStatus {
    guard(|| {
        let psi = as_ref(psi, "psi")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let fw = ForwardPipeline::new(&psi.0).map_err(lift)?;
        *out = Box::into_raw(Box::new(GlsForward(fw)));
        Ok(())
    })
}

/// # Safety
/// `fw` must come from [`gls_forward_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gls_forward_free(fw: *mut GlsForward) {
    if !fw.is_null() {
        drop(Box::from_raw(fw));
    }
}

/// `N(u)`.
///
/// # Safety
/// `fw` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_forward_orlicz(
    fw: *const GlsForward,
    u: f64,
    out: *mut f64,
) -> GlsStatus {
    guard(|| {
        let fw = as_ref(fw, "fw")?;
        write_out(out, fw.0.orlicz().evaluate(u).map_err(lift)?)
    })
}

/// `theta(delta) = 1 / N^(-1)(1 / delta)`.
///
/// # Safety
/// `fw` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_forward_theta(
    fw: *const GlsForward,
    delta: f64,
    out: *mut f64,
) -> GlsStatus {
    guard(|| {
        let fw = as_ref(fw, "fw")?;
        write_out(out, fw.0.theta(delta).map_err(lift)?)
    })
}

/// `nu*(0)`; `exp` of it is the constant of the exact inverse.
///
/// # Safety
/// `fw` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_forward_nu_star_zero(
    fw: *const GlsForward,
    out: *mut f64,
) -> GlsStatus {
    guard(|| {
        let fw = as_ref(fw, "fw")?;
        write_out(out, fw.0.nu_star_zero())
    })
}

/// Fundamental function from `n` knots `(deltas[i], values[i])`,
/// interpolated log-log.
///
/// # Safety
/// `deltas` and `values` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gls_phi_from_table(
    deltas: *const f64,
    values: *const f64,
    n: usize,
    out: *mut *mut GlsPhi,
) -> GlsStatus {
    guard(|| {
        if deltas.is_null() || values.is_null() {
            return Err(null("table"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let xs = slice::from_raw_parts(deltas, n).to_vec();
        let ys = slice::from_raw_parts(values, n).to_vec();
        let f = ScalarFunction::tabulated(xs, ys, Interpolation::LogLog).map_err(lift)?;
        let phi = FundamentalFunction::new(f).map_err(lift)?;
        *out = Box::into_raw(Box::new(GlsPhi(phi)));
        Ok(())
    })
}

/// # Safety
/// `phi` must come from [`gls_phi_from_table`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gls_phi_free(phi: *mut GlsPhi) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// `N(z) = 1 / phi^(-1)(1 / z)`.
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_orlicz_from_fundamental(
    phi: *const GlsPhi,
    z: f64,
    out: *mut f64,
) -> GlsStatus {
    guard(|| {
        let phi = as_ref(phi, "phi")?;
        write_out(out, orlicz_from_fundamental(&phi.0, z).map_err(lift)?)
    })
}

/// The constant `C` that makes `ln(C + N)` most convex.
///
/// # Safety
/// `phi` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gls_choose_c(phi: *const GlsPhi, out: *mut f64) -> GlsStatus {
    guard(|| {
        let phi = as_ref(phi, "phi")?;
        write_out(out, choose_c(&phi.0).map_err(lift)?)
    })
}

/// Recovered `psi` on `n` increasing points `p_grid`, written to `out`.
///
/// # Safety
/// `p_grid` and `out` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gls_psi_from_fundamental(
    phi: *const GlsPhi,
    c: f64,
    p_grid: *const f64,
    n: usize,
    out: *mut f64,
) -> GlsStatus {
    guard(|| {
        let phi = as_ref(phi, "phi")?;
        if p_grid.is_null() || out.is_null() {
            return Err(null("grid"));
        }
        let p = slice::from_raw_parts(p_grid, n);
        let r = psi_from_fundamental(&phi.0, c, p).map_err(lift)?;
        let dst = slice::from_raw_parts_mut(out, n);
        for (d, &x) in dst.iter_mut().zip(p) {
            *d = r.psi.psi().evaluate(x).map_err(lift)?;
        }
        Ok(())
    })
}
