use std::ffi::{CStr, CString};
use std::ptr;

use gls_ffi::*;

fn psi(spec: &str) -> *mut GlsPsi {
    let s = CString::new(spec).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { gls_psi_parse(s.as_ptr(), &mut h) }, GlsStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = gls_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn power_psi_roundtrip() {
    let h = psi("power:m=2");
    let mut v = 0.0;
    unsafe {
        assert_eq!(gls_psi_eval(h, 4.0, &mut v), GlsStatus::Ok);
        assert!((v - 2.0).abs() < 1e-12);
        assert_eq!(gls_fundamental_direct(h, 1.0, &mut v), GlsStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        gls_psi_free(h);
    }
}

#[test]
fn forward_theta_matches_direct_within_constant() {
    let h = psi("power:m=2");
    let mut fw = ptr::null_mut();
    unsafe {
        assert_eq!(gls_forward_new(h, &mut fw), GlsStatus::Ok);
        let (mut t, mut d, mut n) = (0.0, 0.0, 0.0);
        assert_eq!(gls_forward_theta(fw, 1e-4, &mut t), GlsStatus::Ok);
        assert_eq!(gls_fundamental_direct(h, 1e-4, &mut d), GlsStatus::Ok);
        assert_eq!(gls_forward_orlicz(fw, 0.0, &mut n), GlsStatus::Ok);
        assert_eq!(n, 0.0);
        let r = d / t;
        assert!(r > 0.25 && r < 4.0, "ratio {r}");
        let mut z = f64::NAN;
        assert_eq!(gls_forward_nu_star_zero(fw, &mut z), GlsStatus::Ok);
        assert!(z.is_finite());
        gls_forward_free(fw);
        gls_psi_free(h);
    }
}

#[test]
fn error_codes_and_messages() {
    let h = psi("power:m=1");
    let mut fw = ptr::null_mut();
    unsafe {
        assert_eq!(gls_forward_new(h, &mut fw), GlsStatus::NotIncreasing);
        assert!(fw.is_null());
        assert!(!last_error().is_empty());
        let mut v = 0.0;
        assert_eq!(gls_psi_eval(h, 0.5, &mut v), GlsStatus::Domain);
        assert_eq!(
            gls_psi_eval(ptr::null(), 2.0, &mut v),
            GlsStatus::NullPointer
        );
        assert_eq!(
            gls_psi_eval(h, 2.0, ptr::null_mut()),
            GlsStatus::NullPointer
        );
        gls_psi_free(h);
        gls_psi_free(ptr::null_mut());
    }
    let bad = CString::new("nonsense:x=1").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gls_psi_parse(bad.as_ptr(), &mut out) },
        GlsStatus::InvalidInput
    );
    assert!(last_error().contains("nonsense"));
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn square_root_table_is_not_log_convex() {
    // phi(delta) = delta^(1/2) gives N(z) = z^2, and ln(C + z^2) is never convex.
    let deltas = log_points(1e-8, 1.0, 400);
    let values: Vec<f64> = deltas.iter().map(|d| d.sqrt()).collect();
    let mut phi = ptr::null_mut();
    unsafe {
        assert_eq!(
            gls_phi_from_table(deltas.as_ptr(), values.as_ptr(), deltas.len(), &mut phi),
            GlsStatus::Ok
        );
        let mut n = 0.0;
        assert_eq!(gls_orlicz_from_fundamental(phi, 3.0, &mut n), GlsStatus::Ok);
        assert!((n - 9.0).abs() < 1e-6, "{n}");
        let mut c = 0.0;
        assert_eq!(gls_choose_c(phi, &mut c), GlsStatus::AllNonConvex);
        gls_phi_free(phi);
    }
}

#[test]
fn inverse_recovers_power_psi() {
    let h = psi("power:m=2");
    let mut fw = ptr::null_mut();
    let deltas = log_points(1e-10, 1.0, 2000);
    let mut values = vec![0.0; deltas.len()];
    let mut phi = ptr::null_mut();
    unsafe {
        assert_eq!(gls_forward_new(h, &mut fw), GlsStatus::Ok);
        for (v, &d) in values.iter_mut().zip(&deltas) {
            assert_eq!(gls_forward_theta(fw, d, v), GlsStatus::Ok);
        }
        let mut z = 0.0;
        gls_forward_nu_star_zero(fw, &mut z);
        assert_eq!(
            gls_phi_from_table(deltas.as_ptr(), values.as_ptr(), deltas.len(), &mut phi),
            GlsStatus::Ok
        );
        let p = [2.0, 4.0, 9.0, 16.0];
        let mut out = [0.0; 4];
        let st = gls_psi_from_fundamental(phi, z.exp(), p.as_ptr(), p.len(), out.as_mut_ptr());
        assert_eq!(st, GlsStatus::Ok, "{}", last_error());
        for (&x, &y) in p.iter().zip(&out) {
            assert!((y / x.sqrt() - 1.0).abs() < 0.01, "p={x}: {y}");
        }
        let mut c = 0.0;
        assert_eq!(gls_choose_c(phi, &mut c), GlsStatus::Ok);
        assert!(c > 0.0);
        gls_phi_free(phi);
        gls_forward_free(fw);
        gls_psi_free(h);
    }
}

#[test]
fn rejects_decreasing_table() {
    let deltas = [0.1, 0.5, 1.0];
    let values = [3.0, 2.0, 1.0];
    let mut phi = ptr::null_mut();
    let st = unsafe { gls_phi_from_table(deltas.as_ptr(), values.as_ptr(), 3, &mut phi) };
    assert_eq!(st, GlsStatus::NotMonotone);
    assert!(phi.is_null());
}

#[test]
fn header_declares_every_symbol() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gls_ffi.h")).unwrap();
    for sym in [
        "gls_last_error_message",
        "gls_psi_parse",
        "gls_psi_free",
        "gls_psi_eval",
        "gls_fundamental_direct",
        "gls_forward_new",
        "gls_forward_free",
        "gls_forward_orlicz",
        "gls_forward_theta",
        "gls_forward_nu_star_zero",
        "gls_phi_from_table",
        "gls_phi_free",
        "gls_orlicz_from_fundamental",
        "gls_choose_c",
        "gls_psi_from_fundamental",
        "typedef struct GlsPsi GlsPsi",
        "GLS_STATUS_NULL_POINTER = 17",
    ] {
        assert!(header.contains(sym), "missing {sym}");
    }
}
