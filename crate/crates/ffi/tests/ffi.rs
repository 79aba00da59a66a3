use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use telesigma_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ts_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ts_last_error_message()) }.to_str().unwrap().to_owned()
}

#[test]
fn sequence_handle_round_trip() {
    let a = [4u32, 6, 5];
    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { ts_curve_from_sequence(a.as_ptr(), a.len(), 1, &mut curve) }, TsStatus::Ok);
    let mut g = 0;
    assert_eq!(unsafe { ts_curve_genus(curve, &mut g) }, TsStatus::Ok);
    assert_eq!(g, 4);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ts_curve_equations(curve, &mut s) }, TsStatus::Ok);
    let text = take(s);
    assert!(text.starts_with("X2^2 - X1^3 - l2_0,1,1*X2*X3"));
    assert_eq!(text.lines().count(), 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ts_curve_fundform_json(curve, &mut s) }, TsStatus::Ok);
    assert!(take(s).contains("\"pivot_rule\""));
    let mut sigma = ptr::null_mut();
    assert_eq!(unsafe { ts_sigma_new(curve, &mut sigma) }, TsStatus::Unsupported);
    assert!(last_error().contains("a_1 = 2"));
    unsafe { ts_curve_free(curve) };
}

#[test]
fn errors_are_codes_not_panics() {
    let a = [3u32, 4, 5];
    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { ts_curve_from_sequence(a.as_ptr(), a.len(), 1, &mut curve) }, TsStatus::InvalidInput);
    assert!(last_error().contains("telescopic condition fails at index 3"));
    assert!(curve.is_null());
    let bad = CString::new("{\"sequence\": [2,3], \"bogus\": 1}").unwrap();
    assert_eq!(unsafe { ts_curve_from_json(bad.as_ptr(), &mut curve) }, TsStatus::InvalidInput);
    assert_eq!(unsafe { ts_curve_from_json(ptr::null(), &mut curve) }, TsStatus::NullPointer);
    let mut g = 0;
    assert_eq!(unsafe { ts_curve_genus(ptr::null(), &mut g) }, TsStatus::NullPointer);
    unsafe { ts_curve_free(ptr::null_mut()) };
    unsafe { ts_string_free(ptr::null_mut()) };
}

#[test]
fn elliptic_sigma_through_the_abi() {
    let spec = CString::new(r#"{"sequence":[2,3],"lambda":{"2:1,0":"-1"},"default_lambda":"zero"}"#).unwrap();
    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { ts_curve_from_json(spec.as_ptr(), &mut curve) }, TsStatus::Ok);
    assert_eq!(last_error(), "");
    let mut sigma = ptr::null_mut();
    assert_eq!(unsafe { ts_sigma_new(curve, &mut sigma) }, TsStatus::Ok);
    let (re, im) = ([1e-3], [0.0]);
    let (mut vr, mut vi) = (0.0, 0.0);
    assert_eq!(unsafe { ts_sigma_eval(sigma, re.as_ptr(), im.as_ptr(), 1, &mut vr, &mut vi) }, TsStatus::Ok);
    assert!((vr / 1e-3 - 1.0).abs() < 1e-6 && vi.abs() < 1e-12);
    assert_eq!(
        unsafe { ts_sigma_eval(sigma, re.as_ptr(), im.as_ptr(), 2, &mut vr, &mut vi) },
        TsStatus::InvalidInput
    );
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ts_curve_verify_json(curve, &mut s) }, TsStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    unsafe {
        ts_sigma_free(sigma);
        ts_curve_free(curve);
    }
}

/// The generated header must compile as C and as C++.
#[test]
fn header_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/telesigma.h");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(cc).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, header]).output() else {
            eprintln!("{cc} not available; skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
