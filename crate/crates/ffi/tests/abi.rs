use std::ffi::{c_char, c_int, CStr, CString};
use std::process::Command;
use std::ptr;

use wreathcoh_ffi::*;

fn owned(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { wc_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(wc_last_error()) }.to_str().unwrap().to_owned()
}

fn orders(h: *const WcGraded, m: i64) -> Vec<u64> {
    let mut count = 0usize;
    let mut buf = [0u64; 8];
    assert_eq!(unsafe { wc_graded_orders_at(h, m, buf.as_mut_ptr(), buf.len(), &mut count) }, WcStatus::Ok);
    buf[..count].to_vec()
}

#[test]
fn predict_through_handles() {
    let json = CString::new(r#"{"families":[{"first_degree":0,"period":1,"count":1,"order":0,"multiplicity":1}]}"#).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { wc_graded_from_json(json.as_ptr(), &mut h) }, WcStatus::Ok);
    let mut pred = ptr::null_mut();
    assert_eq!(unsafe { wc_predict(h, 3, 10, &mut pred) }, WcStatus::Ok);
    assert_eq!(orders(pred, 0), vec![0]);
    assert_eq!(orders(pred, 4), vec![3]);
    assert!(orders(pred, 3).is_empty());
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { wc_graded_to_json(pred, &mut s) }, WcStatus::Ok);
    assert!(owned(s).contains("\"inf\""));
    unsafe {
        wc_graded_free(pred);
        wc_graded_free(h);
    }
}

#[test]
fn brute_force_and_verify() {
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { wc_bruteforce_cyclic(3, 9, 2, 2, 12, &mut b) }, WcStatus::Ok);
    assert_eq!(orders(b, 6), vec![27]);
    unsafe { wc_graded_free(b) };
    let mut ok: c_int = 0;
    assert_eq!(unsafe { wc_verify(2, 4, 1, -1, 8, &mut ok) }, WcStatus::Ok);
    assert_eq!(ok, 1);
}

#[test]
fn kernel_and_exponents() {
    let json = CString::new(r#"{"families":[{"first_degree":2,"period":1,"count":1,"order":5,"multiplicity":1}]}"#).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { wc_graded_from_json(json.as_ptr(), &mut h) }, WcStatus::Ok);
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { wc_detection_kernel(h, 5, 20, 0, &mut k) }, WcStatus::Ok);
    assert_eq!(orders(k, 10), vec![5]);
    assert_eq!(orders(k, 8), vec![5]);
    assert!(orders(k, 6).is_empty());
    unsafe {
        wc_graded_free(k);
        wc_graded_free(h);
    }
    let t = CString::new("C:9 wr C_3").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { wc_exponents(t.as_ptr(), &mut s) }, WcStatus::Ok);
    assert_eq!(owned(s), r#"{"e":27,"ee":27}"#);
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("{not json").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { wc_graded_from_json(bad.as_ptr(), &mut h) }, WcStatus::Malformed);
    assert!(!last_error().is_empty());
    assert!(h.is_null());
    assert_eq!(unsafe { wc_graded_from_json(ptr::null(), &mut h) }, WcStatus::NullPointer);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { wc_predict(ptr::null(), 3, 5, &mut out) }, WcStatus::NullPointer);
    assert_eq!(unsafe { wc_bruteforce_cyclic(4, 2, 1, 0, 3, &mut out) }, WcStatus::Precondition);
    let t = CString::new("C:6").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { wc_exponents(t.as_ptr(), &mut s) }, WcStatus::Malformed);
    assert!(last_error().contains("C:6"));
    unsafe {
        wc_string_free(ptr::null_mut());
        wc_graded_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/wreathcoh.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["wc_predict", "wc_bruteforce_cyclic", "wc_last_error", "wc_graded_free", "WC_STATUS_NULL_POINTER"] {
        assert!(text.contains(f), "{} missing from header", f);
    }
    let Ok(out) = Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header]).output() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
