//! Exercises the C entry points from Rust, including handle lifecycle and the
//! JSON report path.

use std::ffi::{CStr, CString};
use std::ptr;

use holoconvex_ffi::*;

fn domain(p: &[f64]) -> *mut HxDomain {
    let mut out = ptr::null_mut();
    let status = unsafe { hx_domain_new(p.as_ptr(), p.len(), &mut out) };
    assert_eq!(status, HxStatus::Ok);
    assert!(!out.is_null());
    out
}

fn mapping(json: &str, n: usize) -> *mut HxMapping {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { hx_mapping_from_json(text.as_ptr(), n, &mut out) };
    assert_eq!(status, HxStatus::Ok);
    out
}

fn take_json(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { hx_string_free(ptr) };
    text
}

fn strip_timing(text: &str) -> String {
    text.lines()
        .filter(|line| !line.contains("timing_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn minkowski_through_the_c_interface() {
    let dom = domain(&[2.0, 2.0]);
    let z = [0.6, 0.0, 0.0, 0.8]; // (0.6, 0.8i)
    let (mut rho, mut residual) = (0.0, 0.0);
    let status = unsafe { hx_minkowski(dom, z.as_ptr(), 2, &mut rho, &mut residual) };
    assert_eq!(status, HxStatus::Ok);
    assert!((rho - 1.0).abs() < 1e-10);
    assert!(residual.abs() < 1e-10);
    unsafe { hx_domain_free(dom) };
}

#[test]
fn gradient_and_j_through_the_c_interface() {
    let dom = domain(&[2.0, 2.0]);
    let map = mapping(r#"{"family": "identity"}"#, 2);

    let z = [0.5, 0.0, 0.0, 0.0];
    let mut grad = [0.0; 4];
    let status = unsafe { hx_rho_gradient(dom, z.as_ptr(), 2, grad.as_mut_ptr()) };
    assert_eq!(status, HxStatus::Ok);
    assert!(
        (grad[0] - 0.5).abs() < 1e-10,
        "d rho / d conj(z_1) = z_1 / (2 rho)"
    );

    let b = [0.0, 0.0, 1.0, 0.0];
    let (mut j, mut residual) = (0.0, 0.0);
    let status =
        unsafe { hx_evaluate_j(dom, map, z.as_ptr(), b.as_ptr(), 2, &mut j, &mut residual) };
    assert_eq!(status, HxStatus::Ok);
    assert!((j - 8.0).abs() <= 1e-9, "hand value J = 8, got {j}");
    assert!(residual.abs() <= 1e-12);

    unsafe { hx_mapping_free(map) };
    unsafe { hx_domain_free(dom) };
}

#[test]
fn error_codes_surface_through_statuses() {
    // p <= 1 is rejected at construction
    let mut out = ptr::null_mut();
    let p = [0.5, 2.0];
    let status = unsafe { hx_domain_new(p.as_ptr(), 2, &mut out) };
    assert_eq!(status, HxStatus::InvalidConfig);

    // zero point is rejected by the gradient
    let dom = domain(&[2.0, 2.0]);
    let z = [0.0; 4];
    let mut grad = [0.0; 4];
    let status = unsafe { hx_rho_gradient(dom, z.as_ptr(), 2, grad.as_mut_ptr()) };
    assert_eq!(status, HxStatus::ZeroPoint);

    // null pointers are reported, not dereferenced
    let status = unsafe { hx_minkowski(dom, ptr::null(), 2, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, HxStatus::NullPointer);

    // message table stays addressable
    let msg = unsafe { CStr::from_ptr(hx_status_message(HxStatus::ZeroPoint)) };
    assert!(msg.to_str().unwrap().contains("z = 0"));

    unsafe { hx_domain_free(dom) };
}

#[test]
fn scan_report_json_is_deterministic_across_threads() {
    let dom = domain(&[2.0, 2.0]);
    let map = mapping(r#"{"family": "identity"}"#, 2);
    let mut raw = Vec::new();
    for threads in [1usize, 4] {
        let mut out = ptr::null_mut();
        let status = unsafe { hx_scan_json(dom, map, 2000, 42, 0.3, 1e-8, threads, &mut out) };
        assert_eq!(status, HxStatus::Ok);
        raw.push(take_json(out));
    }
    assert_eq!(strip_timing(&raw[0]), strip_timing(&raw[1]));
    let report: serde_json::Value = serde_json::from_str(&raw[0]).unwrap();
    assert_eq!(report["command"], "scan");
    assert_eq!(report["verdict"], "no violation found");
    unsafe { hx_mapping_free(map) };
    unsafe { hx_domain_free(dom) };
}

#[test]
fn check_and_validate_json_reports() {
    let dom = domain(&[2.0, 3.0, 3.0]);
    let map = mapping(
        r#"{"family": "example1",
            "a": [[0.03, 0.0], [0.03, 0.0], [0.03, 0.0]],
            "lambda": [0.5, 0.0], "k": 2}"#,
        3,
    );

    let mut out = ptr::null_mut();
    let status = unsafe { hx_check_json(dom, map, 1, 0, 500, 42, 2, &mut out) };
    assert_eq!(status, HxStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_json(out)).unwrap();
    assert_eq!(report["verdict"], "pass");

    let mut out = ptr::null_mut();
    let status = unsafe { hx_validate_example_json(dom, map, 1, &mut out) };
    assert_eq!(status, HxStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_json(out)).unwrap();
    assert_eq!(report["verdict"], "pass");

    // wrong checker for the family shape
    let mut out = ptr::null_mut();
    let status = unsafe { hx_validate_example_json(dom, map, 3, &mut out) };
    assert_eq!(status, HxStatus::ShapeMismatch);

    unsafe { hx_mapping_free(map) };
    unsafe { hx_domain_free(dom) };
}

#[test]
fn falsify_json_finds_the_negative_control() {
    let dom = domain(&[2.0, 2.0]);
    let map = mapping(
        r#"{"family": "custom_triangular",
            "components": [[{"coeff": [3.0, 0.0], "exponents": [2, 0]}], []]}"#,
        2,
    );
    let mut out = ptr::null_mut();
    let status = unsafe { hx_falsify_json(dom, map, 8, 300, 42, 0.05, 0.95, 1e-8, 2, &mut out) };
    assert_eq!(status, HxStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_json(out)).unwrap();
    assert_eq!(report["verdict"], "violation");
    assert!(report["witness"]["j_value"].as_f64().unwrap() < 0.0);
    unsafe { hx_mapping_free(map) };
    unsafe { hx_domain_free(dom) };
}

#[test]
fn generated_header_exists_and_declares_the_interface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/holoconvex.h");
    let text = std::fs::read_to_string(&header).expect("cbindgen header generated");
    for symbol in [
        "hx_domain_new",
        "hx_mapping_from_json",
        "hx_minkowski",
        "hx_evaluate_j",
        "hx_scan_json",
        "hx_check_json",
        "hx_falsify_json",
        "hx_certify_json",
        "hx_string_free",
        "HxStatus",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
