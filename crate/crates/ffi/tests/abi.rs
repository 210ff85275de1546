use std::ffi::{CStr, CString};
use std::ptr;

use twistee_ffi::*;

const CONFIG: &str = r#"
[[experiment]]
name = "tiny"
[experiment.lattice]
width = 8
height = 8
[[experiment.regions]]
name = "square"
rects = [[2, 2, 3, 3]]
expected_offset = 1
"#;

fn last_error() -> String {
    let p = twistee_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn state(config: &str) -> *mut TwisteeState {
    let text = CString::new(config).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { twistee_state_from_toml(text.as_ptr(), 0, &mut out) }, TwisteeStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn rectangle_entropy_through_handle() {
    let s = state(CONFIG);
    unsafe {
        assert_eq!(twistee_state_num_qubits(s), 64);
        assert_eq!(twistee_state_logical_qubits(s), 2);
        let mut bits = 0;
        assert_eq!(twistee_rect_entropy(s, 2, 2, 3, 3, &mut bits), TwisteeStatus::Ok);
        assert_eq!(bits, 5);
        assert!(twistee_last_error_message().is_null());
        twistee_state_free(s);
    }
}

#[test]
fn explicit_region_matches_rectangle() {
    let s = state(CONFIG);
    // row-major with width 8: qubits (2..5, 2..5)
    let qubits: Vec<usize> = (2..5).flat_map(|y| (2..5).map(move |x| y * 8 + x)).collect();
    let (mut a, mut b) = (0, 0);
    unsafe {
        assert_eq!(twistee_region_entropy(s, qubits.as_ptr(), qubits.len(), &mut a), TwisteeStatus::Ok);
        assert_eq!(twistee_rect_entropy(s, 2, 2, 3, 3, &mut b), TwisteeStatus::Ok);
        assert_eq!(twistee_region_entropy(s, ptr::null(), 0, &mut a), TwisteeStatus::Ok);
        assert_eq!(a, 0);
        let bad = [64usize];
        assert_eq!(twistee_region_entropy(s, bad.as_ptr(), 1, &mut a), TwisteeStatus::OutOfRange);
        twistee_state_free(s);
    }
    assert_eq!(b, 5);
}

#[test]
fn config_errors_carry_a_message() {
    let text = CString::new("[[experiment]]\nname = 3\n").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { twistee_state_from_toml(text.as_ptr(), 0, &mut out) };
    assert_eq!(status, TwisteeStatus::Config);
    assert!(out.is_null());
    assert!(last_error().contains("name"), "{}", last_error());

    let text = CString::new(CONFIG).unwrap();
    let status = unsafe { twistee_state_from_toml(text.as_ptr(), 5, &mut out) };
    assert_eq!(status, TwisteeStatus::OutOfRange);
}

#[test]
fn invalid_lattice_maps_to_lattice_status() {
    let text = CString::new("[[experiment]]\nname = \"x\"\n[experiment.lattice]\nwidth = 3\nheight = 8\n").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { twistee_state_from_toml(text.as_ptr(), 0, &mut out) }, TwisteeStatus::Lattice);
}

#[test]
fn null_arguments_are_rejected() {
    let mut bits = 0;
    unsafe {
        assert_eq!(twistee_rect_entropy(ptr::null(), 0, 0, 1, 1, &mut bits), TwisteeStatus::NullPointer);
        assert_eq!(twistee_state_num_qubits(ptr::null()), 0);
        let mut out = ptr::null_mut();
        assert_eq!(twistee_state_from_toml(ptr::null(), 0, &mut out), TwisteeStatus::NullPointer);
        twistee_state_free(ptr::null_mut());
        twistee_string_free(ptr::null_mut());
    }
}

#[test]
fn json_report_round_trip() {
    let text = CString::new(CONFIG).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { twistee_run_config_json(text.as_ptr(), 16, true, &mut out) }, TwisteeStatus::Ok);
    let json = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { twistee_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[0]["experiment"], "tiny");
    assert_eq!(v[0]["regions"][0]["entropy_bits"], 5);
}

#[test]
fn fusion_prediction_and_dimension() {
    let half = TwisteeFusionOutcome { probability: 0.5, d_inner: 1.0, d_outer: 1.0 };
    let mut s = 0.0;
    assert_eq!(unsafe { twistee_predict_s_ann([half, half].as_ptr(), 2, 2.0, &mut s) }, TwisteeStatus::Ok);
    assert!((s + 1.0).abs() < 1e-12);
    assert!((twistee_extract_dimension(-1.0, 2.0) - 2f64.sqrt()).abs() < 1e-12);
    let bad = TwisteeFusionOutcome { probability: 0.7, d_inner: 1.0, d_outer: 1.0 };
    assert_eq!(unsafe { twistee_predict_s_ann(&bad, 1, 2.0, &mut s) }, TwisteeStatus::FusionTable);
    assert!(last_error().contains("sum"));
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(twistee_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
