use std::ffi::CStr;
use std::ptr;

use lowres_ffi::*;

unsafe fn params(g: f64) -> *mut LowresParams {
    let mut h = ptr::null_mut();
    let s = lowres_params_new(1.0, 1.0, 0.05, 0.05, g, 1.0, 1.0, 2.0, 0.5, 1.0, -1.5, &mut h);
    assert_eq!(s, LowresStatus::Ok);
    h
}

#[test]
fn fock_observables_match_closed_form() {
    unsafe {
        let p = params(0.02);
        let mut st = ptr::null_mut();
        assert_eq!(lowres_fock_evolve(p, 3.0, 1e-12, &mut st), LowresStatus::Ok);
        let mut obs = [0.0; 4];
        assert_eq!(lowres_fock_observables(st, p, obs.as_mut_ptr()), LowresStatus::Ok);
        for mode in [1u32, 2] {
            let mut qp = [0.0; 2];
            assert_eq!(lowres_closed_form_expectation(p, 3.0, mode, 1, qp.as_mut_ptr()), LowresStatus::Ok);
            let k = 2 * (mode as usize - 1);
            assert!((qp[0] - obs[k]).abs() < 1e-9);
            assert!((qp[1] - obs[k + 1]).abs() < 1e-9);
        }
        let mut norm = 0.0;
        assert_eq!(lowres_fock_norm(st, &mut norm), LowresStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-10);
        let (mut n1, mut n2) = (0usize, 0usize);
        assert_eq!(lowres_fock_dims(st, &mut n1, &mut n2), LowresStatus::Ok);
        assert!(n1 > 0 && n2 > 0);
        lowres_fock_free(st);
        lowres_params_free(p);
    }
}

#[test]
fn series_entropy_matches_reduced_state() {
    unsafe {
        let p = params(0.03);
        let mut series = 0.0;
        assert_eq!(lowres_linear_entropy(p, 4.0, 1e-12, &mut series), LowresStatus::Ok);
        let mut st = ptr::null_mut();
        assert_eq!(lowres_fock_evolve(p, 4.0, 1e-12, &mut st), LowresStatus::Ok);
        let (mut e1, mut e2) = (0.0, 0.0);
        assert_eq!(lowres_fock_linear_entropy(st, 1, &mut e1), LowresStatus::Ok);
        assert_eq!(lowres_fock_linear_entropy(st, 2, &mut e2), LowresStatus::Ok);
        assert!(series > 0.0);
        assert!((series - e1).abs() < 1e-8);
        assert!((e1 - e2).abs() < 1e-8);
        assert_eq!(lowres_fock_linear_entropy(st, 3, &mut e1), LowresStatus::Domain);
        lowres_fock_free(st);
        lowres_params_free(p);
    }
}

#[test]
fn invalid_params_report_domain_with_message() {
    unsafe {
        let mut h = ptr::null_mut();
        let s = lowres_params_new(1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, &mut h);
        assert_eq!(s, LowresStatus::Domain);
        assert!(h.is_null());
        let msg = CStr::from_ptr(lowres_last_error_message()).to_string_lossy();
        assert!(msg.contains("hbar"), "{msg}");
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut out = 0.0;
        assert_eq!(lowres_linear_entropy(ptr::null(), 1.0, 1e-12, &mut out), LowresStatus::NullPointer);
        assert_eq!(lowres_fock_norm(ptr::null(), &mut out), LowresStatus::NullPointer);
        lowres_params_free(ptr::null_mut());
        lowres_fock_free(ptr::null_mut());
    }
}

#[test]
fn cat_coefficients_respect_capacity() {
    unsafe {
        let mut len = 0usize;
        let (mut re, mut im) = ([0.0; 1], [0.0; 1]);
        let s = lowres_cat_coefficients(1, 3, re.as_mut_ptr(), im.as_mut_ptr(), 1, &mut len);
        assert_eq!(s, LowresStatus::BufferTooSmall);
        assert!(len > 1);
        let (mut re, mut im) = (vec![0.0; len], vec![0.0; len]);
        assert_eq!(lowres_cat_coefficients(1, 3, re.as_mut_ptr(), im.as_mut_ptr(), len, &mut len), LowresStatus::Ok);
        let total: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(
            lowres_cat_coefficients(2, 4, re.as_mut_ptr(), im.as_mut_ptr(), len, &mut len),
            LowresStatus::Domain
        );
    }
}

#[test]
fn commutator_indicator_over_arrays() {
    let dx = 0.05;
    let xs: Vec<f64> = (0..400).map(|k| -10.0 + k as f64 * dx).collect();
    let norm = (2.0 * std::f64::consts::PI).powf(-0.25);
    let re: Vec<f64> = xs.iter().map(|x| norm * (-x * x / 4.0).exp()).collect();
    let im = vec![0.0; re.len()];
    let mut out = 0.0;
    unsafe {
        assert_eq!(lowres_commutator_indicator(re.as_ptr(), im.as_ptr(), re.len(), dx, &mut out), LowresStatus::Ok);
        assert!((out - (-dx * dx / 8.0f64).exp()).abs() < 1e-6, "{out}");
        assert_eq!(lowres_commutator_indicator(re.as_ptr(), im.as_ptr(), 4, -1.0, &mut out), LowresStatus::Domain);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/lowres.h")).unwrap();
    for name in [
        "lowres_params_new",
        "lowres_params_free",
        "lowres_fock_evolve",
        "lowres_fock_free",
        "lowres_fock_observables",
        "lowres_linear_entropy",
        "lowres_cat_coefficients",
        "lowres_commutator_indicator",
        "lowres_last_error_message",
        "LOWRES_STATUS_OK",
        "typedef struct LowresParams LowresParams",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(lowres_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
