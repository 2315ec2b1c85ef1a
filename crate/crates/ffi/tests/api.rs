use std::ffi::{CStr, CString};
use std::ptr;

use specfact_ffi::*;

fn poly(m: usize, lo: i32, re: &[f64], domain: u32) -> *mut SpecfactPoly {
    let mut p = ptr::null_mut();
    let n = re.len() / (m * m);
    let status = unsafe { specfact_poly_new(m, lo, n, domain, re.as_ptr(), ptr::null(), &mut p) };
    assert_eq!(status, SpecfactStatus::Ok);
    p
}

fn coeffs(p: *const SpecfactPoly) -> (usize, i32, Vec<f64>, Vec<f64>) {
    let (mut m, mut lo, mut n) = (0, 0, 0);
    unsafe {
        assert_eq!(specfact_poly_shape(p, &mut m, &mut lo, &mut n, ptr::null_mut()), SpecfactStatus::Ok);
        let (mut re, mut im) = (vec![0.0; n * m * m], vec![0.0; n * m * m]);
        assert_eq!(specfact_poly_coeffs(p, re.as_mut_ptr(), im.as_mut_ptr(), re.len()), SpecfactStatus::Ok);
        (m, lo, re, im)
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(specfact_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_factor_through_the_c_api() {
    // 5 + 2z + 2/z = (2 + z)(2 + 1/z)
    let s = poly(1, -1, &[2.0, 5.0, 2.0], SPECFACT_DOMAIN_DISC);
    let mut f = ptr::null_mut();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(specfact_factorize(s, true, 0, &mut f), SpecfactStatus::Ok);
        assert_eq!(specfact_factor_poly(f, &mut p), SpecfactStatus::Ok);
        let (m, lo, re, im) = coeffs(p);
        assert_eq!((m, lo), (1, 0));
        assert!((re[0] - 2.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12, "{re:?}");
        assert!(im.iter().all(|x| x.abs() < 1e-12));
        let mut recon = f64::NAN;
        let mut degenerate = true;
        assert_eq!(
            specfact_factor_certificate(f, &mut recon, ptr::null_mut(), &mut degenerate),
            SpecfactStatus::Ok
        );
        assert!(recon < 1e-12 && !degenerate);
        assert_eq!(specfact_verify(s, p, 0.0, 0, ptr::null_mut()), SpecfactStatus::Ok);
        specfact_poly_free(p);
        specfact_factor_free(f);
        specfact_poly_free(s);
    }
}

#[test]
fn negative_spectrum_is_an_input_error() {
    let s = poly(1, -1, &[2.0, 1.0, 2.0], SPECFACT_DOMAIN_DISC);
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(specfact_factorize(s, true, 0, &mut f), SpecfactStatus::InputError);
        assert!(f.is_null());
        assert!(last_error().contains("negative"), "{}", last_error());
        specfact_poly_free(s);
    }
}

#[test]
fn wrong_factor_fails_verification() {
    let s = poly(1, -1, &[2.0, 5.0, 2.0], SPECFACT_DOMAIN_DISC);
    let p = poly(1, 0, &[2.0, 1.001], SPECFACT_DOMAIN_DISC);
    let mut recon = 0.0;
    unsafe {
        assert_eq!(specfact_verify(s, p, 0.0, 0, &mut recon), SpecfactStatus::VerificationFailed);
        assert!(recon > 1e-4);
        specfact_poly_free(p);
        specfact_poly_free(s);
    }
}

#[test]
fn generated_instance_is_recovered() {
    let (mut s, mut r, mut f, mut p) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(specfact_generate(2, 2, 1, SPECFACT_DOMAIN_LINE, false, &mut s, &mut r), SpecfactStatus::Ok);
        assert_eq!(specfact_factorize(s, true, 0, &mut f), SpecfactStatus::Ok);
        assert_eq!(specfact_factor_poly(f, &mut p), SpecfactStatus::Ok);
        let (got, want) = (coeffs(p), coeffs(r));
        assert_eq!((got.0, got.1, got.2.len()), (want.0, want.1, want.2.len()));
        let err = got.2.iter().zip(&want.2).chain(got.3.iter().zip(&want.3)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        for h in [s, r, p] {
            specfact_poly_free(h);
        }
        specfact_factor_free(f);
    }
}

#[test]
fn json_round_trip() {
    let text = CString::new(
        r#"{"schemaVersion": 1, "domain": "line", "m": 1, "lo": 0, "coeffs": {"0": [[[1, 0]]], "2": [[[1, 0]]]}}"#,
    )
    .unwrap();
    let mut p = ptr::null_mut();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(specfact_poly_from_json(text.as_ptr(), &mut p), SpecfactStatus::Ok);
        let mut domain = 9;
        assert_eq!(specfact_poly_shape(p, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), &mut domain), SpecfactStatus::Ok);
        assert_eq!(domain, SPECFACT_DOMAIN_LINE);
        assert_eq!(specfact_poly_to_json(p, &mut json), SpecfactStatus::Ok);
        let out = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(out.contains("\"1\": [\n      [\n        [0.0000000000000000e0, 0.0000000000000000e0]"), "{out}");
        specfact_string_free(json);
        specfact_poly_free(p);

        let bad = CString::new("{").unwrap();
        assert_eq!(specfact_poly_from_json(bad.as_ptr(), &mut p), SpecfactStatus::InvalidArgument);
        assert!(last_error().contains("JSON"));
    }
}

#[test]
fn small_buffers_and_nulls_are_rejected() {
    let s = poly(2, 0, &[1.0, 0.0, 0.0, 1.0], SPECFACT_DOMAIN_DISC);
    let mut re = [0.0; 3];
    let mut im = [0.0; 3];
    unsafe {
        assert_eq!(specfact_poly_coeffs(s, re.as_mut_ptr(), im.as_mut_ptr(), 3), SpecfactStatus::InvalidArgument);
        assert_eq!(specfact_factorize(ptr::null(), true, 0, &mut ptr::null_mut()), SpecfactStatus::NullPointer);
        specfact_poly_free(s);
        specfact_poly_free(ptr::null_mut());
        specfact_factor_free(ptr::null_mut());
        specfact_string_free(ptr::null_mut());
    }
}
