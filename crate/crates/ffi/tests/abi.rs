use std::ffi::{CStr, CString};
use std::ptr;

use haar_fluct_ffi::*;

fn c(re: f64) -> HfComplex {
    HfComplex { re, im: 0.0 }
}

fn last_error() -> String {
    let p = hf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> *mut HfPolynomial {
    let text = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { hf_polynomial_parse(text.as_ptr(), &mut p) }, HfStatus::Ok);
    p
}

#[test]
fn polynomial_round_trip() {
    let p = parse("y*x*y + x - 2*x^2");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hf_polynomial_to_string(p, &mut s) }, HfStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { hf_string_free(s) };
    let q = parse(&text);
    let mut a = HfComplex::default();
    let mut b = HfComplex::default();
    let x = HfComplex { re: 0.3, im: -1.0 };
    let y = c(2.0);
    unsafe {
        assert_eq!(hf_polynomial_eval(p, x, y, &mut a), HfStatus::Ok);
        assert_eq!(hf_polynomial_eval(q, x, y, &mut b), HfStatus::Ok);
        hf_polynomial_free(p);
        hf_polynomial_free(q);
    }
    assert_eq!(a, b);
    assert!(hf_last_error_message().is_null());
}

#[test]
fn parse_errors_are_reported() {
    let text = CString::new("x + 3").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { hf_polynomial_parse(text.as_ptr(), &mut p) }, HfStatus::Syntax);
    assert!(p.is_null());
    assert!(last_error().contains("constant"));
    assert_eq!(unsafe { hf_polynomial_parse(ptr::null(), &mut p) }, HfStatus::NullPointer);
    let bad = [0x78u8, 0xff, 0];
    assert_eq!(
        unsafe { hf_polynomial_parse(bad.as_ptr().cast(), &mut p) },
        HfStatus::InvalidUtf8
    );
    unsafe {
        hf_polynomial_free(ptr::null_mut());
        hf_model_free(ptr::null_mut());
        hf_string_free(ptr::null_mut());
    }
}

#[test]
fn model_limits_and_samples() {
    let poly = parse("x + y + x*y*x + y*x*y");
    let alphas = [c(5.0), c(2.0), c(1.0)];
    let betas = [c(4.0), c(3.0), c(-1.0)];
    let mut m = ptr::null_mut();
    let st = unsafe { hf_model_new(HfModelKind::Conjugation, poly, alphas.as_ptr(), 3, betas.as_ptr(), 3, 400, &mut m) };
    assert_eq!(st, HfStatus::Ok);
    unsafe { hf_polynomial_free(poly) };
    assert_eq!(unsafe { hf_model_reduced_dim(m) }, 6);

    let mut len = 0;
    let mut small = [HfComplex::default(); 2];
    let st = unsafe { hf_model_limits(m, small.as_mut_ptr(), small.len(), &mut len) };
    assert_eq!(st, HfStatus::BufferTooSmall);
    assert_eq!(len, 6);

    let mut limits = [HfComplex::default(); 6];
    assert_eq!(unsafe { hf_model_limits(m, limits.as_mut_ptr(), 6, &mut len) }, HfStatus::Ok);
    let re: Vec<f64> = limits.iter().map(|z| z.re).collect();
    assert_eq!(re, vec![5.0, 2.0, 1.0, 4.0, 3.0, -1.0]);

    let mut a = [HfComplex::default(); 6];
    let mut b = [HfComplex::default(); 6];
    unsafe {
        assert_eq!(hf_model_sample_eigenvalues(m, 9, 3, a.as_mut_ptr(), 6, &mut len), HfStatus::Ok);
        assert_eq!(hf_model_sample_eigenvalues(m, 9, 3, b.as_mut_ptr(), 6, &mut len), HfStatus::Ok);
    }
    assert_eq!(a, b);
    for (z, l) in a.iter().zip(&limits) {
        assert!((z.re - l.re).hypot(z.im - l.im) < 0.5);
    }
    unsafe { hf_model_free(m) };
}

#[test]
fn invalid_model_is_rejected() {
    let alphas = [c(1.0)];
    let mut m = ptr::null_mut();
    let st = unsafe { hf_model_new(HfModelKind::Conjugation, ptr::null(), alphas.as_ptr(), 1, alphas.as_ptr(), 1, 10, &mut m) };
    assert_eq!(st, HfStatus::InvalidModel);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    let st = unsafe { hf_model_new(HfModelKind::Rotation, ptr::null(), ptr::null(), 1, ptr::null(), 0, 10, &mut m) };
    assert_eq!(st, HfStatus::NullPointer);
}

#[test]
fn mixture_and_density() {
    let poly = parse("x + y + x*y*x + y*x*y");
    let alphas = [c(5.0), c(2.0), c(1.0)];
    let betas = [c(4.0), c(3.0), c(-1.0)];
    let mut out = [HfComplex::default(); 3];
    let mut len = 0;
    let st = unsafe {
        hf_mixture_coefficients(poly, alphas.as_ptr(), 3, betas.as_ptr(), 3, HfSide::A, 1, out.as_mut_ptr(), 3, &mut len)
    };
    assert_eq!(st, HfStatus::Ok);
    let coeffs: Vec<f64> = out[..len].iter().map(|z| z.re).collect();
    let want = [12.0, 6.0, -14.0 / 3.0];
    for (g, w) in coeffs.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{coeffs:?}");
    }
    let st = unsafe {
        hf_mixture_coefficients(poly, alphas.as_ptr(), 3, betas.as_ptr(), 3, HfSide::B, 7, out.as_mut_ptr(), 3, &mut len)
    };
    assert_eq!(st, HfStatus::InvalidArgument);
    unsafe { hf_polynomial_free(poly) };

    let mut f = 0.0;
    let mut cdf = 0.0;
    let rates = [2.0, -1.0];
    unsafe {
        assert_eq!(hf_expmixture_density(rates.as_ptr(), 2, 1.0, &mut f), HfStatus::Ok);
        assert_eq!(hf_expmixture_cdf(rates.as_ptr(), 2, 0.0, &mut cdf), HfStatus::Ok);
    }
    // partial-fraction weights 2/3 and 1/3
    assert!((f - (-0.5f64).exp() / 3.0).abs() < 1e-14);
    assert!((cdf - 1.0 / 3.0).abs() < 1e-14);
    let twins = [1.0, 1.0];
    assert_eq!(unsafe { hf_expmixture_cdf(twins.as_ptr(), 2, 0.5, &mut cdf) }, HfStatus::Numerical);
}
