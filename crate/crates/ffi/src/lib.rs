//! C ABI for `haar-fluct`.
//!
//! Every entry point returns an [`HfStatus`]; on failure a message is available from
//! [`hf_last_error_message`] on the same thread. Handles are opaque and must be released
//! with their `_free` function. Array outputs take a capacity and write the required
//! length to `len` even when the buffer is too small.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use haar_fluct::laws::{self, Side};
use haar_fluct::model::{self, ModelKind, ModelSpec};
use haar_fluct::montecarlo;
use haar_fluct::ncpoly::NCPolynomial;
use haar_fluct::perturb;
use haar_fluct::randmat::RngStream;
use haar_fluct::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for HfComplex {
    fn from(z: Complex64) -> Self {
        HfComplex { re: z.re, im: z.im }
    }
}

impl From<HfComplex> for Complex64 {
    fn from(z: HfComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    InvalidArgument = 4,
    InvalidModel = 5,
    Numerical = 6,
    Multiplicity = 7,
    Unsupported = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfModelKind {
    GeneralTwoVar = 0,
    Conjugation = 1,
    SumConjugation = 2,
    Rotation = 3,
}

impl From<HfModelKind> for ModelKind {
    fn from(k: HfModelKind) -> Self {
        match k {
            HfModelKind::GeneralTwoVar => ModelKind::GeneralTwoVar,
            HfModelKind::Conjugation => ModelKind::Conjugation,
            HfModelKind::SumConjugation => ModelKind::SumConjugation,
            HfModelKind::Rotation => ModelKind::Rotation,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HfSide {
    A = 0,
    B = 1,
}

/// Parsed noncommutative polynomial.
pub struct HfPolynomial(NCPolynomial);

/// Validated model specification.
pub struct HfModel(ModelSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(HfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Syntax { .. } | Error::ConstantTerm { .. } => HfStatus::Syntax,
            Error::InvalidSpec(_) | Error::DimensionMismatch(_) | Error::Config(_) => HfStatus::InvalidModel,
            Error::Eigensolver(_) | Error::RepeatedEigenvalue { .. } | Error::NearCoincident(_) => HfStatus::Numerical,
            Error::MultiplicityRegime(_) => HfStatus::Multiplicity,
            Error::Unsupported(_) => HfStatus::Unsupported,
            _ => HfStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HfStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HfStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn complexes(p: *const HfComplex, len: usize, what: &str) -> Result<Vec<Complex64>, Fail> {
    Ok(slice(p, len, what)?.iter().map(|&z| z.into()).collect())
}

unsafe fn write_out(values: &[Complex64], out: *mut HfComplex, cap: usize, len: *mut usize) -> Result<(), Fail> {
    if len.is_null() {
        return Err(null("len"));
    }
    *len = values.len();
    if values.len() > cap {
        return Err(Fail(
            HfStatus::BufferTooSmall,
            format!("need room for {} values, got {cap}", values.len()),
        ));
    }
    if !values.is_empty() && out.is_null() {
        return Err(null("out"));
    }
    for (i, &z) in values.iter().enumerate() {
        *out.add(i) = z.into();
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn hf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_polynomial_parse(text: *const c_char, out: *mut *mut HfPolynomial) -> HfStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Fail(HfStatus::InvalidUtf8, e.to_string()))?;
        let p = NCPolynomial::parse(text)?;
        *out = Box::into_raw(Box::new(HfPolynomial(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`hf_polynomial_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_polynomial_free(p: *mut HfPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical text; release with [`hf_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_polynomial_to_string(p: *const HfPolynomial, out: *mut *mut c_char) -> HfStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(p.0.to_string()).expect("no nul in output").into_raw();
        Ok(())
    })
}

/// Evaluates with commuting scalars `x`, `y`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_polynomial_eval(
    p: *const HfPolynomial,
    x: HfComplex,
    y: HfComplex,
    out: *mut HfComplex,
) -> HfStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polynomial"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = p.0.eval_commutative(x.into(), y.into()).into();
        Ok(())
    })
}

/// Builds a model. `poly` may be null for the sum and rotation models; it is copied.
///
/// # Safety
/// Array arguments must hold the stated number of elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_model_new(
    kind: HfModelKind,
    poly: *const HfPolynomial,
    alphas: *const HfComplex,
    r: usize,
    betas: *const HfComplex,
    s: usize,
    n: usize,
    out: *mut *mut HfModel,
) -> HfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let poly = poly.as_ref().map(|p| p.0.clone());
        let spec = ModelSpec::new(
            kind.into(),
            poly,
            complexes(alphas, r, "alphas")?,
            complexes(betas, s, "betas")?,
            n,
        )?;
        *out = Box::into_raw(Box::new(HfModel(spec)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`hf_model_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_model_free(m: *mut HfModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of nontrivial eigenvalues, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_model_reduced_dim(m: *const HfModel) -> usize {
    m.as_ref().map_or(0, |m| m.0.reduced_dim())
}

/// Limiting nontrivial eigenvalues in slot order.
///
/// # Safety
/// `m` must be a live handle, `out` must hold `cap` elements, `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_model_limits(
    m: *const HfModel,
    out: *mut HfComplex,
    cap: usize,
    len: *mut usize,
) -> HfStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        let limits = perturb::limiting_eigenvalues(&m.0)?;
        write_out(&limits.values, out, cap, len)
    })
}

/// Nontrivial eigenvalues of one Haar draw, matched to the limit slots. The draw is
/// sample `stream` of master seed `seed`, so results do not depend on call order.
///
/// # Safety
/// As for [`hf_model_limits`].
#[no_mangle]
pub unsafe extern "C" fn hf_model_sample_eigenvalues(
    m: *const HfModel,
    seed: u64,
    stream: u64,
    out: *mut HfComplex,
    cap: usize,
    len: *mut usize,
) -> HfStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        let limits = perturb::limiting_eigenvalues(&m.0)?;
        let mut rng = RngStream::new(seed, stream).rng();
        let corner = m.0.draw_corner(&mut rng);
        let eigs = model::nontrivial_eigenvalues_from_corner(&m.0, &corner)?;
        let matched = montecarlo::match_to_limits(&eigs, &limits)?;
        write_out(&matched, out, cap, len)
    })
}

/// Mixture coefficients of the fluctuation law at the limit on `side`, index `index`
/// (0-based), for the conjugation model with simple limits.
///
/// # Safety
/// `poly` must be a live handle; arrays and outputs as for [`hf_model_limits`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn hf_mixture_coefficients(
    poly: *const HfPolynomial,
    alphas: *const HfComplex,
    r: usize,
    betas: *const HfComplex,
    s: usize,
    side: HfSide,
    index: usize,
    out: *mut HfComplex,
    cap: usize,
    len: *mut usize,
) -> HfStatus {
    guard(|| {
        let poly = poly.as_ref().ok_or_else(|| null("polynomial"))?;
        let side = match side {
            HfSide::A => Side::A(index),
            HfSide::B => Side::B(index),
        };
        let coeffs = laws::mixture_coefficients(
            &poly.0,
            &complexes(alphas, r, "alphas")?,
            &complexes(betas, s, "betas")?,
            side,
        )?;
        write_out(&coeffs, out, cap, len)
    })
}

/// Density of `sum c_j E_j` with `E_j` standard exponentials and distinct nonzero real `c_j`.
///
/// # Safety
/// `coeffs` must hold `k` elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_expmixture_density(coeffs: *const f64, k: usize, x: f64, out: *mut f64) -> HfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = laws::expmixture_density(slice(coeffs, k, "coeffs")?, x)?;
        Ok(())
    })
}

/// Distribution function matching [`hf_expmixture_density`].
///
/// # Safety
/// As for [`hf_expmixture_density`].
#[no_mangle]
pub unsafe extern "C" fn hf_expmixture_cdf(coeffs: *const f64, k: usize, x: f64, out: *mut f64) -> HfStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = laws::expmixture_cdf(slice(coeffs, k, "coeffs")?, x)?;
        Ok(())
    })
}
