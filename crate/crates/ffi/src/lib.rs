//! C interface to `specfact`.
//!
//! Every function returns a [`SpecfactStatus`]. On failure a message is
//! kept per thread and can be read with [`specfact_last_error`]. Objects
//! are opaque handles created by `*_new`/`*_from_json`/[`specfact_factorize`]
//! and released with the matching `*_free`; strings returned by the library
//! are released with [`specfact_string_free`].
//!
//! Coefficients cross the boundary as separate real and imaginary arrays,
//! one `m x m` row-major block per power.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use specfact::cli::io::InstanceFile;
use specfact::generate::{generate, GenerateOptions};
use specfact::matfact::{factorize, PipelineOptions, SpectralFactor};
use specfact::verify::{acceptance_profile, verify_factorization};
use specfact::{CMatrix, Domain, Error, MatrixLaurentPoly};

pub const SPECFACT_DOMAIN_DISC: u32 = 0;
pub const SPECFACT_DOMAIN_LINE: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecfactStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// An argument is out of range or malformed, or an output buffer is too small.
    InvalidArgument = 2,
    /// The input violates the factorization hypotheses (not self-adjoint,
    /// not positive on the boundary, singular).
    InputError = 3,
    /// The pipeline broke down numerically.
    NumericalFailure = 4,
    /// The factor does not pass verification.
    VerificationFailed = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// A matrix Laurent polynomial together with its domain.
pub struct SpecfactPoly {
    poly: MatrixLaurentPoly,
    domain: Domain,
}

/// A computed spectral factor and its certificate.
pub struct SpecfactFactor {
    factor: SpectralFactor,
    domain: Domain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(SpecfactStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = if e.is_input_error() { SpecfactStatus::InputError } else { SpecfactStatus::NumericalFailure };
        Fail(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Fail {
    Fail(SpecfactStatus::InvalidArgument, message.into())
}

fn null(name: &str) -> Fail {
    Fail(SpecfactStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, records any failure and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SpecfactStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpecfactStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            SpecfactStatus::Panic
        }
    }
}

fn domain_from(d: u32) -> Result<Domain, Fail> {
    match d {
        SPECFACT_DOMAIN_DISC => Ok(Domain::Disc),
        SPECFACT_DOMAIN_LINE => Ok(Domain::Line),
        other => Err(invalid(format!("unknown domain {other}"))),
    }
}

fn domain_code(d: Domain) -> u32 {
    match d {
        Domain::Disc => SPECFACT_DOMAIN_DISC,
        Domain::Line => SPECFACT_DOMAIN_LINE,
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message describing the last failure on this thread, or null. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn specfact_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a polynomial from `n_powers` coefficient blocks starting at
/// power `lo`. `re` and `im` each hold `n_powers * m * m` values; `im` may
/// be null for real coefficients.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `n_powers * m * m` doubles;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specfact_poly_new(
    m: usize,
    lo: i32,
    n_powers: usize,
    domain: u32,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SpecfactPoly,
) -> SpecfactStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let domain = domain_from(domain)?;
        if m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        let len = n_powers
            .checked_mul(m * m)
            .ok_or_else(|| invalid("coefficient count overflows"))?;
        if len > 0 && re.is_null() {
            return Err(null("re"));
        }
        let re = if len == 0 { &[][..] } else { std::slice::from_raw_parts(re, len) };
        let im = if len == 0 || im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
        if re.iter().chain(im.into_iter().flatten()).any(|x| !x.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
        let coeffs = (0..n_powers)
            .map(|n| {
                CMatrix::from_fn(m, m, |i, j| {
                    let k = n * m * m + i * m + j;
                    Complex64::new(re[k], im.map_or(0.0, |im| im[k]))
                })
            })
            .collect();
        let poly = MatrixLaurentPoly::new(m, lo, coeffs)?;
        *out = boxed(SpecfactPoly { poly, domain });
        Ok(())
    })
}

/// Parses an instance file in the JSON format used by the command-line tool.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specfact_poly_from_json(json: *const c_char, out: *mut *mut SpecfactPoly) -> SpecfactStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| invalid("json is not UTF-8"))?;
        let file = InstanceFile::from_json(text).map_err(|e| invalid(e.to_string()))?;
        let poly = file.to_poly().map_err(|e| invalid(e.to_string()))?;
        *out = boxed(SpecfactPoly { poly, domain: file.domain });
        Ok(())
    })
}

/// Serializes to canonical JSON. Release the string with
/// [`specfact_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specfact_poly_to_json(p: *const SpecfactPoly, out: *mut *mut c_char) -> SpecfactStatus {
    guard(|| {
        let p = deref(p, "p")?;
        let out = out_ptr(out, "out")?;
        let text = InstanceFile::from_poly(&p.poly, p.domain, None).to_json();
        *out = CString::new(text).expect("JSON has no nul bytes").into_raw();
        Ok(())
    })
}

/// Dimension, lowest power, number of stored powers and domain. Any output
/// pointer may be null. A zero polynomial has no stored powers.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn specfact_poly_shape(
    p: *const SpecfactPoly,
    m: *mut usize,
    lo: *mut i32,
    n_powers: *mut usize,
    domain: *mut u32,
) -> SpecfactStatus {
    guard(|| {
        let p = deref(p, "p")?;
        if let Some(m) = m.as_mut() {
            *m = p.poly.dim();
        }
        if let Some(lo) = lo.as_mut() {
            *lo = p.poly.lo();
        }
        if let Some(n) = n_powers.as_mut() {
            *n = p.poly.coeffs().len();
        }
        if let Some(d) = domain.as_mut() {
            *d = domain_code(p.domain);
        }
        Ok(())
    })
}

/// Copies the coefficients into `re` and `im`, laid out as for
/// [`specfact_poly_new`]. `len` is the capacity of each buffer.
///
/// # Safety
/// `p` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn specfact_poly_coeffs(
    p: *const SpecfactPoly,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SpecfactStatus {
    guard(|| {
        let p = deref(p, "p")?;
        let m = p.poly.dim();
        let need = p.poly.coeffs().len() * m * m;
        if need > len {
            return Err(invalid(format!("buffers hold {len} values, {need} needed")));
        }
        if need == 0 {
            return Ok(());
        }
        if re.is_null() {
            return Err(null("re"));
        }
        if im.is_null() {
            return Err(null("im"));
        }
        let re = std::slice::from_raw_parts_mut(re, need);
        let im = std::slice::from_raw_parts_mut(im, need);
        for (n, c) in p.poly.coeffs().iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    let k = n * m * m + i * m + j;
                    re[k] = c[(i, j)].re;
                    im[k] = c[(i, j)].im;
                }
            }
        }
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn specfact_poly_free(p: *mut SpecfactPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Factors `s`. `canonical` selects the canonical representative; `grid`
/// is the boundary grid size (0 for the default).
///
/// # Safety
/// `s` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specfact_factorize(
    s: *const SpecfactPoly,
    canonical: bool,
    grid: usize,
    out: *mut *mut SpecfactFactor,
) -> SpecfactStatus {
    guard(|| {
        let s = deref(s, "s")?;
        let out = out_ptr(out, "out")?;
        let mut opts = PipelineOptions { canonical, ..PipelineOptions::default() };
        if grid > 0 {
            opts.grid = grid;
        }
        let factor = factorize(&s.poly, s.domain, &opts)?;
        *out = boxed(SpecfactFactor { factor, domain: s.domain });
        Ok(())
    })
}

/// A new polynomial handle holding the factor `S⁺`.
///
/// # Safety
/// `f` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn specfact_factor_poly(f: *const SpecfactFactor, out: *mut *mut SpecfactPoly) -> SpecfactStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(SpecfactPoly { poly: f.factor.plus.clone(), domain: f.domain });
        Ok(())
    })
}

/// Certificate summary: reconstruction residual, number of sweep steps and
/// the boundary-degenerate flag. Any output pointer may be null.
///
/// # Safety
/// `f` must be a live handle; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn specfact_factor_certificate(
    f: *const SpecfactFactor,
    recon_residual: *mut f64,
    sweep_steps: *mut usize,
    boundary_degenerate: *mut bool,
) -> SpecfactStatus {
    guard(|| {
        let c = &deref(f, "f")?.factor.certificate;
        if let Some(r) = recon_residual.as_mut() {
            *r = c.recon_residual;
        }
        if let Some(n) = sweep_steps.as_mut() {
            *n = c.sweep_transcript.len();
        }
        if let Some(b) = boundary_degenerate.as_mut() {
            *b = c.boundary_degenerate;
        }
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn specfact_factor_free(f: *mut SpecfactFactor) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Verifies `p` as a factor of `s` with reconstruction threshold `tol`
/// (0 for the default). Returns [`SpecfactStatus::VerificationFailed`]
/// when the checks fail; `recon_residual` may be null.
///
/// # Safety
/// `s` and `p` must be live handles; `recon_residual` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn specfact_verify(
    s: *const SpecfactPoly,
    p: *const SpecfactPoly,
    tol: f64,
    grid: usize,
    recon_residual: *mut f64,
) -> SpecfactStatus {
    guard(|| {
        let s = deref(s, "s")?;
        let p = deref(p, "p")?;
        if s.domain != p.domain {
            return Err(invalid("domains differ"));
        }
        if s.poly.dim() != p.poly.dim() {
            return Err(invalid(format!("dimensions differ: {} vs {}", s.poly.dim(), p.poly.dim())));
        }
        let tol = if tol > 0.0 { tol } else { 1e-8 };
        let grid = if grid > 0 { grid } else { PipelineOptions::default().grid };
        let f = SpectralFactor {
            plus: p.poly.clone(),
            certificate: specfact::matfact::FactorizationCertificate::empty(p.poly.dim()),
        };
        let report = verify_factorization(&s.poly, &f, s.domain, &acceptance_profile(&s.poly, s.domain, tol), grid);
        if let Some(r) = recon_residual.as_mut() {
            *r = report.recon_residual;
        }
        if report.pass {
            Ok(())
        } else {
            Err(Fail(SpecfactStatus::VerificationFailed, report.failures.join("; ")))
        }
    })
}

/// Writes a random instance and its canonical factor.
///
/// # Safety
/// `spectrum` and `reference` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn specfact_generate(
    m: usize,
    degree: usize,
    seed: u64,
    domain: u32,
    boundary_zero: bool,
    spectrum: *mut *mut SpecfactPoly,
    reference: *mut *mut SpecfactPoly,
) -> SpecfactStatus {
    guard(|| {
        let spectrum = out_ptr(spectrum, "spectrum")?;
        let reference = out_ptr(reference, "reference")?;
        let domain = domain_from(domain)?;
        if m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        let planted = generate(&GenerateOptions { m, degree, seed, domain, boundary_zero })?;
        *spectrum = boxed(SpecfactPoly { poly: planted.spectrum, domain });
        *reference = boxed(SpecfactPoly { poly: planted.reference, domain });
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn specfact_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
