//! C ABI over `lowres-core`.
//!
//! Every fallible call returns a [`LowresStatus`]; results go through out-pointers.
//! Handles are created by `*_new`/`*_evolve` and released with the matching `*_free`.
//! After a non-OK status, `lowres_last_error_message` describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lowres_core::dynamics::{quantum_expectation, ClosedForm};
use lowres_core::entanglement::linear_entropy_series;
use lowres_core::error::Error;
use lowres_core::fockspace::{self, JointFockState};
use lowres_core::model::{InitialConditions, Mode, ModelParams};
use lowres_core::resolution::commutator_indicator;
use lowres_core::revivals::cat_coefficients;
use lowres_core::wavefunction::{Grid, SampledWavefunction};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowresStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Domain = 3,
    Invariant = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Model parameters together with the initial phase-space point.
pub struct LowresParams {
    params: ModelParams,
    ics: InitialConditions,
}

/// Two-mode Fock-space state at a fixed time.
pub struct LowresFockState {
    state: JointFockState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> LowresStatus {
    match err {
        Error::Config { .. } => LowresStatus::Config,
        Error::Domain(_) => LowresStatus::Domain,
        Error::Invariant { .. } => LowresStatus::Invariant,
        Error::Io(_) => LowresStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), LowresStatus>) -> LowresStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LowresStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside lowres".into());
            LowresStatus::Panic
        }
    }
}

fn lift<T>(r: lowres_core::error::Result<T>) -> Result<T, LowresStatus> {
    r.map_err(|e| {
        set_last_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), LowresStatus> {
    if p.is_null() {
        set_last_error(format!("null pointer: {what}"));
        Err(LowresStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn mode_from(mode: u32) -> Result<Mode, LowresStatus> {
    lift(Mode::from_index(mode as usize))
}

/// Message for the most recent failure on this thread; empty if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lowres_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn lowres_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lowres_params_new(
    omega1: f64,
    omega2: f64,
    g1: f64,
    g2: f64,
    g: f64,
    hbar: f64,
    mass: f64,
    q10: f64,
    p10: f64,
    q20: f64,
    p20: f64,
    out: *mut *mut LowresParams,
) -> LowresStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = ModelParams { omega1, omega2, g1, g2, g, hbar, mass };
        lift(params.validate())?;
        let ics = InitialConditions { q10, p10, q20, p20 };
        if ![q10, p10, q20, p20].iter().all(|v| v.is_finite()) {
            set_last_error("initial conditions must be finite".into());
            return Err(LowresStatus::Domain);
        }
        *out = Box::into_raw(Box::new(LowresParams { params, ics }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from `lowres_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lowres_params_free(p: *mut LowresParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Closed-form `(q, p)` of mode `mode` (1 or 2) at time `t`.
/// `corrected != 0` selects the oracle-consistent phase, otherwise the printed one.
///
/// # Safety
/// `p` must be a live handle; `out` must point to two writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lowres_closed_form_expectation(
    p: *const LowresParams,
    t: f64,
    mode: u32,
    corrected: i32,
    out: *mut f64,
) -> LowresStatus {
    guard(|| {
        non_null(p, "params")?;
        non_null(out, "out")?;
        let p = &*p;
        let form = if corrected != 0 { ClosedForm::OracleCorrected } else { ClosedForm::AsPrinted };
        let pt = quantum_expectation(&p.params, &p.ics, t, mode_from(mode)?, form);
        *out = pt.q;
        *out.add(1) = pt.p;
        Ok(())
    })
}

/// Series linear entropy of mode 1 at time `t`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_linear_entropy(
    p: *const LowresParams,
    t: f64,
    eps_tail: f64,
    out: *mut f64,
) -> LowresStatus {
    guard(|| {
        non_null(p, "params")?;
        non_null(out, "out")?;
        let p = &*p;
        *out = lift(linear_entropy_series(&p.params, &p.ics, t, eps_tail))?;
        Ok(())
    })
}

/// Fock-space state evolved to time `t`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_fock_evolve(
    p: *const LowresParams,
    t: f64,
    eps_tail: f64,
    out: *mut *mut LowresFockState,
) -> LowresStatus {
    guard(|| {
        non_null(p, "params")?;
        non_null(out, "out")?;
        let p = &*p;
        let state = lift(fockspace::evolve(&p.params, &p.ics, t, eps_tail))?;
        *out = Box::into_raw(Box::new(LowresFockState { state }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from `lowres_fock_evolve` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lowres_fock_free(s: *mut LowresFockState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Truncation sizes per mode.
///
/// # Safety
/// `s` must be a live handle; `n1`, `n2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_fock_dims(s: *const LowresFockState, n1: *mut usize, n2: *mut usize) -> LowresStatus {
    guard(|| {
        non_null(s, "state")?;
        non_null(n1, "n1")?;
        non_null(n2, "n2")?;
        let (a, b) = (*s).state.dims();
        *n1 = a;
        *n2 = b;
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_fock_norm(s: *const LowresFockState, out: *mut f64) -> LowresStatus {
    guard(|| {
        non_null(s, "state")?;
        non_null(out, "out")?;
        *out = (*s).state.norm_sqr();
        Ok(())
    })
}

/// `(q1, p1, q2, p2)` expectations from the state.
///
/// # Safety
/// Handles must be live; `out` must point to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lowres_fock_observables(
    s: *const LowresFockState,
    p: *const LowresParams,
    out: *mut f64,
) -> LowresStatus {
    guard(|| {
        non_null(s, "state")?;
        non_null(p, "params")?;
        non_null(out, "out")?;
        let obs = fockspace::observables(&(*s).state, &(*p).params);
        ptr::copy_nonoverlapping(obs.as_ptr(), out, 4);
        Ok(())
    })
}

/// Linear entropy `1 − Tr ρ²` of the reduced state of mode `mode` (1 or 2).
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_fock_linear_entropy(
    s: *const LowresFockState,
    mode: u32,
    out: *mut f64,
) -> LowresStatus {
    guard(|| {
        non_null(s, "state")?;
        non_null(out, "out")?;
        let rho = fockspace::reduce(&(*s).state, mode_from(mode)?);
        *out = fockspace::linear_entropy(&rho);
        Ok(())
    })
}

/// Cat-state coefficients at the revival fraction `r/s`.
/// `len` always receives the component count; when it exceeds `capacity`
/// nothing is written and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `re` and `im` must hold `capacity` doubles; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_cat_coefficients(
    r: u64,
    s: u64,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> LowresStatus {
    guard(|| {
        non_null(len, "len")?;
        let coeffs = lift(cat_coefficients(r, s))?;
        *len = coeffs.len();
        if coeffs.len() > capacity {
            set_last_error(format!("need {} slots, got {capacity}", coeffs.len()));
            return Err(LowresStatus::BufferTooSmall);
        }
        non_null(re, "re")?;
        non_null(im, "im")?;
        for (k, c) in coeffs.iter().enumerate() {
            *re.add(k) = c.re;
            *im.add(k) = c.im;
        }
        Ok(())
    })
}

/// `|Σ δx ψ*_k ψ_{k+1}|` for amplitudes sampled at spacing `dx`.
///
/// # Safety
/// `re` and `im` must each hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lowres_commutator_indicator(
    re: *const f64,
    im: *const f64,
    len: usize,
    dx: f64,
    out: *mut f64,
) -> LowresStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        non_null(out, "out")?;
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let amps: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let grid = lift(Grid::new(0.0, dx, len))?;
        let psi = lift(SampledWavefunction::new(grid, amps))?;
        *out = commutator_indicator(&psi);
        Ok(())
    })
}
