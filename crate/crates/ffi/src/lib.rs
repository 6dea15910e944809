//! C ABI over `odx-core`.
//!
//! Conventions:
//! - Every fallible function returns an [`OdxStatus`]; outputs go through
//!   caller-provided pointers and are written only on success.
//! - On failure a message is stored per thread; read it with
//!   [`odx_last_error_message`].
//! - Families and probes are opaque handles released with the matching
//!   `_free` function.
//! - Complex arrays are interleaved `re, im` doubles; matrices are row-major.
//! - Panics never cross the boundary; they surface as `ODX_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use odx::discrim::{classical_one_query_best, gram, srm, success_probability, DEFAULT_RANK_TOL};
use odx::linalg::{Complex64, StateVector};
use odx::optimize::{optimize_probe, random_probe_scan};
use odx::oracle::{canonical_one_bit_family, post_oracle_states, OracleFamily};
use odx::protocol::{full_protocol_distribution, probe_state};
use odx::report::{verify, Perturbations};
use odx::sample::run_shots;
use odx::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    DimensionMismatch = 4,
    Numerical = 5,
    Unsupported = 6,
    BufferTooSmall = 7,
    CheckFailed = 8,
    Panic = 9,
}

/// Hypothesis family: functions plus priors.
pub struct OdxFamily {
    inner: OracleFamily,
}

/// Normalized probe state.
pub struct OdxProbe {
    inner: StateVector,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NULs removed"));
}

fn status_of(err: &Error) -> OdxStatus {
    match err {
        Error::Parse { .. } => OdxStatus::ParseError,
        Error::BadShape { .. }
        | Error::DimensionMismatch(..)
        | Error::WidthMismatch { .. }
        | Error::SizeMismatch { .. } => OdxStatus::DimensionMismatch,
        Error::UnsupportedShape(_) | Error::TooLarge { .. } => OdxStatus::Unsupported,
        Error::NonFinite(_)
        | Error::NotHermitian(_)
        | Error::NotPsd(_)
        | Error::NoConvergence(_)
        | Error::NotUnitary(_)
        | Error::NegativeEigenvalue(_) => OdxStatus::Numerical,
        _ => OdxStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (OdxStatus, String)>) -> OdxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OdxStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            OdxStatus::Panic
        }
    }
}

type Fallible<T> = Result<T, (OdxStatus, String)>;

fn lift<T>(r: odx::Result<T>) -> Fallible<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (OdxStatus, String) {
    (OdxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Fallible<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Fallible<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Boxes `value` into a new handle at `out`.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Fallible<()> {
    write(out, ptr::null_mut(), "out")?;
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Copies `values` to `out` when `capacity` suffices.
unsafe fn write_slice(out: *mut f64, capacity: usize, values: &[f64]) -> Fallible<()> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if capacity < values.len() {
        return Err((
            OdxStatus::BufferTooSmall,
            format!("buffer holds {capacity} doubles, need {}", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn interleave(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn odx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// including the terminator, so a too-small buffer can be retried.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn odx_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// The four one-bit functions with uniform priors.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn odx_family_canonical(out: *mut *mut OdxFamily) -> OdxStatus {
    guard(|| {
        emit(
            out,
            OdxFamily {
                inner: canonical_one_bit_family(),
            },
        )
    })
}

/// Parses a family file (one `n=.. m=.. table=..` line per function,
/// uniform priors).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odx_family_parse(
    text: *const c_char,
    out: *mut *mut OdxFamily,
) -> OdxStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| {
            (
                OdxStatus::ParseError,
                format!("family text is not UTF-8: {e}"),
            )
        })?;
        let fam = lift(OracleFamily::parse(s))?;
        emit(out, OdxFamily { inner: fam })
    })
}

/// Number of functions in the family (0 for a null handle).
///
/// # Safety
/// `fam` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn odx_family_len(fam: *const OdxFamily) -> usize {
    fam.as_ref().map_or(0, |f| f.inner.len())
}

/// # Safety
/// `fam` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odx_family_free(fam: *mut OdxFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// The closed-form optimal two-qubit probe.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odx_probe_closed_form(out: *mut *mut OdxProbe) -> OdxStatus {
    guard(|| {
        emit(
            out,
            OdxProbe {
                inner: probe_state(),
            },
        )
    })
}

/// Probe from `count` interleaved amplitudes (`2 * count` doubles);
/// `count` must be a power of two. The state is normalized.
///
/// # Safety
/// `re_im` must point to `2 * count` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odx_probe_from_amplitudes(
    re_im: *const f64,
    count: usize,
    out: *mut *mut OdxProbe,
) -> OdxStatus {
    guard(|| {
        if re_im.is_null() {
            return Err(null("re_im"));
        }
        if count == 0 || !count.is_power_of_two() {
            return Err((
                OdxStatus::InvalidArgument,
                format!("amplitude count {count} is not a power of two"),
            ));
        }
        let raw = std::slice::from_raw_parts(re_im, 2 * count);
        let amps = raw.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let s = lift(StateVector::normalized(amps))?;
        emit(out, OdxProbe { inner: s })
    })
}

/// Number of amplitudes (0 for a null handle).
///
/// # Safety
/// `probe` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn odx_probe_dim(probe: *const OdxProbe) -> usize {
    probe.as_ref().map_or(0, |p| p.inner.dim())
}

/// Writes `2 * dim` interleaved doubles.
///
/// # Safety
/// `probe` must be a live handle; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn odx_probe_amplitudes(
    probe: *const OdxProbe,
    out: *mut f64,
    capacity: usize,
) -> OdxStatus {
    guard(|| {
        let p = deref(probe, "probe")?;
        write_slice(out, capacity, &interleave(p.inner.amplitudes()))
    })
}

/// # Safety
/// `probe` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odx_probe_free(probe: *mut OdxProbe) {
    if !probe.is_null() {
        drop(Box::from_raw(probe));
    }
}

/// Gram matrix of the post-oracle states, `K x K` complex row-major
/// (`2 K^2` doubles). `out_dim` receives `K`.
///
/// # Safety
/// Handles must be live; `out` must hold `capacity` doubles; `out_dim` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn odx_gram(
    fam: *const OdxFamily,
    probe: *const OdxProbe,
    out: *mut f64,
    capacity: usize,
    out_dim: *mut usize,
) -> OdxStatus {
    guard(|| {
        let e = lift(post_oracle_states(
            &deref(probe, "probe")?.inner,
            &deref(fam, "family")?.inner,
        ))?;
        let g = lift(gram(&e))?;
        if out_dim.is_null() {
            return Err(null("out_dim"));
        }
        write_slice(out, capacity, &interleave(g.as_slice()))?;
        write(out_dim, g.dim(), "out_dim")
    })
}

/// Square-root-measurement success. `per_hypothesis` may be null; otherwise
/// it receives one value per family member.
///
/// # Safety
/// Handles must be live; `average` writable; `per_hypothesis` null or
/// holding `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn odx_srm_success(
    fam: *const OdxFamily,
    probe: *const OdxProbe,
    average: *mut f64,
    per_hypothesis: *mut f64,
    capacity: usize,
) -> OdxStatus {
    guard(|| {
        let e = lift(post_oracle_states(
            &deref(probe, "probe")?.inner,
            &deref(fam, "family")?.inner,
        ))?;
        let r = lift(success_probability(&e, &lift(srm(&e, DEFAULT_RANK_TOL))?))?;
        if average.is_null() {
            return Err(null("average"));
        }
        if !per_hypothesis.is_null() {
            write_slice(per_hypothesis, capacity, &r.per_hypothesis_success)?;
        }
        write(average, r.average_success, "average")
    })
}

/// Simplex search over probes. `best_probe` may be null; otherwise it
/// receives a new handle the caller must free.
///
/// # Safety
/// `fam` must be live; `best_value` writable; `best_probe` null or writable.
#[no_mangle]
pub unsafe extern "C" fn odx_optimize_probe(
    fam: *const OdxFamily,
    restarts: usize,
    seed: u64,
    tol: f64,
    best_value: *mut f64,
    best_probe: *mut *mut OdxProbe,
) -> OdxStatus {
    guard(|| {
        let r = lift(optimize_probe(
            &deref(fam, "family")?.inner,
            restarts,
            seed,
            tol,
        ))?;
        write(best_value, r.best_value, "best_value")?;
        if !best_probe.is_null() {
            emit(
                best_probe,
                OdxProbe {
                    inner: r.best_probe,
                },
            )?;
        }
        Ok(())
    })
}

/// Best SRM success over `trials` random probes.
///
/// # Safety
/// `fam` must be live; `best` writable.
#[no_mangle]
pub unsafe extern "C" fn odx_random_probe_scan(
    fam: *const OdxFamily,
    trials: usize,
    seed: u64,
    best: *mut f64,
) -> OdxStatus {
    guard(|| {
        let v = lift(random_probe_scan(
            &deref(fam, "family")?.inner,
            trials,
            seed,
        ))?;
        write(best, v, "best")
    })
}

/// Monte Carlo of the closed-form protocol with a uniformly random hidden
/// function per shot.
///
/// # Safety
/// `successes` and `frequency` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odx_run_shots(
    shots: u64,
    seed: u64,
    successes: *mut u64,
    frequency: *mut f64,
) -> OdxStatus {
    guard(|| {
        if successes.is_null() || frequency.is_null() {
            return Err(null("output"));
        }
        let s = lift(run_shots(shots, seed))?;
        successes.write(s.successes);
        frequency.write(s.frequency);
        Ok(())
    })
}

/// Best deterministic single-query classical strategy (one-bit families).
///
/// # Safety
/// `fam` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn odx_classical_best(fam: *const OdxFamily, out: *mut f64) -> OdxStatus {
    guard(|| {
        let v = lift(classical_one_query_best(&deref(fam, "family")?.inner))?;
        write(out, v, "out")
    })
}

/// Readout distribution (4 doubles) of the closed-form protocol when the
/// hidden function is canonical member `index` (0..4).
///
/// # Safety
/// `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn odx_protocol_distribution(
    index: usize,
    out: *mut f64,
    capacity: usize,
) -> OdxStatus {
    guard(|| {
        let fam = canonical_one_bit_family();
        let f = fam.members().get(index).ok_or_else(|| {
            (
                OdxStatus::InvalidArgument,
                format!("function index {index} out of range 0..4"),
            )
        })?;
        write_slice(out, capacity, &lift(full_protocol_distribution(f))?)
    })
}

/// Runs the verification battery. Writes the pass/total counts and returns
/// `ODX_STATUS_CHECK_FAILED` (naming the first failure in the error message)
/// unless every check passes. `report_json` may be null; otherwise it
/// receives a string to release with [`odx_string_free`].
///
/// # Safety
/// `passed` and `total` must be writable; `report_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn odx_verify(
    perturb_theta1: f64,
    perturb_probe: f64,
    passed: *mut usize,
    total: *mut usize,
    report_json: *mut *mut c_char,
) -> OdxStatus {
    guard(|| {
        if passed.is_null() || total.is_null() {
            return Err(null("output"));
        }
        let doc = lift(verify(Perturbations {
            theta1: perturb_theta1,
            probe: perturb_probe,
        }))?;
        passed.write(doc.checks.iter().filter(|c| c.pass).count());
        total.write(doc.checks.len());
        if !report_json.is_null() {
            let s = CString::new(doc.to_json()).expect("JSON has no NULs");
            report_json.write(s.into_raw());
        }
        match doc.first_failure() {
            None => Ok(()),
            Some(c) => Err((
                OdxStatus::CheckFailed,
                format!(
                    "check {} failed: measured {}, expected {}, tol {}",
                    c.name, c.measured, c.expected, c.tolerance
                ),
            )),
        }
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
