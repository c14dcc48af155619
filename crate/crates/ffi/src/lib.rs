//! C ABI for the `quasicopy` simulator.
//!
//! Conventions:
//! - Every fallible call returns a [`QcStatus`]; results go through out-pointers.
//! - On failure, [`qc_last_error_message`] describes the most recent error on the calling thread.
//! - Configs are opaque [`QcConfig`] handles released with [`qc_config_free`].
//! - Strings returned by the library must be released with [`qc_string_free`].
//! - Panics never cross the boundary; they are reported as [`QcStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quasicopy::batch::{run_batch, Engine, Engines};
use quasicopy::protocol;
use quasicopy::qrm::tradeoff_check;
use quasicopy::{Error, ProtocolConfig};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    /// The input parsed but does not describe a valid protocol.
    InvalidInput = 4,
    DimensionMismatch = 5,
    /// The caller's buffer is shorter than the number of values to write.
    BufferTooSmall = 6,
    /// `P[μ₀] = 0`, so the posterior has no value.
    UndefinedPosterior = 7,
    Panic = 8,
    Internal = 9,
}

pub const QC_ENGINE_BLOCK: u32 = 0;
pub const QC_ENGINE_DENSE: u32 = 1;
pub const QC_ENGINE_BOTH: u32 = 2;

/// Opaque handle to a validated protocol configuration.
pub struct QcConfig {
    inner: ProtocolConfig,
}

/// Aggregate results of [`qc_montecarlo`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QcMonteCarloSummary {
    pub trials: u64,
    pub successes: u64,
    /// `successes / trials`.
    pub p_mu0_observed: f64,
    /// `cos²φ`.
    pub p_mu0_expected: f64,
    /// Smallest fidelity between a recovered state and the input (1 with no successes).
    pub min_success_fidelity: f64,
    /// Only populated for `QC_ENGINE_BOTH`.
    pub engine_mismatches: u64,
    pub max_engine_state_diff: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: QcStatus,
    message: String,
}

impl Failure {
    fn new(status: QcStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Json(_) => QcStatus::InvalidJson,
            Error::DimensionMismatch { .. } | Error::NotBlockShaped { .. } => QcStatus::DimensionMismatch,
            Error::UndefinedPosterior { .. } => QcStatus::UndefinedPosterior,
            Error::Config(_)
            | Error::InvalidDensity(_)
            | Error::NotHermitian { .. }
            | Error::IncompleteInstrument { .. }
            | Error::EmptyInstrument
            | Error::OutcomeOutOfRange { .. } => QcStatus::InvalidInput,
            _ => QcStatus::Internal,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(QcStatus::Internal, format!("serializing result: {e}"))
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, records its error message and converts panics into `QcStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            QcStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(Some(fail.message));
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("panic: {msg}")));
            QcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(QcStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn config_ref<'a>(cfg: *const QcConfig) -> Result<&'a ProtocolConfig, Failure> {
    cfg.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure::new(QcStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_slice(out: *mut f64, len: usize, values: &[f64]) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < values.len() {
        return Err(Failure::new(
            QcStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|e| Failure::new(QcStatus::Internal, e.to_string()))?;
    write_out(out, c.into_raw(), "output string")
}

fn engine(code: u32) -> Result<Engine, Failure> {
    match code {
        QC_ENGINE_BLOCK => Ok(Engine::Block),
        QC_ENGINE_DENSE => Ok(Engine::Dense),
        QC_ENGINE_BOTH => Ok(Engine::Both),
        other => Err(Failure::new(QcStatus::InvalidInput, format!("unknown engine code {other}"))),
    }
}

/// Parses and validates a JSON config. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qc_config_from_json(json: *const c_char, out: *mut *mut QcConfig) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let inner = ProtocolConfig::from_json(text)?;
        write_out(out, Box::into_raw(Box::new(QcConfig { inner })), "out")
    })
}

/// Releases a handle from [`qc_config_from_json`]. NULL is ignored.
///
/// # Safety
/// `cfg` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_config_free(cfg: *mut QcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Writes the system dimension `d`.
///
/// # Safety
/// `cfg` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qc_config_dim(cfg: *const QcConfig, out: *mut usize) -> QcStatus {
    guard(|| write_out(out, config_ref(cfg)?.d(), "out"))
}

/// Writes the number of inner measurement outcomes `n`.
///
/// # Safety
/// `cfg` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qc_config_outcomes(cfg: *const QcConfig, out: *mut usize) -> QcStatus {
    guard(|| write_out(out, config_ref(cfg)?.n(), "out"))
}

/// `cos²φ`. Total function; never fails.
#[no_mangle]
pub extern "C" fn qc_reversal_probability(phi: f64) -> f64 {
    protocol::reversal_probability(phi)
}

/// Writes `P[ν]` for `ν = 1..n` into `out[0..n]`.
///
/// # Safety
/// `cfg` must be NULL or a live handle; `out` must be NULL or point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_outcome_probabilities(cfg: *const QcConfig, out: *mut f64, len: usize) -> QcStatus {
    guard(|| {
        let cfg = config_ref(cfg)?;
        let p =
            (1..=cfg.n()).map(|nu| protocol::outcome_probability(nu, cfg)).collect::<quasicopy::Result<Vec<_>>>()?;
        write_slice(out, len, &p)
    })
}

/// Writes `P[ν | μ₀]` into `out[0..n]`. Returns `UndefinedPosterior` when `cos²φ = 0`.
///
/// # Safety
/// `cfg` must be NULL or a live handle; `out` must be NULL or point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_posterior_given_success(cfg: *const QcConfig, out: *mut f64, len: usize) -> QcStatus {
    guard(|| {
        let post = protocol::posterior_given_success(config_ref(cfg)?)?;
        write_slice(out, len, post.probs())
    })
}

/// Runs trial `index` under `seed` and writes its record as a JSON string.
///
/// # Safety
/// `cfg` must be NULL or a live handle; `out_json` must be NULL or writable. Release the
/// string with [`qc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qc_run_trial(
    cfg: *const QcConfig,
    seed: u64,
    index: u64,
    engine_code: u32,
    out_json: *mut *mut c_char,
) -> QcStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let trial = Engines::new(config_ref(cfg)?, engine(engine_code)?)?.run(seed, index)?;
        write_json(out_json, serde_json::to_string(&trial.record)?)
    })
}

/// Compares against the outcome-dependent reversal baseline at each of `phis[0..len]`,
/// writing a JSON array of rows.
///
/// # Safety
/// `cfg` must be NULL or a live handle; `phis` must point to `len` doubles (or be NULL
/// with `len = 0`); `out_json` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qc_tradeoff_json(
    cfg: *const QcConfig,
    phis: *const f64,
    len: usize,
    out_json: *mut *mut c_char,
) -> QcStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let cfg = config_ref(cfg)?;
        let grid: &[f64] = match (phis.is_null(), len) {
            (_, 0) => &[],
            (true, _) => return Err(null("phis")),
            (false, _) => std::slice::from_raw_parts(phis, len),
        };
        let rows = grid.iter().map(|&phi| tradeoff_check(&cfg.with_phi(phi))).collect::<quasicopy::Result<Vec<_>>>()?;
        write_json(out_json, serde_json::to_string(&rows)?)
    })
}

/// Runs `trials` seeded trials on `threads` workers (0 = all cores).
///
/// # Safety
/// `cfg` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qc_montecarlo(
    cfg: *const QcConfig,
    seed: u64,
    trials: u64,
    engine_code: u32,
    threads: usize,
    out: *mut QcMonteCarloSummary,
) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = config_ref(cfg)?;
        let threads = (threads > 0).then_some(threads);
        let t = run_batch(cfg, engine(engine_code)?, seed, trials, threads, |_| Ok(()))?;
        let summary = QcMonteCarloSummary {
            trials: t.trials,
            successes: t.successes,
            p_mu0_observed: if t.trials == 0 { 0.0 } else { t.successes as f64 / t.trials as f64 },
            p_mu0_expected: cfg.cos2(),
            min_success_fidelity: t.min_success_fidelity,
            engine_mismatches: t.engine_mismatches,
            max_engine_state_diff: t.max_engine_state_diff,
        };
        write_out(out, summary, "out")
    })
}

/// Message for the last failed call on this thread, or NULL after a successful call.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static name of a status code, e.g. `"QC_STATUS_BUFFER_TOO_SMALL"`, or
/// `"QC_STATUS_UNKNOWN"` for values outside the enum.
#[no_mangle]
pub extern "C" fn qc_status_name(code: i32) -> *const c_char {
    let s: &'static CStr = match code {
        0 => c"QC_STATUS_OK",
        1 => c"QC_STATUS_NULL_POINTER",
        2 => c"QC_STATUS_INVALID_UTF8",
        3 => c"QC_STATUS_INVALID_JSON",
        4 => c"QC_STATUS_INVALID_INPUT",
        5 => c"QC_STATUS_DIMENSION_MISMATCH",
        6 => c"QC_STATUS_BUFFER_TOO_SMALL",
        7 => c"QC_STATUS_UNDEFINED_POSTERIOR",
        8 => c"QC_STATUS_PANIC",
        9 => c"QC_STATUS_INTERNAL",
        _ => c"QC_STATUS_UNKNOWN",
    };
    s.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_are_contained() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, QcStatus::Panic);
        let msg = unsafe { CStr::from_ptr(qc_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
        assert_eq!(guard(|| Ok(())), QcStatus::Ok);
        assert!(qc_last_error_message().is_null());
    }

    #[test]
    fn error_mapping() {
        let f: Failure = Error::UndefinedPosterior { p_success: 0.0 }.into();
        assert_eq!(f.status, QcStatus::UndefinedPosterior);
        let f: Failure = Error::Config("x".into()).into();
        assert_eq!(f.status, QcStatus::InvalidInput);
        assert!(engine(7).is_err());
    }
}
