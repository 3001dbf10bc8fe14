//! C interface to `secure_swipt`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`-style
//! functions and released with the matching `*_free`. Every fallible
//! function returns a [`SwiptStatus`]; on failure a message is available
//! from [`swipt_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` belong to the caller and are released
//! with [`swipt_string_free`].
//!
//! Complex vectors are exchanged as interleaved `(re, im)` pairs of doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use secure_swipt::baselines::{run_scheme, BaselineResult, Scheme};
use secure_swipt::channel::{generate_channel_set, ChannelSet};
use secure_swipt::harness::{emit_outputs, run_batch, runtime_vs_k, summarize, sweep_power, ExperimentConfig};
use secure_swipt::model::NetworkConfig;
use secure_swipt::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwiptStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string was not UTF-8, an index was out of range, or a value was outside its domain.
    InvalidArgument = 2,
    /// The configuration is malformed or inconsistent.
    Config = 3,
    /// Input dimensions disagree with the network layout.
    Shape = 4,
    /// A JSON document could not be parsed.
    Parse = 5,
    Io = 6,
    /// The output buffer is too short; the required length was written.
    BufferTooSmall = 7,
    Internal = 8,
    /// A panic was caught at the boundary.
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwiptScheme {
    Proposed = 0,
    NoAn = 1,
    Zf = 2,
}

/// Which beamformer of a solution to read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwiptBeam {
    /// MBS beamformer of the macro user given by `index`.
    Macro = 0,
    /// FBS information beamformer.
    Information = 1,
    /// FBS artificial-noise vector.
    Noise = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwiptExperiment {
    /// `trials` seeds on the base scenario.
    Batch = 0,
    SweepPower = 1,
    RuntimeVsK = 2,
}

/// Experiment configuration.
pub struct SwiptConfig(ExperimentConfig);

/// Channel realisation together with the network it was drawn for.
pub struct SwiptChannel {
    net: NetworkConfig,
    ch: ChannelSet,
}

/// Outcome of one scheme on one channel realisation.
pub struct SwiptResult(BaselineResult);

type Failure = (SwiptStatus, String);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn from_error(e: Error) -> Failure {
    let status = match &e {
        Error::Domain(_) => SwiptStatus::InvalidArgument,
        Error::Config(_) | Error::Parse { .. } => SwiptStatus::Config,
        Error::Shape(_) => SwiptStatus::Shape,
        Error::Json(_) => SwiptStatus::Parse,
        Error::Io(_) | Error::Csv(_) => SwiptStatus::Io,
        Error::Program(_) => SwiptStatus::Internal,
    };
    (status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SwiptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SwiptStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            SwiptStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    (SwiptStatus::NullPointer, format!("{name} is null"))
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

unsafe fn get_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    unsafe { p.as_mut() }.ok_or_else(|| null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| (SwiptStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T, name: &str) -> Result<(), Failure> {
    let slot = unsafe { get_mut(out, name)? };
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let slot = unsafe { get_mut(out, "out")? };
    let c = CString::new(s).map_err(|_| (SwiptStatus::Internal, "string holds a NUL byte".to_string()))?;
    *slot = c.into_raw();
    Ok(())
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn swipt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn swipt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn swipt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Default configuration.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_config_new(out: *mut *mut SwiptConfig) -> SwiptStatus {
    guard(|| unsafe { put(out, SwiptConfig(ExperimentConfig::default()), "out") })
}

/// Configuration read from a flat `key = value` file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_config_from_file(path: *const c_char, out: *mut *mut SwiptConfig) -> SwiptStatus {
    guard(|| unsafe {
        let path = text(path, "path")?;
        let cfg = ExperimentConfig::from_file(Path::new(path)).map_err(from_error)?;
        put(out, SwiptConfig(cfg), "out")
    })
}

/// Sets one configuration key, e.g. `network.p_th_dbm` to `"45"`.
///
/// # Safety
/// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn swipt_config_set(
    cfg: *mut SwiptConfig,
    key: *const c_char,
    value: *const c_char,
) -> SwiptStatus {
    guard(|| unsafe {
        let cfg = get_mut(cfg, "cfg")?;
        let (key, value) = (text(key, "key")?, text(value, "value")?);
        let mut next = cfg.0.clone();
        next.set(key, value).map_err(from_error)?;
        cfg.0 = next;
        Ok(())
    })
}

/// The configuration in file form.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_config_to_text(cfg: *const SwiptConfig, out: *mut *mut c_char) -> SwiptStatus {
    guard(|| unsafe { put_string(out, get(cfg, "cfg")?.0.to_text()) })
}

/// # Safety
/// `cfg` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn swipt_config_free(cfg: *mut SwiptConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Draws the channel realisation `seed` for the base network of `cfg`.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_channel_generate(
    cfg: *const SwiptConfig,
    seed: u64,
    out: *mut *mut SwiptChannel,
) -> SwiptStatus {
    guard(|| unsafe {
        let cfg = get(cfg, "cfg")?;
        cfg.0.validate().map_err(from_error)?;
        let net = cfg.0.base_network();
        let ch = generate_channel_set(&net, seed).map_err(from_error)?;
        put(out, SwiptChannel { net, ch }, "out")
    })
}

/// Channel realisation parsed from JSON, checked against the base network of `cfg`.
///
/// # Safety
/// `cfg` must be a live handle; `json` a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_channel_from_json(
    cfg: *const SwiptConfig,
    json: *const c_char,
    out: *mut *mut SwiptChannel,
) -> SwiptStatus {
    guard(|| unsafe {
        let cfg = get(cfg, "cfg")?;
        cfg.0.validate().map_err(from_error)?;
        let net = cfg.0.base_network();
        let ch: ChannelSet = serde_json::from_str(text(json, "json")?).map_err(|e| from_error(e.into()))?;
        ch.validate(&net).map_err(from_error)?;
        put(out, SwiptChannel { net, ch }, "out")
    })
}

/// # Safety
/// `ch` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_channel_to_json(ch: *const SwiptChannel, out: *mut *mut c_char) -> SwiptStatus {
    guard(|| unsafe {
        let s = serde_json::to_string(&get(ch, "ch")?.ch).map_err(|e| from_error(e.into()))?;
        put_string(out, s)
    })
}

/// # Safety
/// `ch` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn swipt_channel_free(ch: *mut SwiptChannel) {
    if !ch.is_null() {
        drop(unsafe { Box::from_raw(ch) });
    }
}

/// Runs `scheme` on `ch` with the optimizer settings of `cfg`. An infeasible
/// instance is not an error: the result reports `feasible = false`.
///
/// # Safety
/// `cfg` and `ch` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_solve(
    cfg: *const SwiptConfig,
    ch: *const SwiptChannel,
    scheme: SwiptScheme,
    out: *mut *mut SwiptResult,
) -> SwiptStatus {
    guard(|| unsafe {
        let cfg = get(cfg, "cfg")?;
        let ch = get(ch, "ch")?;
        let scheme = match scheme {
            SwiptScheme::Proposed => Scheme::Proposed,
            SwiptScheme::NoAn => Scheme::NoAn,
            SwiptScheme::Zf => Scheme::Zf,
        };
        let (res, _) = run_scheme(scheme, &ch.ch, &ch.net, &cfg.0.sca).map_err(from_error)?;
        put(out, SwiptResult(res), "out")
    })
}

/// # Safety
/// `res` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_feasible(res: *const SwiptResult, out: *mut bool) -> SwiptStatus {
    guard(|| unsafe {
        *get_mut(out, "out")? = get(res, "res")?.0.feasible;
        Ok(())
    })
}

/// Audited secrecy rate in bit/s/Hz, zero when infeasible.
///
/// # Safety
/// `res` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_secrecy_rate(res: *const SwiptResult, out: *mut f64) -> SwiptStatus {
    guard(|| unsafe {
        *get_mut(out, "out")? = get(res, "res")?.0.secrecy_rate;
        Ok(())
    })
}

/// SCA iterations; zero for the closed-form scheme.
///
/// # Safety
/// `res` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_iterations(res: *const SwiptResult, out: *mut usize) -> SwiptStatus {
    guard(|| unsafe {
        *get_mut(out, "out")? = get(res, "res")?.0.iterations;
        Ok(())
    })
}

/// Largest relative constraint violation of the solution; infinity without one.
///
/// # Safety
/// `res` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_worst_violation(res: *const SwiptResult, out: *mut f64) -> SwiptStatus {
    guard(|| unsafe {
        *get_mut(out, "out")? = get(res, "res")?.0.worst_violation();
        Ok(())
    })
}

/// Copies a beamformer as interleaved `(re, im)` pairs into `buf`. `len` is
/// the capacity of `buf` in doubles; `written` receives the number of doubles
/// needed. Pass a null `buf` to query the length. Fails with
/// `SWIPT_STATUS_INVALID_ARGUMENT` when the result holds no solution.
///
/// # Safety
/// `res` must be a live handle, `buf` valid for `len` writes or null, and
/// `written` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_beamformer(
    res: *const SwiptResult,
    beam: SwiptBeam,
    index: usize,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> SwiptStatus {
    guard(|| unsafe {
        let res = get(res, "res")?;
        let written = get_mut(written, "written")?;
        let sol = res
            .0
            .solution
            .as_ref()
            .ok_or_else(|| (SwiptStatus::InvalidArgument, format!("{} produced no solution", res.0.scheme)))?;
        let v = match beam {
            SwiptBeam::Macro => sol.w_m.get(index).ok_or_else(|| {
                (SwiptStatus::InvalidArgument, format!("macro user {index} out of range 0..{}", sol.w_m.len()))
            })?,
            SwiptBeam::Information => &sol.w_i,
            SwiptBeam::Noise => &sol.v_e,
        };
        *written = 2 * v.len();
        if buf.is_null() {
            return Ok(());
        }
        if len < 2 * v.len() {
            return Err((SwiptStatus::BufferTooSmall, format!("need {} doubles, got {len}", 2 * v.len())));
        }
        let out = std::slice::from_raw_parts_mut(buf, 2 * v.len());
        for (pair, c) in out.chunks_exact_mut(2).zip(v) {
            pair[0] = c.re;
            pair[1] = c.im;
        }
        Ok(())
    })
}

/// The full result, including the constraint audit, as JSON.
///
/// # Safety
/// `res` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_to_json(res: *const SwiptResult, out: *mut *mut c_char) -> SwiptStatus {
    guard(|| unsafe {
        let s = serde_json::to_string(&get(res, "res")?.0).map_err(|e| from_error(e.into()))?;
        put_string(out, s)
    })
}

/// # Safety
/// `res` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn swipt_result_free(res: *mut SwiptResult) {
    if !res.is_null() {
        drop(unsafe { Box::from_raw(res) });
    }
}

/// Runs an experiment and writes `results.csv`, `timings.csv` and
/// `summary.json` into `out_dir`.
///
/// # Safety
/// `cfg` must be a live handle and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn swipt_run_experiment(
    cfg: *const SwiptConfig,
    kind: SwiptExperiment,
    out_dir: *const c_char,
) -> SwiptStatus {
    guard(|| unsafe {
        let cfg = &get(cfg, "cfg")?.0;
        let dir = Path::new(text(out_dir, "out_dir")?);
        let (name, outcome) = match kind {
            SwiptExperiment::Batch => ("run", run_batch(cfg)),
            SwiptExperiment::SweepPower => ("sweep-power", sweep_power(cfg)),
            SwiptExperiment::RuntimeVsK => ("runtime-vs-k", runtime_vs_k(cfg)),
        };
        let outcome = outcome.map_err(from_error)?;
        emit_outputs(dir, &summarize(name, cfg, &outcome), &outcome).map_err(from_error)
    })
}
