//! C ABI over the `vtype-cavity` pipeline.
//!
//! Every fallible call returns a [`VcStatus`]; on failure the message is kept
//! per thread and can be read with [`vc_last_error_message`]. Handles are
//! opaque and must be released with the matching `_free` function. Strings
//! returned through out-pointers are owned by the caller and released with
//! [`vc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vtype_cavity::density::{AC, BC, CA, CC};
use vtype_cavity::sweep::{run, run_preset, write_csv, Pipeline, Table};
use vtype_cavity::{
    parse_scenario, AmplitudeSet, Error, MeasurementStrengths, Normalization, SystemParams, C64,
};

/// Number of entries in an exported 9x9 density matrix.
pub const VC_DENSITY_LEN: usize = 81;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidUtf8 = 3,
    Config = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VcNormalization {
    Unnormalized = 0,
    Immediate = 1,
}

impl From<VcNormalization> for Normalization {
    fn from(n: VcNormalization) -> Self {
        match n {
            VcNormalization::Unnormalized => Normalization::Unnormalized,
            VcNormalization::Immediate => Normalization::Immediate,
        }
    }
}

/// Inputs for one simulation. Rates are in the same units as `gamma0`.
///
/// The initial state is `c2a |C1 A2> + c1b |B1 C2>`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VcParams {
    pub gamma0: f64,
    pub kappa: f64,
    pub theta: f64,
    pub delta: f64,
    pub p: f64,
    pub p_r: f64,
    pub c2a_re: f64,
    pub c2a_im: f64,
    pub c1b_re: f64,
    pub c1b_im: f64,
    pub normalization: VcNormalization,
}

/// Scalar outputs at one time. Populations use the 1-based labels of the
/// nine-state basis `|CC>, |CB>, |CA>, |BC>, ..., |AA>`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VcObservation {
    pub t: f64,
    pub negativity: f64,
    pub success_prob: f64,
    pub rho11: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho77: f64,
    pub coherence34_abs: f64,
}

/// Opaque simulation handle.
pub struct VcSimulation {
    pipeline: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> VcStatus {
    match err {
        Error::InvalidParameter { .. } | Error::AmplitudeNorm { .. } => VcStatus::InvalidParameter,
        Error::Config(_) => VcStatus::Config,
        Error::Io { .. } => VcStatus::Io,
        Error::AtPoint { source, .. } => status_of(source),
        _ => VcStatus::Numerical,
    }
}

struct Failure(VcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_last_error();
            VcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            VcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(VcStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(VcStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

fn csv_string(table: &Table) -> Result<CString, Failure> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).map_err(|e| Failure(VcStatus::Io, e.to_string()))?;
    CString::new(buf).map_err(|e| Failure(VcStatus::Io, e.to_string()))
}

/// Parameters for a Bell initial state with no measurement.
#[no_mangle]
pub extern "C" fn vc_params_default() -> VcParams {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    VcParams {
        gamma0: 1.0,
        kappa: 1.0,
        theta: 0.0,
        delta: 0.0,
        p: 0.0,
        p_r: 0.0,
        c2a_re: h,
        c2a_im: 0.0,
        c1b_re: h,
        c1b_im: 0.0,
        normalization: VcNormalization::Unnormalized,
    }
}

/// Creates a simulation. On success `*out` owns a new handle.
///
/// # Safety
/// `params` must point to a valid `VcParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vc_simulation_new(
    params: *const VcParams,
    out: *mut *mut VcSimulation,
) -> VcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let system = SystemParams::new(p.gamma0, p.kappa, p.theta, p.delta)?;
        let strengths = MeasurementStrengths::new(p.p, p.p_r)?;
        let init =
            AmplitudeSet::initial(C64::new(p.c2a_re, p.c2a_im), C64::new(p.c1b_re, p.c1b_im));
        let pipeline = Pipeline::new(system, strengths, &init, p.normalization.into())?;
        *out = Box::into_raw(Box::new(VcSimulation { pipeline }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from [`vc_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vc_simulation_free(sim: *mut VcSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Evaluates the pipeline at time `t`.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vc_simulation_observe(
    sim: *const VcSimulation,
    t: f64,
    out: *mut VcObservation,
) -> VcStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let obs = sim.pipeline.observe(t)?;
        let s = &obs.state;
        *out = VcObservation {
            t,
            negativity: obs.negativity,
            success_prob: obs.success_probability,
            rho11: s.get(CC, CC).re,
            rho33: s.get(CA, CA).re,
            rho44: s.get(BC, BC).re,
            rho77: s.get(AC, AC).re,
            coherence34_abs: s.get(CA, BC).norm(),
        };
        Ok(())
    })
}

/// Writes the normalized post-reversal density matrix at `t`, row-major,
/// into `re` and `im`, each of length `len >= VC_DENSITY_LEN`.
///
/// # Safety
/// `sim` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vc_simulation_density(
    sim: *const VcSimulation,
    t: f64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> VcStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        if len < VC_DENSITY_LEN {
            return Err(Failure(
                VcStatus::BufferTooSmall,
                format!("need {VC_DENSITY_LEN} entries, got {len}"),
            ));
        }
        let obs = sim.pipeline.observe(t)?;
        let re = std::slice::from_raw_parts_mut(re, VC_DENSITY_LEN);
        let im = std::slice::from_raw_parts_mut(im, VC_DENSITY_LEN);
        for i in 0..9 {
            for j in 0..9 {
                let z = obs.state.get(i, j);
                re[9 * i + j] = z.re;
                im[9 * i + j] = z.im;
            }
        }
        Ok(())
    })
}

/// Runs a built-in preset and returns its CSV in `*csv_out`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `csv_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vc_run_preset(
    name: *const c_char,
    normalization: VcNormalization,
    csv_out: *mut *mut c_char,
) -> VcStatus {
    guard(|| {
        if csv_out.is_null() {
            return Err(null("csv_out"));
        }
        *csv_out = ptr::null_mut();
        let name = read_str(name, "name")?;
        let table = run_preset(name, normalization.into(), false)?;
        *csv_out = csv_string(&table)?.into_raw();
        Ok(())
    })
}

/// Runs a scenario given as config text and returns its CSV in `*csv_out`.
/// The normalization argument overrides any value implied by the text.
///
/// # Safety
/// `config` must be a NUL-terminated string; `csv_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vc_run_config(
    config: *const c_char,
    normalization: VcNormalization,
    csv_out: *mut *mut c_char,
) -> VcStatus {
    guard(|| {
        if csv_out.is_null() {
            return Err(null("csv_out"));
        }
        *csv_out = ptr::null_mut();
        let text = read_str(config, "config")?;
        let mut cfg = parse_scenario(text).map_err(Error::from)?;
        cfg.normalization = normalization.into();
        cfg.output_path = None;
        *csv_out = csv_string(&run(&cfg)?)?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn vc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
