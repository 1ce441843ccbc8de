//! C ABI over the wiretrack simulator.
//!
//! Every fallible call returns a [`WtStatus`]; on failure a description is
//! available from [`wt_last_error_message`] on the same thread. Objects are
//! opaque handles created by `*_load`/`*_parse`/`wt_run` and released with
//! the matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use wiretrack::error::Error;
use wiretrack::harness::{
    emit_csv, load_scenario, parse_scenario, run_simulation, Event, RunReport, TraceRecord,
};
use wiretrack::oracle::sweep_argmax;
use wiretrack::{Phase, PowerSource, Scenario, Strategy};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Invalid = 3,
    Domain = 4,
    Io = 5,
    Runtime = 6,
    Index = 7,
    Utf8 = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtStrategy {
    Sts = 0,
    Fixed = 1,
    FullSweep = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtPhase {
    Sleep = 0,
    Searching = 1,
    Monitoring = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtEvent {
    Measure = 0,
    MoveStart = 1,
    MoveEnd = 2,
    TrialStart = 3,
    TrialEnd = 4,
    Retrigger = 5,
    Sleep = 6,
    Wake = 7,
    Clamp = 8,
    Saturation = 9,
}

/// A parsed, validated scenario.
pub struct WtScenario(Scenario);

/// A finished run: its report and full trace.
pub struct WtRun {
    report: RunReport,
    trace: Vec<TraceRecord>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WtSweep {
    pub x_star_m: f64,
    pub p_star_w: f64,
    pub grid_delta_m: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WtReport {
    pub trials: usize,
    pub final_g_best_w: f64,
    pub final_x_best_m: f64,
    pub harvested_j: f64,
    pub consumed_j: f64,
    pub clamp_overflow_j: f64,
    pub clamp_deficit_j: f64,
    pub net_j: f64,
    pub initial_charge_j: f64,
    pub final_charge_j: f64,
    pub distance_m: f64,
    pub end_t_s: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WtTraceRow {
    pub t_s: f64,
    pub x_m: f64,
    pub phase: WtPhase,
    pub event: WtEvent,
    pub p_w: f64,
    pub g_best_w: f64,
    pub x_best_m: f64,
    pub inertia: f64,
    pub dx_m: f64,
    /// +1 forward, -1 backward.
    pub direction: i8,
    pub charge_j: f64,
    pub odometer_m: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(WtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } | Error::UnknownKey { .. } => WtStatus::Parse,
            Error::Invalid { .. } => WtStatus::Invalid,
            Error::OutOfDomain { .. } => WtStatus::Domain,
            Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => WtStatus::Io,
            _ => WtStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(WtStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, record any failure for [`wt_last_error_message`], never unwind.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            WtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            WtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(WtStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next `wt_*` call on this thread.
#[no_mangle]
pub extern "C" fn wt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load and validate a scenario file. On success `*out` owns a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_load(
    path: *const c_char,
    out: *mut *mut WtScenario,
) -> WtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let s = load_scenario(path)?;
        *out = Box::into_raw(Box::new(WtScenario(s)));
        Ok(())
    })
}

/// Parse and validate scenario text. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_parse(
    text: *const c_char,
    out: *mut *mut WtScenario,
) -> WtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let s = parse_scenario(text, "<memory>")?;
        *out = Box::into_raw(Box::new(WtScenario(s)));
        Ok(())
    })
}

/// Release a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_free(scenario: *mut WtScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_set_seed(scenario: *mut WtScenario, seed: u64) -> WtStatus {
    guard(|| {
        out_arg(scenario, "scenario")?.0.seed = seed;
        Ok(())
    })
}

/// Select the strategy by its [`WtStrategy`] value.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_set_strategy(
    scenario: *mut WtScenario,
    strategy: u32,
) -> WtStatus {
    guard(|| {
        let s = out_arg(scenario, "scenario")?;
        s.0.strategy = match strategy {
            x if x == WtStrategy::Sts as u32 => Strategy::Sts,
            x if x == WtStrategy::Fixed as u32 => Strategy::Fixed,
            x if x == WtStrategy::FullSweep as u32 => Strategy::FullSweep,
            other => {
                return Err(Failure(
                    WtStatus::Invalid,
                    format!("unknown strategy value {other}"),
                ));
            }
        };
        Ok(())
    })
}

/// Wire length of the scenario in metres.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_scenario_length_m(
    scenario: *const WtScenario,
    out: *mut f64,
) -> WtStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        *out_arg(out, "out")? = s.0.span.length_m;
        Ok(())
    })
}

/// Power available to the panel at `x_m` (metres along the wire) and `t_s`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_available_power(
    scenario: *const WtScenario,
    x_m: f64,
    t_s: f64,
    out: *mut f64,
) -> WtStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let out = out_arg(out, "out")?;
        *out = s.0.field()?.available_power(x_m, t_s)?;
        Ok(())
    })
}

/// Grid argmax of the field at `t_s` with spacing `delta_m`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_sweep_argmax(
    scenario: *const WtScenario,
    t_s: f64,
    delta_m: f64,
    out: *mut WtSweep,
) -> WtStatus {
    guard(|| {
        let s = ref_arg(scenario, "scenario")?;
        let out = out_arg(out, "out")?;
        let r = sweep_argmax(&s.0.field()?, t_s, delta_m)?;
        *out = WtSweep {
            x_star_m: r.x_star_m,
            p_star_w: r.p_star_w,
            grid_delta_m: r.grid_delta_m,
        };
        Ok(())
    })
}

/// Simulate the scenario with its current seed and strategy.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_run(scenario: *const WtScenario, out: *mut *mut WtRun) -> WtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = ref_arg(scenario, "scenario")?;
        let mut trace = Vec::new();
        let report = run_simulation(&s.0, &mut trace)?;
        *out = Box::into_raw(Box::new(WtRun { report, trace }));
        Ok(())
    })
}

/// Release a run. Null is ignored.
///
/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wt_run_free(run: *mut WtRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_run_report(run: *const WtRun, out: *mut WtReport) -> WtStatus {
    guard(|| {
        let r = &ref_arg(run, "run")?.report;
        *out_arg(out, "out")? = WtReport {
            trials: r.trials,
            final_g_best_w: r.final_g_best_w,
            final_x_best_m: r.final_x_best_m,
            harvested_j: r.harvested_j,
            consumed_j: r.consumed_j,
            clamp_overflow_j: r.clamp_overflow_j,
            clamp_deficit_j: r.clamp_deficit_j,
            net_j: r.net_j,
            initial_charge_j: r.initial_charge_j,
            final_charge_j: r.final_charge_j,
            distance_m: r.distance_m,
            end_t_s: r.end_t_s,
        };
        Ok(())
    })
}

/// Number of trace rows, 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wt_run_trace_len(run: *const WtRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.len())
}

/// Copy trace row `index` into `*out`.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_run_trace_row(
    run: *const WtRun,
    index: usize,
    out: *mut WtTraceRow,
) -> WtStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let out = out_arg(out, "out")?;
        let r = run.trace.get(index).ok_or_else(|| {
            Failure(
                WtStatus::Index,
                format!(
                    "row {index} out of range for a trace of {} rows",
                    run.trace.len()
                ),
            )
        })?;
        *out = WtTraceRow {
            t_s: r.t_s,
            x_m: r.x_m,
            phase: match r.phase {
                Phase::Sleep => WtPhase::Sleep,
                Phase::Searching => WtPhase::Searching,
                Phase::Monitoring => WtPhase::Monitoring,
            },
            event: match r.event {
                Event::Measure => WtEvent::Measure,
                Event::MoveStart => WtEvent::MoveStart,
                Event::MoveEnd => WtEvent::MoveEnd,
                Event::TrialStart => WtEvent::TrialStart,
                Event::TrialEnd => WtEvent::TrialEnd,
                Event::Retrigger => WtEvent::Retrigger,
                Event::Sleep => WtEvent::Sleep,
                Event::Wake => WtEvent::Wake,
                Event::Clamp => WtEvent::Clamp,
                Event::Saturation => WtEvent::Saturation,
            },
            p_w: r.p_w,
            g_best_w: r.g_best_w,
            x_best_m: r.x_best_m,
            inertia: r.inertia,
            dx_m: r.dx_m,
            direction: r.direction,
            charge_j: r.charge_j,
            odometer_m: r.odometer_m,
        };
        Ok(())
    })
}

/// Write the trace as CSV.
///
/// # Safety
/// `run` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wt_run_write_csv(run: *const WtRun, path: *const c_char) -> WtStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let path = PathBuf::from(str_arg(path, "path")?);
        emit_csv(&run.trace, path)?;
        Ok(())
    })
}

/// Write the run report as JSON.
///
/// # Safety
/// `run` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wt_run_write_report(run: *const WtRun, path: *const c_char) -> WtStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        run.report.write(str_arg(path, "path")?)?;
        Ok(())
    })
}
