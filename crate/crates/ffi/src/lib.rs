//! C bindings for `qnet-core`.
//!
//! Networks and schedules are opaque handles created and destroyed through
//! this API. Every fallible call returns a [`QnetStatus`]; on failure the
//! message is available from [`qnet_last_error_message`] on the same thread.
//! Strings returned by the library are released with [`qnet_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qnet_core::colgen::{solve_with_catalog, SolveOptions, SolveReport};
use qnet_core::error::{Error, ErrorClass};
use qnet_core::gen::{generate_batch, GenSpec};
use qnet_core::io::{LoadedNetwork, NetworkFile, ScheduleFile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QnetStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Resource = 5,
    Solver = 6,
    Panic = 7,
}

/// A validated network with its path catalog and link set.
pub struct QnetNetwork {
    inner: LoadedNetwork,
}

/// A solved schedule.
pub struct QnetSchedule {
    report: SolveReport,
    file: ScheduleFile,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnetSolveOptions {
    pub max_iterations: usize,
    pub pricing_node_budget: u64,
    pub termination_rel: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: QnetStatus, message: impl Into<String>) -> QnetStatus {
    set_error(message.into());
    status
}

fn from_core(e: Error) -> QnetStatus {
    let status = match e.class() {
        ErrorClass::Parse => QnetStatus::Parse,
        ErrorClass::Validation => QnetStatus::Validation,
        ErrorClass::Resource => QnetStatus::Resource,
        ErrorClass::Solver => QnetStatus::Solver,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> QnetStatus) -> QnetStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(QnetStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, QnetStatus> {
    if s.is_null() {
        return Err(fail(QnetStatus::NullArgument, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(QnetStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("JSON output has no interior nul")
        .into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn qnet_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |c| c.as_ptr())
    })
}

#[no_mangle]
pub extern "C" fn qnet_solve_options_default() -> QnetSolveOptions {
    let d = SolveOptions::default();
    QnetSolveOptions {
        max_iterations: d.max_iterations,
        pricing_node_budget: d.pricing_node_budget,
        termination_rel: d.termination_rel,
    }
}

/// Parses and validates a network document. `path_cap` of 0 selects the
/// default cap.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qnet_network_from_json(
    json: *const c_char,
    path_cap: usize,
    out: *mut *mut QnetNetwork,
) -> QnetStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QnetStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cap = if path_cap == 0 {
            qnet_core::DEFAULT_PATH_CAP
        } else {
            path_cap
        };
        match NetworkFile::from_json(text).and_then(|f| LoadedNetwork::load(&f, cap)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(QnetNetwork { inner }));
                QnetStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `network` must be null or a handle from [`qnet_network_from_json`] not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn qnet_network_free(network: *mut QnetNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// # Safety
/// `network` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qnet_network_path_count(network: *const QnetNetwork) -> usize {
    network.as_ref().map_or(0, |n| n.inner.catalog.len())
}

/// # Safety
/// `network` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qnet_network_link_count(network: *const QnetNetwork) -> usize {
    network.as_ref().map_or(0, |n| n.inner.links.len())
}

/// Runs column generation. A null `options` selects the defaults.
///
/// # Safety
/// `network` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qnet_solve(
    network: *const QnetNetwork,
    options: *const QnetSolveOptions,
    out: *mut *mut QnetSchedule,
) -> QnetStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QnetStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(network) = network.as_ref() else {
            return fail(QnetStatus::NullArgument, "network is null");
        };
        let o = options.as_ref().copied().unwrap_or_else(|| qnet_solve_options_default());
        let opts = SolveOptions {
            max_iterations: o.max_iterations,
            pricing_node_budget: o.pricing_node_budget,
            termination_rel: o.termination_rel,
            ..SolveOptions::default()
        };
        let net = &network.inner;
        match solve_with_catalog(&net.catalog, &net.links, &opts) {
            Ok(report) => {
                let file = ScheduleFile::from_report(net, &report);
                *out = Box::into_raw(Box::new(QnetSchedule { report, file }));
                QnetStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `schedule` must be null or a handle from [`qnet_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qnet_schedule_free(schedule: *mut QnetSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Max-min weighted rate of the schedule, or NaN for a null handle.
///
/// # Safety
/// `schedule` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qnet_schedule_objective(schedule: *const QnetSchedule) -> f64 {
    schedule.as_ref().map_or(f64::NAN, |s| s.report.objective())
}

/// # Safety
/// `schedule` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qnet_schedule_iterations(schedule: *const QnetSchedule) -> usize {
    schedule.as_ref().map_or(0, |s| s.report.iterations)
}

/// Schedule document as JSON, or null for a null handle. Free with
/// [`qnet_string_free`].
///
/// # Safety
/// `schedule` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qnet_schedule_to_json(schedule: *const QnetSchedule) -> *mut c_char {
    match schedule.as_ref() {
        Some(s) => into_c_string(s.file.to_json()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Link weight of a path with the given total attenuation (dB) and priority.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qnet_path_weight(
    attenuation_db: f64,
    priority: f64,
    out: *mut f64,
) -> QnetStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QnetStatus::NullArgument, "out is null");
        }
        match qnet_core::path_weight(Some(attenuation_db), priority) {
            Ok(w) => {
                *out = w;
                QnetStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Generates a random network from a generator spec in JSON and writes the
/// network document to `out`. Free it with [`qnet_string_free`].
///
/// # Safety
/// `spec_json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qnet_generate_json(
    spec_json: *const c_char,
    out: *mut *mut c_char,
) -> QnetStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QnetStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(spec_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec: GenSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => return fail(QnetStatus::Parse, e.to_string()),
        };
        match generate_batch(&spec, 1) {
            Ok(batch) => {
                let doc = NetworkFile::from_graph(&batch.instances[0].graph).to_json();
                *out = into_c_string(doc);
                QnetStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}
