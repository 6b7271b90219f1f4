//! C ABI over the estimator.
//!
//! Every fallible call returns a [`NuceftStatus`]; on failure the message
//! is available from [`nuceft_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function. Strings handed
//! out by the library are released with [`nuceft_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nuceft::task::{estimate, CostReport, TaskSpec};
use nuceft::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NuceftStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Unsupported = 5,
    Internal = 6,
    UnknownField = 7,
}

/// A task specification.
pub struct NuceftSpec(TaskSpec);

/// A finished cost report.
pub struct NuceftReport(CostReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> NuceftStatus {
    match e {
        Error::Config(_) => NuceftStatus::Config,
        Error::Unsupported(_) => NuceftStatus::Unsupported,
        Error::Domain(_) | Error::Geometry(_) => NuceftStatus::Domain,
        _ => NuceftStatus::Internal,
    }
}

fn fail(status: NuceftStatus, msg: impl Into<String>) -> NuceftStatus {
    set_error(msg);
    status
}

/// Run `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> NuceftStatus) -> NuceftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(NuceftStatus::Internal, "panic inside nuceft"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, NuceftStatus> {
    if p.is_null() {
        return Err(fail(NuceftStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NuceftStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn parse_enum<T: serde::de::DeserializeOwned>(field: &str, v: &str) -> Result<T, NuceftStatus> {
    serde_json::from_value(serde_json::Value::String(v.to_string()))
        .map_err(|_| fail(NuceftStatus::Config, format!("invalid {field} {v:?}")))
}

fn give<T>(out: *mut *mut T, v: T) -> NuceftStatus {
    unsafe { *out = Box::into_raw(Box::new(v)) };
    NuceftStatus::Ok
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn nuceft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn nuceft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a JSON task specification (the same shape the report echoes).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nuceft_spec_from_json(json: *const c_char, out: *mut *mut NuceftSpec) -> NuceftStatus {
    guard(|| {
        if out.is_null() {
            return fail(NuceftStatus::NullPointer, "null out pointer");
        }
        let text = match read_str(json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match serde_json::from_str::<TaskSpec>(text) {
            Ok(spec) => give(out, NuceftSpec(spec)),
            Err(e) => fail(NuceftStatus::Config, format!("spec: {e}")),
        }
    })
}

/// The crossing-time reference specification for `model` ("pionless",
/// "ope", "dynpi"), `encoding` ("vc", "compact", "jw") and `convention`
/// ("near-term", "fault-tolerant").
///
/// # Safety
/// String arguments must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nuceft_spec_reference(
    model: *const c_char,
    encoding: *const c_char,
    convention: *const c_char,
    out: *mut *mut NuceftSpec,
) -> NuceftStatus {
    guard(|| {
        if out.is_null() {
            return fail(NuceftStatus::NullPointer, "null out pointer");
        }
        let parsed = (|| {
            let m = parse_enum("model", read_str(model)?)?;
            let e = parse_enum("encoding", read_str(encoding)?)?;
            let c = parse_enum("convention", read_str(convention)?)?;
            Ok::<_, NuceftStatus>(TaskSpec::crossing_reference(m, e, c))
        })();
        match parsed {
            Ok(spec) => give(out, NuceftSpec(spec)),
            Err(s) => s,
        }
    })
}

/// Set a numeric field: "eta", "eps", "a_fm", "L", "order", "e_kin",
/// "delta_e", "e_max", "success_prob", "ell" or "n_b".
///
/// # Safety
/// `spec` must come from this library; `field` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn nuceft_spec_set(spec: *mut NuceftSpec, field: *const c_char, value: f64) -> NuceftStatus {
    guard(|| {
        let Some(NuceftSpec(s)) = spec.as_mut() else {
            return fail(NuceftStatus::NullPointer, "null spec");
        };
        let name = match read_str(field) {
            Ok(n) => n,
            Err(st) => return st,
        };
        let count = |v: f64| (v >= 0.0 && v.fract() == 0.0).then_some(v);
        let bad = || fail(NuceftStatus::Domain, format!("{name} must be a nonnegative integer, got {value}"));
        match name {
            "eta" => s.eta = value,
            "eps" => s.eps = value,
            "a_fm" => s.a_fm = value,
            "e_kin" => s.e_kin = Some(value),
            "delta_e" => s.delta_e = Some(value),
            "e_max" => s.e_max = value,
            "success_prob" => s.success_prob = Some(value),
            "L" => match count(value) {
                Some(v) => s.l = v as usize,
                None => return bad(),
            },
            "order" => match count(value) {
                Some(v) => s.order = v as u32,
                None => return bad(),
            },
            "ell" => match count(value) {
                Some(v) => s.ell = Some(v as usize),
                None => return bad(),
            },
            "n_b" => match count(value) {
                Some(v) => s.n_b = Some(v as u32),
                None => return bad(),
            },
            _ => return fail(NuceftStatus::UnknownField, format!("unknown field {name:?}")),
        }
        NuceftStatus::Ok
    })
}

/// # Safety
/// `spec` must come from this library (or be null) and not be used after.
#[no_mangle]
pub unsafe extern "C" fn nuceft_spec_free(spec: *mut NuceftSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Run the estimator.
///
/// # Safety
/// `spec` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nuceft_estimate(spec: *const NuceftSpec, out: *mut *mut NuceftReport) -> NuceftStatus {
    guard(|| {
        let Some(NuceftSpec(s)) = spec.as_ref() else {
            return fail(NuceftStatus::NullPointer, "null spec");
        };
        if out.is_null() {
            return fail(NuceftStatus::NullPointer, "null out pointer");
        }
        match estimate(s) {
            Ok(r) => give(out, NuceftReport(r)),
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Scalar summary of a report. Absent quantities are NaN (T count under
/// the near-term convention) or 0 (register widths).
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NuceftSummary {
    pub r: f64,
    pub total_steps: f64,
    pub depth: f64,
    pub rz: f64,
    pub t_count: f64,
    pub qubits: u64,
    pub step_depth: u64,
    pub ell: u64,
    pub n_b: u32,
}

/// # Safety
/// `report` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nuceft_report_summary(report: *const NuceftReport, out: *mut NuceftSummary) -> NuceftStatus {
    guard(|| {
        let (Some(NuceftReport(r)), Some(o)) = (report.as_ref(), out.as_mut()) else {
            return fail(NuceftStatus::NullPointer, "null report or out pointer");
        };
        *o = NuceftSummary {
            r: r.r,
            total_steps: r.total_steps,
            depth: r.depth_total,
            rz: r.rz_total,
            t_count: r.t_count.unwrap_or(f64::NAN),
            qubits: r.qubits,
            step_depth: r.step.depth_2q,
            ell: r.ell.unwrap_or(0) as u64,
            n_b: r.n_b.unwrap_or(0),
        };
        NuceftStatus::Ok
    })
}

/// The full report as JSON; release with [`nuceft_string_free`].
///
/// # Safety
/// `report` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nuceft_report_json(report: *const NuceftReport, out: *mut *mut c_char) -> NuceftStatus {
    guard(|| {
        let Some(NuceftReport(r)) = report.as_ref() else {
            return fail(NuceftStatus::NullPointer, "null report");
        };
        if out.is_null() {
            return fail(NuceftStatus::NullPointer, "null out pointer");
        }
        match serde_json::to_string(r).map(CString::new) {
            Ok(Ok(s)) => {
                *out = s.into_raw();
                NuceftStatus::Ok
            }
            _ => fail(NuceftStatus::Internal, "report serialisation failed"),
        }
    })
}

/// # Safety
/// `report` must come from this library (or be null) and not be used after.
#[no_mangle]
pub unsafe extern "C" fn nuceft_report_free(report: *mut NuceftReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be a string returned by this library (or null).
#[no_mangle]
pub unsafe extern "C" fn nuceft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
