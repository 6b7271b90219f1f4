use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use nuceft_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(nuceft_last_error()) }.to_string_lossy().into_owned()
}

fn reference(model: &str, conv: &str) -> *mut NuceftSpec {
    let mut spec = ptr::null_mut();
    let st = unsafe { nuceft_spec_reference(c(model).as_ptr(), c("vc").as_ptr(), c(conv).as_ptr(), &mut spec) };
    assert_eq!(st, NuceftStatus::Ok);
    spec
}

fn summary(spec: *const NuceftSpec) -> NuceftSummary {
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { nuceft_estimate(spec, &mut rep) }, NuceftStatus::Ok, "{}", last_error());
    let mut s = NuceftSummary::default();
    assert_eq!(unsafe { nuceft_report_summary(rep, &mut s) }, NuceftStatus::Ok);
    unsafe { nuceft_report_free(rep) };
    s
}

#[test]
fn reference_estimate_matches_core() {
    let spec = reference("pionless", "fault-tolerant");
    let s = summary(spec);
    let core = nuceft::task::estimate(&nuceft::task::TaskSpec::crossing_reference(
        nuceft::models::ModelKind::Pionless,
        nuceft::encodings::Encoding::VerstraeteCirac,
        nuceft::trotter::Convention::FaultTolerant,
    ))
    .unwrap();
    assert_eq!(s.depth, core.depth_total);
    assert_eq!(s.t_count, core.t_count.unwrap());
    assert_eq!((s.qubits, s.step_depth), (6000, 520));
    unsafe { nuceft_spec_free(spec) };

    let nt = reference("pionless", "near-term");
    assert!(summary(nt).t_count.is_nan());
    unsafe { nuceft_spec_free(nt) };
}

#[test]
fn setters_and_json() {
    let spec = reference("ope", "near-term");
    let base = summary(spec).r;
    assert_eq!(unsafe { nuceft_spec_set(spec, c("eta").as_ptr(), 10.0) }, NuceftStatus::Ok);
    assert!(summary(spec).r < base);
    assert_eq!(unsafe { nuceft_spec_set(spec, c("ell").as_ptr(), 3.0) }, NuceftStatus::Ok);
    assert_eq!(summary(spec).ell, 3);
    assert_eq!(unsafe { nuceft_spec_set(spec, c("ell").as_ptr(), 2.5) }, NuceftStatus::Domain);
    assert_eq!(unsafe { nuceft_spec_set(spec, c("colour").as_ptr(), 1.0) }, NuceftStatus::UnknownField);
    assert!(last_error().contains("colour"));

    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { nuceft_estimate(spec, &mut rep) }, NuceftStatus::Ok);
    let mut js = ptr::null_mut();
    assert_eq!(unsafe { nuceft_report_json(rep, &mut js) }, NuceftStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(js) }.to_str().unwrap()).unwrap();
    assert_eq!(v["ell"], 3);
    assert_eq!(v["schema_version"], 1);
    unsafe {
        nuceft_string_free(js);
        nuceft_report_free(rep);
        nuceft_spec_free(spec);
    }
}

#[test]
fn error_codes() {
    let mut spec = ptr::null_mut();
    let bad = unsafe { nuceft_spec_reference(c("quarks").as_ptr(), c("vc").as_ptr(), c("near-term").as_ptr(), &mut spec) };
    assert_eq!(bad, NuceftStatus::Config);
    assert!(spec.is_null());
    assert_eq!(unsafe { nuceft_spec_from_json(c("{\"eta\": 1}").as_ptr(), &mut spec) }, NuceftStatus::Config);
    assert_eq!(unsafe { nuceft_spec_from_json(ptr::null(), &mut spec) }, NuceftStatus::NullPointer);
    let bytes = [0xffu8, 0];
    assert_eq!(unsafe { nuceft_spec_from_json(bytes.as_ptr().cast(), &mut spec) }, NuceftStatus::InvalidUtf8);

    let dyn_spec = reference("dynpi", "near-term");
    unsafe { nuceft_spec_set(dyn_spec, c("a_fm").as_ptr(), 1.4) };
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { nuceft_estimate(dyn_spec, &mut rep) }, NuceftStatus::Domain);
    assert!(rep.is_null() && !last_error().is_empty());
    unsafe { nuceft_spec_set(dyn_spec, c("order").as_ptr(), 2.0) };
    unsafe { nuceft_spec_set(dyn_spec, c("a_fm").as_ptr(), 2.2) };
    assert_eq!(unsafe { nuceft_estimate(dyn_spec, &mut rep) }, NuceftStatus::Unsupported);
    unsafe { nuceft_spec_free(dyn_spec) };
    assert_eq!(unsafe { nuceft_estimate(ptr::null(), &mut rep) }, NuceftStatus::NullPointer);
    unsafe {
        nuceft_spec_free(ptr::null_mut());
        nuceft_report_free(ptr::null_mut());
        nuceft_string_free(ptr::null_mut());
    }
}

#[test]
fn json_spec_round_trip() {
    let spec = nuceft::task::TaskSpec::qpe_reference(
        nuceft::models::ModelKind::Pionless,
        nuceft::encodings::Encoding::VerstraeteCirac,
        nuceft::trotter::Convention::NearTerm,
    );
    let text = c(&serde_json::to_string(&spec).unwrap());
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nuceft_spec_from_json(text.as_ptr(), &mut h) }, NuceftStatus::Ok);
    let s = summary(h);
    assert_eq!(s.step_depth, 630);
    assert_eq!(s.qubits, 6001);
    unsafe { nuceft_spec_free(h) };
    assert_eq!(unsafe { CStr::from_ptr(nuceft_version()) }.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

const C_SMOKE: &str = r#"
#include <math.h>
#include <stdio.h>
#include "nuceft.h"

int main(void) {
    NuceftSpec *spec = NULL;
    NuceftReport *rep = NULL;
    NuceftSummary s;
    if (nuceft_spec_reference("pionless", "compact", "near-term", &spec) != NUCEFT_STATUS_OK) return 1;
    if (nuceft_estimate(spec, &rep) != NUCEFT_STATUS_OK) return 2;
    if (nuceft_report_summary(rep, &s) != NUCEFT_STATUS_OK) return 3;
    if (s.qubits != 10000 || s.step_depth != 68 || !isnan(s.t_count)) return 4;
    if (nuceft_spec_set(spec, "nope", 1.0) != NUCEFT_STATUS_UNKNOWN_FIELD) return 5;
    printf("%.6e\n", s.depth);
    nuceft_report_free(rep);
    nuceft_spec_free(spec);
    return 0;
}
"#;

/// Compile a C program against the generated header and the static library.
#[test]
fn c_program_links() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include/nuceft.h");
    assert!(std::fs::read_to_string(&header).unwrap().contains("nuceft_estimate"));
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, header check only");
        return;
    };
    // the test binary lives in target/<profile>/deps; the static library one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = lib_dir.join("libnuceft_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, header check only", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_SMOKE).unwrap();
    let bin = dir.path().join("smoke");
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(root.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let depth: f64 = String::from_utf8_lossy(&run.stdout).trim().parse().unwrap();
    assert!(depth > 1e7 && depth < 1e9);
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
