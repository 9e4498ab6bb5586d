use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use bloch_atlas_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ba_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn pair_round_trip() {
    let mut h = ptr::null_mut();
    let d = c("2x2");
    unsafe {
        assert_eq!(ba_analyze_pair(4, 3, 6, d.as_ptr(), false, &mut h), BaStatus::Ok);
        let mut m = BaMeasures::default();
        assert_eq!(ba_scenario_measures(h, &mut m), BaStatus::Ok);
        assert!((m.total - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-9);
        assert!((m.probability - 0.5f64.sqrt()).abs() < 1e-9);
        assert_eq!(ba_scenario_condition_count(h), 1);
        let mut v = 0.0;
        assert_eq!(ba_scenario_condition_measure(h, 0, &mut v), BaStatus::Ok);
        assert!((v - m.joint).abs() < 1e-15);
        assert_eq!(ba_scenario_condition_measure(h, 1, &mut v), BaStatus::InvalidArgument);
        let mut b = BaBoundary::default();
        assert_eq!(ba_scenario_boundary(h, &mut b), BaStatus::InvalidArgument);
        assert!(last_error().contains("boundary"));
        let json = ba_scenario_to_json(h);
        assert!(!json.is_null());
        let parsed: bloch_atlas::ScenarioResult = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(parsed.gens, vec![3, 6]);
        ba_string_free(json);
        ba_scenario_free(h);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(
            ba_analyze_pair(4, 3, 3, c("2x2").as_ptr(), false, &mut h),
            BaStatus::InvalidArgument
        );
        assert!(h.is_null());
        assert!(last_error().contains("duplicate"));
        assert_eq!(
            ba_analyze_pair(4, 3, 6, ptr::null(), false, &mut h),
            BaStatus::NullPointer
        );
        assert_eq!(
            ba_analyze_pair(4, 3, 6, c("7x7").as_ptr(), false, &mut h),
            BaStatus::InvalidArgument
        );
        assert_eq!(
            ba_analyze_pair(4, 3, 6, c("2x2").as_ptr(), false, ptr::null_mut()),
            BaStatus::NullPointer
        );
        assert_eq!(
            ba_scenario_measures(ptr::null(), &mut BaMeasures::default()),
            BaStatus::NullPointer
        );
        let mut cmp = BaComparison::default();
        assert_eq!(
            ba_compare_table(c("no_such_table").as_ptr(), 1e-6, 1, &mut cmp),
            BaStatus::InvalidArgument
        );
        // null handles are accepted by the free functions
        ba_scenario_free(ptr::null_mut());
        ba_class_table_free(ptr::null_mut());
        ba_string_free(ptr::null_mut());
    }
}

#[test]
fn triad_with_surface() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(
            ba_analyze_triad(4, 10, 12, 13, c("2x2").as_ptr(), false, &mut h),
            BaStatus::Ok
        );
        let mut m = BaMeasures::default();
        ba_scenario_measures(h, &mut m);
        assert!((m.total - std::f64::consts::PI / 6.0).abs() < 1e-6);
        ba_scenario_free(h);
    }
}

#[test]
fn enumeration_and_comparison() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(ba_enumerate(4, c("2x2").as_ptr(), 2, &mut t), BaStatus::Ok);
        assert_eq!(ba_class_table_len(t), 5);
        assert_eq!(ba_class_table_trivial_count(t), 93);
        let mut cl = BaClass::default();
        let mut cm = BaClassMeasures::default();
        assert_eq!(ba_class_table_get(t, 0, &mut cl, &mut cm), BaStatus::Ok);
        assert_eq!((cl.representative_a, cl.representative_b, cl.count), (3, 6, 4));
        assert_eq!(ba_class_table_get(t, 5, &mut cl, &mut cm), BaStatus::InvalidArgument);
        ba_class_table_free(t);

        let mut cmp = BaComparison::default();
        assert_eq!(
            ba_compare_table(c("n4_pairs").as_ptr(), 1e-6, 0, &mut cmp),
            BaStatus::Ok
        );
        assert_eq!(cmp.passed, 1);
        assert_eq!(cmp.compared, 10);
    }
}

#[test]
fn fullspace_estimate() {
    let mut e = BaEstimate::default();
    unsafe {
        assert_eq!(
            ba_fullspace_estimate(c("real").as_ptr(), c("base").as_ptr(), 200_000, 7, &mut e),
            BaStatus::Ok
        );
        assert!(e.z_score.abs() < 5.0, "{e:?}");
        assert_eq!(
            ba_fullspace_estimate(c("quaternion").as_ptr(), c("base").as_ptr(), 10, 7, &mut e),
            BaStatus::InvalidArgument
        );
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ba_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/bloch_atlas.h")).unwrap();
    for name in [
        "ba_last_error_message",
        "ba_analyze_pair",
        "ba_analyze_triad",
        "ba_scenario_free",
        "ba_scenario_measures",
        "ba_scenario_boundary",
        "ba_scenario_to_json",
        "ba_string_free",
        "ba_enumerate",
        "ba_class_table_get",
        "ba_class_table_free",
        "ba_fullspace_estimate",
        "ba_compare_table",
        "typedef struct BaScenario BaScenario",
        "BA_STATUS_NUMERICAL = 2",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the static library, when a C
/// compiler is available.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libbloch_atlas_ffi.a");
    if !lib.exists() {
        // test builds do not always emit the static library
        let mut build = Command::new(env!("CARGO"));
        build.args(["build", "-p", "bloch-atlas-ffi"]);
        if !cfg!(debug_assertions) {
            build.arg("--release");
        }
        let _ = build.status();
    }
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler not available");
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("0.942809042 0.666666667 0.707106781"), "{text}");
    assert!(text.contains("5 classes, first {3,6} x4, 93 trivial"), "{text}");
}
