//! C interface to `bloch-atlas`.
//!
//! Conventions:
//!
//! - Every fallible function returns a [`BaStatus`]; on failure a message is
//!   available from [`ba_last_error_message`] on the same thread.
//! - Results live behind opaque handles (`BaScenario`, `BaClassTable`) that
//!   the caller releases with the matching `*_free` function.
//! - Strings passed in are NUL-terminated UTF-8. Strings returned by
//!   [`ba_scenario_to_json`] are owned by the caller and released with
//!   [`ba_string_free`].
//! - Panics never cross the boundary; they are reported as
//!   [`BaStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bloch_atlas::enumeration::{enumerate_classes, ClassTable, EnumerationOptions};
use bloch_atlas::fullspace::{self, Case, Constraints};
use bloch_atlas::refdata;
use bloch_atlas::{Error, ScenarioResult, TransposeSpec};

/// Status codes. Zero is success; the first three error codes agree with
/// the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaStatus {
    Ok = 0,
    InvalidArgument = 1,
    Numerical = 2,
    Comparison = 3,
    NullPointer = 4,
    Io = 5,
    Internal = 6,
}

/// Result of one pair or triad analysis.
pub struct BaScenario {
    inner: ScenarioResult,
}

/// Equivalence classes of an enumeration.
pub struct BaClassTable {
    inner: ClassTable,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaMeasures {
    pub total: f64,
    pub joint: f64,
    pub probability: f64,
    pub error_estimate: f64,
}

/// Boundary measures: lengths for pairs, surface areas for triads.
/// `interior_length` is NaN when not computed.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaBoundary {
    pub total: f64,
    pub classified: f64,
    pub probability: f64,
    pub interior_length: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BaClass {
    pub representative_a: usize,
    pub representative_b: usize,
    pub count: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaClassMeasures {
    pub total: f64,
    pub joint: f64,
    pub probability: f64,
}

/// A Monte-Carlo estimate. `reference` is NaN when no published constant
/// exists for the case and constraint set.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub reference: f64,
    pub z_score: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaComparison {
    pub compared: usize,
    pub failures: usize,
    pub max_deviation: f64,
    /// Nonzero when the table is informational only.
    pub informational: i32,
    /// Nonzero when the comparison passed.
    pub passed: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BaStatus {
    match e {
        Error::Scenario { source, .. } => status_of(source),
        _ if e.is_numerical() => BaStatus::Numerical,
        Error::UnknownTable(_) => BaStatus::InvalidArgument,
        Error::MissingScenario(_) | Error::CorruptTable(_) => BaStatus::Comparison,
        Error::Io(_) => BaStatus::Io,
        _ => BaStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BaStatus, String)>) -> BaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BaStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BaStatus::Internal
        }
    }
}

fn lib(e: Error) -> (BaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BaStatus, String) {
    (BaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BaStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BaStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn parse_decomposition(p: *const c_char) -> Result<Vec<TransposeSpec>, (BaStatus, String)> {
    TransposeSpec::parse_list(read_str(p, "decomposition")?).map_err(lib)
}

unsafe fn scenario<'a>(h: *const BaScenario) -> Result<&'a ScenarioResult, (BaStatus, String)> {
    h.as_ref().map(|s| &s.inner).ok_or_else(|| null("scenario handle"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (BaStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread (empty after a success).
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ba_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ba_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Analyses the section spanned by generators `a` and `b` of SU(`n`) under
/// the comma-separated decompositions in `decomposition` (e.g. `"3x2,2x3"`).
///
/// # Safety
/// `decomposition` must be a valid NUL-terminated string and `out` a valid
/// pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ba_analyze_pair(
    n: usize,
    a: usize,
    b: usize,
    decomposition: *const c_char,
    with_boundary: bool,
    out: *mut *mut BaScenario,
) -> BaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let conds = parse_decomposition(decomposition)?;
        let inner = bloch_atlas::analyze_pair(n, [a, b], &conds, with_boundary).map_err(lib)?;
        out.write(Box::into_raw(Box::new(BaScenario { inner })));
        Ok(())
    })
}

/// Analyses the section spanned by generators `a`, `b`, `c`.
///
/// # Safety
/// As for [`ba_analyze_pair`].
#[no_mangle]
pub unsafe extern "C" fn ba_analyze_triad(
    n: usize,
    a: usize,
    b: usize,
    c: usize,
    decomposition: *const c_char,
    with_surface: bool,
    out: *mut *mut BaScenario,
) -> BaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let conds = parse_decomposition(decomposition)?;
        let inner = bloch_atlas::analyze_triad(n, [a, b, c], &conds, with_surface).map_err(lib)?;
        out.write(Box::into_raw(Box::new(BaScenario { inner })));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ba_scenario_free(h: *mut BaScenario) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ba_scenario_measures(h: *const BaScenario, out: *mut BaMeasures) -> BaStatus {
    guard(|| {
        let s = scenario(h)?;
        let m = BaMeasures {
            total: s.total,
            joint: s.joint,
            probability: s.probability,
            error_estimate: s.error_estimate,
        };
        write_out(out, m, "out")
    })
}

/// Number of PPT conditions; zero for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ba_scenario_condition_count(h: *const BaScenario) -> usize {
    h.as_ref().map_or(0, |s| s.inner.per_condition.len())
}

/// Measure of the region satisfying condition `k` alone (0-based).
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ba_scenario_condition_measure(h: *const BaScenario, k: usize, out: *mut f64) -> BaStatus {
    guard(|| {
        let s = scenario(h)?;
        let v = *s
            .per_condition
            .get(k)
            .ok_or_else(|| (BaStatus::InvalidArgument, format!("condition {k} out of range")))?;
        write_out(out, v, "out")
    })
}

/// Boundary measures; `InvalidArgument` when the analysis did not request
/// them.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ba_scenario_boundary(h: *const BaScenario, out: *mut BaBoundary) -> BaStatus {
    guard(|| {
        let s = scenario(h)?;
        let b = s.boundary.as_ref().ok_or_else(|| {
            (
                BaStatus::InvalidArgument,
                "no boundary measures were computed".to_string(),
            )
        })?;
        let v = BaBoundary {
            total: b.total_length,
            classified: b.classified_length,
            probability: b.boundary_probability,
            interior_length: b.interior_length.unwrap_or(f64::NAN),
        };
        write_out(out, v, "out")
    })
}

/// The full result as JSON; null on failure. Release with
/// [`ba_string_free`].
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ba_scenario_to_json(h: *const BaScenario) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let s = scenario(h)?;
        let json = serde_json::to_string(s).map_err(|e| lib(e.into()))?;
        result = CString::new(json)
            .map_err(|_| (BaStatus::Internal, "NUL in JSON".to_string()))?
            .into_raw();
        Ok(())
    });
    result
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ba_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Groups all generator pairs of SU(`n`) into equivalence classes.
/// `parallel` is the worker count (0 for all cores).
///
/// # Safety
/// `decomposition` must be a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ba_enumerate(
    n: usize,
    decomposition: *const c_char,
    parallel: usize,
    out: *mut *mut BaClassTable,
) -> BaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let conds = parse_decomposition(decomposition)?;
        let opts = EnumerationOptions {
            parallel,
            ..EnumerationOptions::default()
        };
        let inner = enumerate_classes(n, &conds, &opts).map_err(lib)?;
        out.write(Box::into_raw(Box::new(BaClassTable { inner })));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live class-table handle.
#[no_mangle]
pub unsafe extern "C" fn ba_class_table_free(h: *mut BaClassTable) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of nontrivial classes; zero for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ba_class_table_len(h: *const BaClassTable) -> usize {
    h.as_ref().map_or(0, |t| t.inner.classes.len())
}

/// Number of trivial pairs (PPT region equal to the whole section).
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ba_class_table_trivial_count(h: *const BaClassTable) -> usize {
    h.as_ref().map_or(0, |t| t.inner.trivial_count)
}

/// Class `i` (0-based, ordered by representative).
///
/// # Safety
/// `h` must be a live handle; `class_out` and `measures_out` writable (either
/// may be null to skip it).
#[no_mangle]
pub unsafe extern "C" fn ba_class_table_get(
    h: *const BaClassTable,
    i: usize,
    class_out: *mut BaClass,
    measures_out: *mut BaClassMeasures,
) -> BaStatus {
    guard(|| {
        let t = h.as_ref().ok_or_else(|| null("class table handle"))?;
        let c = t
            .inner
            .classes
            .get(i)
            .ok_or_else(|| (BaStatus::InvalidArgument, format!("class {i} out of range")))?;
        if let Some(o) = class_out.as_mut() {
            *o = BaClass {
                representative_a: c.representative[0],
                representative_b: c.representative[1],
                count: c.count,
            };
        }
        if let Some(o) = measures_out.as_mut() {
            *o = BaClassMeasures {
                total: c.total,
                joint: c.joint,
                probability: c.probability,
            };
        }
        Ok(())
    })
}

/// Quasi-Monte-Carlo estimate of a minor-relaxation volume.
/// `case` is `"real"` or `"complex"`; `constraints` one of `"base"`,
/// `"ppt"`, `"refine1"`, `"refine2"`.
///
/// # Safety
/// String arguments must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ba_fullspace_estimate(
    case: *const c_char,
    constraints: *const c_char,
    samples: u64,
    seed: u64,
    out: *mut BaEstimate,
) -> BaStatus {
    guard(|| {
        let case: Case = read_str(case, "case")?.parse().map_err(lib)?;
        let constraints: Constraints = read_str(constraints, "constraints")?.parse().map_err(lib)?;
        let e = fullspace::minor_volume(case, constraints, samples, seed).map_err(lib)?;
        let reference = fullspace::reference_for(case, constraints).unwrap_or(f64::NAN);
        let v = BaEstimate {
            mean: e.mean,
            standard_error: e.standard_error,
            reference,
            z_score: e.z_score(reference),
        };
        write_out(out, v, "out")
    })
}

/// Recomputes a reference table and compares at absolute tolerance `tol`.
/// Returns `Comparison` when a verified row is out of tolerance; `out` is
/// filled either way.
///
/// # Safety
/// `table_id` must be a valid string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ba_compare_table(
    table_id: *const c_char,
    tol: f64,
    parallel: usize,
    out: *mut BaComparison,
) -> BaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let table = refdata::load(read_str(table_id, "table id")?).map_err(lib)?;
        let report = if table.kind == refdata::TableKind::Constants {
            refdata::compare_constants(&fullspace::reference_constants(), &table, tol)
        } else {
            bloch_atlas::cli::compute_table_results(&table, &table.conditions, parallel)
                .and_then(|results| refdata::compare(&results, &table, tol))
        }
        .map_err(lib)?;
        out.write(BaComparison {
            compared: report.compared,
            failures: report.failures,
            max_deviation: report.max_deviation,
            informational: report.informational as i32,
            passed: report.passed as i32,
        });
        if report.passed {
            Ok(())
        } else {
            Err((
                BaStatus::Comparison,
                format!(
                    "{}: {} of {} values out of tolerance",
                    report.table, report.failures, report.compared
                ),
            ))
        }
    })
}
