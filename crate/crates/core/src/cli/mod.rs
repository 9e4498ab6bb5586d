//! Command-line front end.
//!
//! ```text
//! bloch-atlas pair --n 6 --gens 8,13 --decomp 3x2 [--boundary] [--svg out.svg] [--json|--csv] [--tol 1e-8]
//! bloch-atlas triad --n 4 --gens 10,12,13 [--boundary-surface]
//! bloch-atlas enumerate --n 8 --decomp 4x2,2x4,mid222 --out classes.csv --parallel 8
//! bloch-atlas fullspace --case complex --constraints ppt --samples 10000000 --seed 42
//! bloch-atlas compare --table n4_pairs --tol 1e-6 --out report.json
//! ```
//!
//! Exit codes: 0 success, 1 argument error, 2 numerical failure,
//! 3 comparison failure.

mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumeration::{enumerate_classes, EnumerationOptions};
use crate::error::{Error, Result};
use crate::fullspace::{self, Case, Constraints, MCEstimate, SamplerOptions, SamplingMode};
use crate::ptrans::TransposeSpec;
use crate::refdata::{self, ComparisonReport, TableKind};
use crate::scenarios::{analyze_pair_with, analyze_triad_with, AnalysisOptions, ScenarioResult, CSV_HEADER};

pub use svg::render_pair_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_COMPARISON: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bloch-atlas",
    version,
    about = "Areas, volumes and separability probabilities of Bloch-vector sections"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyse a two-generator section.
    Pair(PairArgs),
    /// Analyse a three-generator section.
    Triad(TriadArgs),
    /// Group all generator pairs of an n-level system into classes.
    Enumerate(EnumerateArgs),
    /// Estimate minor-relaxation volumes of the full two-qubit bodies.
    Fullspace(FullspaceArgs),
    /// Recompute a reference table and compare.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct OutputFormat {
    /// JSON output (default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// CSV output.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub n: usize,
    /// Two 1-based generator indices, e.g. `8,13`.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub gens: Vec<usize>,
    /// Comma list of decompositions (`3x2`, `2x3`, `mid222`, ...).
    #[arg(long)]
    pub decomp: Option<String>,
    /// Also measure the feasible boundary and the PPT interface.
    #[arg(long)]
    pub boundary: bool,
    /// Write an 800x800 SVG plot of the section.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct TriadArgs {
    #[arg(long)]
    pub n: usize,
    /// Three 1-based generator indices.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub gens: Vec<usize>,
    #[arg(long)]
    pub decomp: Option<String>,
    /// Also measure the feasible boundary surface and its separable part.
    #[arg(long)]
    pub boundary_surface: bool,
    /// Relative tolerance of the outer sphere quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub decomp: Option<String>,
    /// Output file; `.json` selects JSON, anything else CSV. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub parallel: usize,
}

#[derive(Debug, Args)]
pub struct FullspaceArgs {
    /// `real` or `complex`.
    #[arg(long, default_value = "real")]
    pub case: String,
    /// Comma list of `base`, `ppt`, `refine1`, `refine2`, or `all`.
    #[arg(long, default_value = "all")]
    pub constraints: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent pseudo-random points instead of the shifted lattice sequence.
    #[arg(long)]
    pub plain: bool,
    #[arg(long, default_value_t = 32)]
    pub randomizations: usize,
    #[arg(long, default_value_t = 0)]
    pub parallel: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub table: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Report file (JSON). Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Compare these previously computed results (a JSON array) instead of
    /// recomputing.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Override the table's decompositions (a negative control).
    #[arg(long)]
    pub decomp: Option<String>,
    /// Also enumerate classes and compare multiplicities (pairs tables).
    #[arg(long)]
    pub multiplicities: bool,
    #[arg(long, default_value_t = 0)]
    pub parallel: usize,
}

/// The decomposition used when `--decomp` is omitted.
pub fn default_decomposition(n: usize) -> Option<&'static str> {
    match n {
        4 => Some("2x2"),
        6 => Some("3x2"),
        8 => Some("4x2"),
        9 => Some("3x3"),
        10 => Some("5x2"),
        _ => None,
    }
}

fn conditions(n: usize, decomp: Option<&str>) -> Result<Vec<TransposeSpec>> {
    let text = match decomp {
        Some(d) => d,
        None => {
            default_decomposition(n).ok_or_else(|| Error::InvalidArgument(format!("--decomp is required for n={n}")))?
        }
    };
    let list = TransposeSpec::parse_list(text)?;
    if let Some(bad) = list.iter().find(|c| c.dim() != n) {
        return Err(Error::InvalidArgument(format!(
            "decomposition {} has dimension {}, not {n}",
            bad.label(),
            bad.dim()
        )));
    }
    Ok(list)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Scenario { source, .. } => exit_code(source),
        _ if e.is_numerical() => EXIT_NUMERICAL,
        Error::MissingScenario(_) | Error::CorruptTable(_) => EXIT_COMPARISON,
        _ => EXIT_ARGUMENT,
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_target(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn results_csv(results: &[ScenarioResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record(r.csv_record())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn emit_result(result: &ScenarioResult, format: &OutputFormat, out: &mut dyn Write) -> Result<()> {
    let text = if format.csv {
        results_csv(std::slice::from_ref(result))?
    } else {
        to_json(result)?
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn pair_options(tol: Option<f64>) -> Result<AnalysisOptions> {
    let opts = AnalysisOptions::default();
    match tol {
        Some(t) if !(t > 0.0 && t < 1.0) => Err(Error::InvalidArgument(format!("--tol must lie in (0, 1), got {t}"))),
        Some(t) => Ok(opts.with_area_tol(t)),
        None => Ok(opts),
    }
}

fn triad_options(tol: Option<f64>) -> Result<AnalysisOptions> {
    let mut opts = AnalysisOptions::default();
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidArgument(format!("--tol must lie in (0, 1), got {t}")));
        }
        opts.volume.outer.rel_tol = t;
        opts.volume.inner.rel_tol = opts.volume.inner.rel_tol.min(t / 100.0).max(1e-13);
        opts.audit_tol_3d = opts.audit_tol_3d.max(10.0 * t);
    }
    Ok(opts)
}

fn as_pair(gens: &[usize]) -> Result<[usize; 2]> {
    <[usize; 2]>::try_from(gens)
        .map_err(|_| Error::InvalidArgument(format!("--gens needs exactly two indices, got {}", gens.len())))
}

fn as_triad(gens: &[usize]) -> Result<[usize; 3]> {
    <[usize; 3]>::try_from(gens)
        .map_err(|_| Error::InvalidArgument(format!("--gens needs exactly three indices, got {}", gens.len())))
}

fn cmd_pair(a: &PairArgs, out: &mut dyn Write) -> Result<i32> {
    let conds = conditions(a.n, a.decomp.as_deref())?;
    let pair = as_pair(&a.gens)?;
    let opts = pair_options(a.tol)?;
    let result = analyze_pair_with(a.n, pair, &conds, a.boundary, &opts)?;
    if let Some(path) = &a.svg {
        let doc = render_pair_svg(a.n, pair, &conds)?;
        std::fs::write(path, doc)?;
    }
    emit_result(&result, &a.format, out)?;
    Ok(EXIT_OK)
}

fn cmd_triad(a: &TriadArgs, out: &mut dyn Write) -> Result<i32> {
    let conds = conditions(a.n, a.decomp.as_deref())?;
    let triad = as_triad(&a.gens)?;
    let opts = triad_options(a.tol)?;
    let result = analyze_triad_with(a.n, triad, &conds, a.boundary_surface, &opts)?;
    emit_result(&result, &a.format, out)?;
    Ok(EXIT_OK)
}

fn cmd_enumerate(a: &EnumerateArgs, out: &mut dyn Write) -> Result<i32> {
    let conds = conditions(a.n, a.decomp.as_deref())?;
    let opts = EnumerationOptions {
        parallel: a.parallel,
        ..EnumerationOptions::default()
    };
    let table = enumerate_classes(a.n, &conds, &opts)?;
    let json = a.json || a.out.as_deref().and_then(Path::extension).is_some_and(|e| e == "json");
    let text = if json {
        to_json(&table)?
    } else {
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        String::from_utf8(buf).expect("csv output is UTF-8")
    };
    write_target(a.out.as_deref(), &text, out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct FullspaceRow {
    #[serde(flatten)]
    estimate: MCEstimate,
    reference: Option<f64>,
    z_score: Option<f64>,
    relative_deviation: Option<f64>,
}

fn cmd_fullspace(a: &FullspaceArgs, out: &mut dyn Write) -> Result<i32> {
    let case: Case = a.case.parse()?;
    let wanted: Vec<Constraints> = if a.constraints.trim() == "all" {
        Constraints::ALL.to_vec()
    } else {
        a.constraints
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?
    };
    if wanted.is_empty() {
        return Err(Error::InvalidArgument("no constraint set requested".into()));
    }
    let opts = SamplerOptions {
        mode: if a.plain {
            SamplingMode::Plain
        } else {
            SamplingMode::QuasiRandom
        },
        randomizations: a.randomizations,
        parallel: a.parallel,
        ..SamplerOptions::default()
    };
    let all = fullspace::minor_volumes(case, a.samples, a.seed, &opts)?;
    let rows: Vec<FullspaceRow> = all
        .into_iter()
        .filter(|e| wanted.contains(&e.constraints))
        .map(|estimate| {
            let reference = fullspace::reference_for(estimate.case, estimate.constraints);
            FullspaceRow {
                z_score: reference.map(|r| estimate.z_score(r)),
                relative_deviation: reference.map(|r| (estimate.mean - r) / r),
                reference,
                estimate,
            }
        })
        .collect();
    write_target(a.out.as_deref(), &to_json(&rows)?, out)?;
    Ok(EXIT_OK)
}

/// Recomputes every scenario a table lists.
pub fn compute_table_results(
    table: &refdata::ReferenceTable,
    conds: &[TransposeSpec],
    parallel: usize,
) -> Result<Vec<ScenarioResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let n = table.n;
    let kind = table.kind;
    let gens: Vec<Vec<usize>> = table.rows.iter().filter_map(|r| r.gens.clone()).collect();
    let pair_opts = AnalysisOptions::default();
    pool.install(|| {
        gens.par_iter()
            .map(|g| match g.len() {
                2 => analyze_pair_with(
                    n,
                    [g[0], g[1]],
                    conds,
                    matches!(kind, TableKind::Boundary | TableKind::Interior),
                    &pair_opts,
                ),
                3 => analyze_triad_with(n, [g[0], g[1], g[2]], conds, kind == TableKind::Surfaces, &pair_opts),
                k => Err(Error::CorruptTable(format!(
                    "{}: rows must list 2 or 3 generators, found {k}",
                    table.id
                ))),
            })
            .collect()
    })
}

fn summary_line(r: &ComparisonReport) -> String {
    let status = if r.informational {
        "informational (unresolved convention)"
    } else if r.passed {
        "pass"
    } else {
        "FAIL"
    };
    format!(
        "{}: {} rows compared, {} out of tolerance {:e}, max deviation {:.3e}: {status}",
        r.table, r.compared, r.failures, r.tolerance, r.max_deviation
    )
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let table = refdata::load(&a.table)?;
    let mut reports = Vec::new();
    if table.kind == TableKind::Constants {
        reports.push(refdata::compare_constants(
            &fullspace::reference_constants(),
            &table,
            a.tol,
        )?);
    } else {
        let conds = match &a.decomp {
            Some(d) => conditions(table.n, Some(d))?,
            None => table.conditions.clone(),
        };
        let results: Vec<ScenarioResult> = match &a.results {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => compute_table_results(&table, &conds, a.parallel)?,
        };
        reports.push(refdata::compare(&results, &table, a.tol)?);
        if a.multiplicities && table.kind == TableKind::Pairs {
            let opts = EnumerationOptions {
                parallel: a.parallel,
                ..EnumerationOptions::default()
            };
            let classes = enumerate_classes(table.n, &conds, &opts)?;
            reports.push(refdata::compare_multiplicities(&classes, &table)?);
        }
    }
    for r in &reports {
        writeln!(err, "{}", summary_line(r))?;
    }
    let text = if reports.len() == 1 {
        to_json(&reports[0])?
    } else {
        to_json(&reports)?
    };
    write_target(a.out.as_deref(), &text, out)?;
    Ok(if reports.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_COMPARISON
    })
}

/// Runs the command line with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_ARGUMENT } else { EXIT_OK };
        }
    };
    let outcome = match &config.command {
        Command::Pair(a) => cmd_pair(a, out),
        Command::Triad(a) => cmd_triad(a, out),
        Command::Enumerate(a) => cmd_enumerate(a, out),
        Command::Fullspace(a) => cmd_fullspace(a, out),
        Command::Compare(a) => cmd_compare(a, out, err),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs the command line on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["bloch-atlas"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn argument_errors_exit_one() {
        assert_eq!(run_capture(&["pair", "--n", "4", "--gens", "3,3"]).0, EXIT_ARGUMENT);
        assert_eq!(run_capture(&["pair", "--n", "4", "--gens", "3"]).0, EXIT_ARGUMENT);
        assert_eq!(run_capture(&["pair", "--n", "5", "--gens", "3,6"]).0, EXIT_ARGUMENT);
        assert_eq!(
            run_capture(&["pair", "--n", "6", "--gens", "3,6", "--decomp", "2x2"]).0,
            EXIT_ARGUMENT
        );
        assert_eq!(run_capture(&["bogus"]).0, EXIT_ARGUMENT);
        assert_eq!(run_capture(&["compare", "--table", "nope"]).0, EXIT_ARGUMENT);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn pair_csv() {
        let (code, out, _) = run_capture(&["pair", "--n", "4", "--gens", "3,6", "--csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[..3], ["4", "3;6", "2x2"]);
        let want = [2.0 * 2f64.sqrt() / 3.0, 2.0 / 3.0, 0.5f64.sqrt()];
        for (f, w) in fields[3..6].iter().zip(want) {
            assert!((f.parse::<f64>().unwrap() - w).abs() < 1e-9, "{f} vs {w}");
        }
    }

    #[test]
    fn default_decompositions_have_matching_dimension() {
        for n in [4, 6, 8, 9, 10] {
            assert_eq!(conditions(n, None).unwrap()[0].dim(), n);
        }
        assert!(conditions(7, None).is_err());
    }
}
