//! Reference tables transcribed from the published arrays, and a comparison
//! engine for computed results.
//!
//! Tables are CSV files (UTF-8, LF, header row) listed in `tables.csv` and
//! checksummed in `SHA256SUMS`. They are embedded in the binary; setting
//! `BLOCH_ATLAS_REFDATA` to a directory loads them from there instead.
//!
//! Row schema: `gens,multiplicity,total_expr,part_expr,probability_expr,printed,note`.
//! `gens` is `;`-separated (`3;6`), or a constant name in the constants
//! table. Expressions use the grammar of [`expr`]. `printed` is the decimal
//! as printed in the source; it must agree with `probability_expr` (or with
//! `total_expr` when there is no probability) to within half a unit in its
//! last digit, and never looser than 5e-7.

pub mod expr;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumeration::ClassTable;
use crate::error::{Error, Result};
use crate::fullspace::ReferenceConstants;
use crate::ptrans::TransposeSpec;
use crate::scenarios::{ConventionNote, ScenarioResult};

pub const ENV_VAR: &str = "BLOCH_ATLAS_REFDATA";

macro_rules! embed {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../../../refdata/", $name)))),*]
    };
}

const EMBEDDED: &[(&str, &str)] = embed!(
    "tables.csv",
    "SHA256SUMS",
    "n4_pairs.csv",
    "n4_boundary.csv",
    "n4_interior.csv",
    "n6_32.csv",
    "n6_32_boundary.csv",
    "n6_32_interior.csv",
    "n6_23.csv",
    "n6_23_boundary.csv",
    "n6_23_interior.csv",
    "n6_bi.csv",
    "n6_bi_boundary.csv",
    "n6_bi_interior.csv",
    "n8_42.csv",
    "n8_42_boundary.csv",
    "n8_24.csv",
    "n8_24_boundary.csv",
    "n8_bi.csv",
    "n8_bi_boundary.csv",
    "n8_tri.csv",
    "n8_tri_boundary.csv",
    "n8_tri_interior.csv",
    "n9.csv",
    "n9_boundary.csv",
    "n9_interior.csv",
    "n10_52.csv",
    "n10_25.csv",
    "n10_bi.csv",
    "m3_volumes.csv",
    "m3_boundary_areas.csv",
    "fullspace_constants.csv",
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Pair areas and probabilities.
    Pairs,
    /// Feasible-boundary lengths: total, separable part, fraction.
    Boundary,
    /// Interior interface lengths.
    Interior,
    /// Triad volumes: total, separable, probability.
    Volumes,
    /// Triad boundary surface areas.
    Surfaces,
    /// Named constants.
    Constants,
}

impl TableKind {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "pairs" => TableKind::Pairs,
            "boundary" => TableKind::Boundary,
            "interior" => TableKind::Interior,
            "volumes" => TableKind::Volumes,
            "surfaces" => TableKind::Surfaces,
            "constants" => TableKind::Constants,
            _ => return Err(Error::CorruptTable(format!("unknown table kind '{s}'"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    /// Raw key: `3;6` or a constant name.
    pub key: String,
    pub gens: Option<Vec<usize>>,
    pub multiplicity: Option<usize>,
    pub total_expr: String,
    pub total_value: Option<f64>,
    pub part_expr: String,
    pub part_value: Option<f64>,
    pub probability_expr: String,
    pub probability_value: Option<f64>,
    pub printed: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub id: String,
    pub n: usize,
    pub conditions: Vec<TransposeSpec>,
    pub kind: TableKind,
    pub convention: ConventionNote,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    pub fn row(&self, gens: &[usize]) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| r.gens.as_deref() == Some(gens))
    }

    pub fn is_informational(&self) -> bool {
        self.convention == ConventionNote::UnresolvedConvention
    }
}

#[derive(Clone, Debug)]
struct TableMeta {
    id: String,
    file: String,
    n: usize,
    conditions: String,
    kind: TableKind,
    convention: ConventionNote,
}

enum Source {
    Embedded,
    Directory(PathBuf),
}

fn source() -> Source {
    match std::env::var_os(ENV_VAR) {
        Some(dir) if !dir.is_empty() => Source::Directory(PathBuf::from(dir)),
        _ => Source::Embedded,
    }
}

fn read_file(src: &Source, name: &str) -> Result<String> {
    match src {
        Source::Embedded => EMBEDDED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| Error::CorruptTable(format!("file '{name}' is not embedded"))),
        Source::Directory(dir) => Ok(std::fs::read_to_string(dir.join(name))?),
    }
}

fn catalog(src: &Source) -> Result<Vec<TableMeta>> {
    let text = read_file(src, "tables.csv")?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").to_string();
        let convention = match field(5).as_str() {
            "paper_verified" => ConventionNote::PaperVerified,
            "unresolved_convention" => ConventionNote::UnresolvedConvention,
            other => return Err(Error::CorruptTable(format!("unknown convention '{other}'"))),
        };
        out.push(TableMeta {
            id: field(0),
            file: field(1),
            n: field(2)
                .parse()
                .map_err(|_| Error::CorruptTable(format!("bad n in catalog row {}", field(0))))?,
            conditions: field(3),
            kind: TableKind::parse(&field(4))?,
            convention,
        });
    }
    Ok(out)
}

/// Identifiers of all available tables, in catalog order.
pub fn table_ids() -> Result<Vec<String>> {
    Ok(catalog(&source())?.into_iter().map(|m| m.id).collect())
}

fn checksums(src: &Source) -> Result<BTreeMap<String, String>> {
    let text = read_file(src, "SHA256SUMS")?;
    let mut out = BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (hash, name) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::CorruptTable(format!("bad checksum line '{line}'")))?;
        out.insert(
            name.trim().trim_start_matches('*').to_string(),
            hash.to_ascii_lowercase(),
        );
    }
    Ok(out)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Tolerance implied by a printed decimal: half a unit in the last printed
/// digit (scaled by any exponent), at least 5e-7 for plain decimals.
pub fn printed_tolerance(printed: &str) -> f64 {
    let p = printed.trim().to_ascii_lowercase();
    let (mantissa, exp) = match p.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i32>().unwrap_or(0)),
        None => (p.clone(), 0),
    };
    let digits = mantissa.split_once('.').map(|(_, f)| f.len()).unwrap_or(0) as i32;
    let half = 0.5 * 10f64.powi(exp - digits);
    if exp == 0 {
        half.max(5e-7)
    } else {
        half
    }
}

fn opt_eval(s: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        expr::eval(s).map(Some)
    }
}

fn parse_rows(id: &str, text: &str, kind: TableKind) -> Result<Vec<ReferenceRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let want = [
        "gens",
        "multiplicity",
        "total_expr",
        "part_expr",
        "probability_expr",
        "printed",
        "note",
    ];
    if header != want {
        return Err(Error::CorruptTable(format!("{id}: unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("").to_string();
        let key = f(0);
        let gens = if kind == TableKind::Constants {
            None
        } else {
            let g: std::result::Result<Vec<usize>, _> = key.split(';').map(|x| x.trim().parse::<usize>()).collect();
            Some(g.map_err(|_| Error::CorruptTable(format!("{id}: bad generator key '{key}'")))?)
        };
        let multiplicity = if f(1).is_empty() {
            None
        } else {
            Some(
                f(1).parse()
                    .map_err(|_| Error::CorruptTable(format!("{id}: bad multiplicity '{}'", f(1))))?,
            )
        };
        let wrap = |e: Error| Error::CorruptTable(format!("{id} row {key}: {e}"));
        let row = ReferenceRow {
            total_value: opt_eval(&f(2)).map_err(wrap)?,
            part_value: opt_eval(&f(3)).map_err(wrap)?,
            probability_value: opt_eval(&f(4)).map_err(wrap)?,
            key: key.clone(),
            gens,
            multiplicity,
            total_expr: f(2),
            part_expr: f(3),
            probability_expr: f(4),
            printed: f(5),
            note: f(6),
        };
        if !row.printed.is_empty() {
            let printed: f64 = row
                .printed
                .parse()
                .map_err(|_| Error::CorruptTable(format!("{id} row {key}: bad printed value")))?;
            let value = row
                .probability_value
                .or(row.total_value)
                .ok_or_else(|| Error::CorruptTable(format!("{id} row {key}: printed value without expression")))?;
            if (value - printed).abs() > printed_tolerance(&row.printed) {
                return Err(Error::CorruptTable(format!(
                    "{id} row {key}: expression gives {value}, printed {}",
                    row.printed
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Loads, checksum-verifies and validates one table.
pub fn load(table_id: &str) -> Result<ReferenceTable> {
    let src = source();
    let meta = catalog(&src)?
        .into_iter()
        .find(|m| m.id == table_id)
        .ok_or_else(|| Error::UnknownTable(table_id.to_string()))?;
    let text = read_file(&src, &meta.file)?;
    let sums = checksums(&src)?;
    let expected = sums
        .get(&meta.file)
        .ok_or_else(|| Error::CorruptTable(format!("no checksum for {}", meta.file)))?;
    let actual = hex(&Sha256::digest(text.as_bytes()));
    if &actual != expected {
        return Err(Error::CorruptTable(format!("checksum mismatch for {}", meta.file)));
    }
    let conditions = if meta.conditions.is_empty() {
        Vec::new()
    } else {
        TransposeSpec::parse_list(&meta.conditions)?
    };
    Ok(ReferenceTable {
        rows: parse_rows(&meta.id, &text, meta.kind)?,
        id: meta.id,
        n: meta.n,
        conditions,
        kind: meta.kind,
        convention: meta.convention,
    })
}

/// One compared quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowComparison {
    pub key: String,
    pub quantity: String,
    pub expected: f64,
    pub computed: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub table: String,
    pub convention: ConventionNote,
    /// Unresolved-convention tables are compared for information only and
    /// never fail.
    pub informational: bool,
    pub tolerance: f64,
    pub rows: Vec<RowComparison>,
    pub compared: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

impl ComparisonReport {
    fn new(table: &ReferenceTable, tol: f64, rows: Vec<RowComparison>) -> Self {
        let informational = table.is_informational();
        let failures = rows.iter().filter(|r| !r.pass).count();
        let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
        Self {
            table: table.id.clone(),
            convention: table.convention,
            informational,
            tolerance: tol,
            compared: rows.len(),
            failures,
            max_deviation,
            passed: informational || failures == 0,
            rows,
        }
    }
}

fn push(
    rows: &mut Vec<RowComparison>,
    key: &str,
    quantity: &str,
    expected: Option<f64>,
    computed: Option<f64>,
    tol: f64,
) {
    if let (Some(e), Some(c)) = (expected, computed) {
        let deviation = (e - c).abs();
        rows.push(RowComparison {
            key: key.to_string(),
            quantity: quantity.to_string(),
            expected: e,
            computed: c,
            deviation,
            pass: deviation <= tol,
        });
    }
}

/// Compares scenario results with a table, row by row. Every table row must
/// have a matching result (same `n` and generators).
pub fn compare(results: &[ScenarioResult], table: &ReferenceTable, tol: f64) -> Result<ComparisonReport> {
    if table.kind == TableKind::Constants {
        return Err(Error::invalid("use compare_constants for the constants table"));
    }
    let mut rows = Vec::new();
    for row in &table.rows {
        let gens = row.gens.as_deref().unwrap_or(&[]);
        let res = results
            .iter()
            .find(|r| r.n == table.n && r.gens == gens)
            .ok_or_else(|| Error::MissingScenario(format!("{} {}", table.id, row.key)))?;
        let k = &row.key;
        match table.kind {
            TableKind::Pairs | TableKind::Volumes => {
                push(&mut rows, k, "total", row.total_value, Some(res.total), tol);
                push(&mut rows, k, "joint", row.part_value, Some(res.joint), tol);
                push(
                    &mut rows,
                    k,
                    "probability",
                    row.probability_value,
                    Some(res.probability),
                    tol,
                );
            }
            TableKind::Boundary | TableKind::Surfaces => {
                let b = res.boundary.as_ref();
                push(
                    &mut rows,
                    k,
                    "boundary_total",
                    row.total_value,
                    b.map(|b| b.total_length),
                    tol,
                );
                push(
                    &mut rows,
                    k,
                    "boundary_classified",
                    row.part_value,
                    b.map(|b| b.classified_length),
                    tol,
                );
                push(
                    &mut rows,
                    k,
                    "boundary_probability",
                    row.probability_value,
                    b.map(|b| b.boundary_probability),
                    tol,
                );
            }
            TableKind::Interior => {
                let v = res.boundary.as_ref().and_then(|b| b.interior_length);
                push(&mut rows, k, "interior", row.total_value, v, tol);
            }
            TableKind::Constants => unreachable!(),
        }
    }
    Ok(ComparisonReport::new(table, tol, rows))
}

/// Compares class multiplicities of an enumeration with a pairs table.
pub fn compare_multiplicities(classes: &ClassTable, table: &ReferenceTable) -> Result<ComparisonReport> {
    let mut rows = Vec::new();
    for row in &table.rows {
        let (Some(gens), Some(m)) = (row.gens.as_deref(), row.multiplicity) else {
            continue;
        };
        if gens.len() != 2 {
            continue;
        }
        let got = classes
            .class_of([gens[0], gens[1]])
            .map(|c| c.count as f64)
            .unwrap_or(0.0);
        push(&mut rows, &row.key, "multiplicity", Some(m as f64), Some(got), 0.0);
    }
    // classes the table does not list at all
    for class in &classes.classes {
        let listed = table.rows.iter().any(|r| {
            r.gens
                .as_deref()
                .is_some_and(|g| g.len() == 2 && class.members.contains(&[g[0].min(g[1]), g[0].max(g[1])]))
        });
        if !listed {
            let key = format!("{};{}", class.representative[0], class.representative[1]);
            push(
                &mut rows,
                &key,
                "multiplicity",
                Some(0.0),
                Some(class.count as f64),
                0.0,
            );
        }
    }
    Ok(ComparisonReport::new(table, 0.0, rows))
}

/// Compares the library's reference constants with the constants table;
/// `tol` is relative here.
pub fn compare_constants(constants: &ReferenceConstants, table: &ReferenceTable, tol: f64) -> Result<ComparisonReport> {
    let value = serde_json::to_value(constants)?;
    let mut rows = Vec::new();
    for row in &table.rows {
        let (Some(expected), Some(computed)) = (row.total_value, value.get(&row.key).and_then(|v| v.as_f64())) else {
            continue;
        };
        let scaled = tol * expected.abs();
        push(&mut rows, &row.key, "value", Some(expected), Some(computed), scaled);
    }
    Ok(ComparisonReport::new(table, tol, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_tolerances() {
        assert_eq!(printed_tolerance("0.707107"), 5e-7);
        assert_eq!(printed_tolerance("0.75"), 5e-3);
        assert!((printed_tolerance("1.12925e-6") - 5e-12).abs() < 1e-24);
    }

    #[test]
    fn every_table_loads() {
        let ids = table_ids().unwrap();
        assert_eq!(ids.len(), 30);
        for id in ids {
            let t = load(&id).unwrap();
            assert!(!t.rows.is_empty(), "{id}");
        }
    }

    #[test]
    fn n4_pairs_shape() {
        let t = load("n4_pairs").unwrap();
        let m: Vec<usize> = t.rows.iter().map(|r| r.multiplicity.unwrap()).collect();
        assert_eq!(m, vec![4, 2, 2, 2, 2]);
        assert_eq!(t.conditions, TransposeSpec::parse_list("2x2").unwrap());
        assert!(!t.is_informational());
    }

    #[test]
    fn unknown_table() {
        assert!(matches!(load("n5_pairs"), Err(Error::UnknownTable(_))));
    }

    #[test]
    fn corrupted_rows_are_rejected() {
        let text = "gens,multiplicity,total_expr,part_expr,probability_expr,printed,note\n3;6,4,1,,1/sqrt(2),0.72,\n";
        assert!(parse_rows("x", text, TableKind::Pairs).is_err());
        let text = "gens,multiplicity,total_expr,part_expr,probability_expr,printed,note\n3;6,4,1,,foo(2),,\n";
        assert!(parse_rows("x", text, TableKind::Pairs).is_err());
        let text = "gens,mult\n";
        assert!(parse_rows("x", text, TableKind::Pairs).is_err());
    }
}
