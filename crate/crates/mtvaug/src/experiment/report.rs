//! Report emission: runs.csv, summary.json, curves.csv, heatmap.csv.
//!
//! All derived files are produced from the flat run rows through a single
//! aggregation path, so regenerating reports from a stored runs.csv yields
//! byte-identical output to emitting them directly from a sweep. CSV floats
//! use Rust's shortest round-trip formatting; summaries round boosts to one
//! decimal place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::augment::Operator;
use crate::experiment::run::{CellKey, SweepResult};

pub const RUNS_HEADER: &str = "operator,alpha,gamma_o,seed,accuracy,baseline_accuracy,boost_pp";

/// Gamma conventions used in summaries and curves: "traditional" reports the
/// `gamma_o = 0` row, "mtv" the `gamma_o = 0.5` row.
pub const TRADITIONAL_GAMMA_MILLIS: u32 = 0;
pub const MTV_GAMMA_MILLIS: u32 = 500;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("runs.csv header mismatch: expected {expected:?}, got {got:?}")]
    SchemaError { expected: String, got: String },
    #[error("runs.csv line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("runs.csv contains no baseline rows (operator=none)")]
    MissingBaseline,
}

/// One row of runs.csv.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub operator: Option<Operator>,
    pub alpha: f64,
    pub gamma_o: f64,
    pub seed: u64,
    pub accuracy: f64,
    pub baseline_accuracy: f64,
    pub boost_pp: f64,
}

impl RunRow {
    pub fn to_csv_line(&self) -> String {
        let op = self.operator.map_or("none", |o| o.name());
        format!(
            "{},{},{},{},{},{},{}",
            op, self.alpha, self.gamma_o, self.seed, self.accuracy, self.baseline_accuracy,
            self.boost_pp
        )
    }

    pub fn parse(line: &str, line_no: usize) -> Result<Self, ReportError> {
        let malformed = |reason: String| ReportError::MalformedRow {
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(malformed(format!("expected 7 fields, got {}", fields.len())));
        }
        let operator = if fields[0] == "none" {
            None
        } else {
            Some(Operator::from_str(fields[0]).map_err(|e| malformed(e.to_string()))?)
        };
        let num = |i: usize, name: &str| -> Result<f64, ReportError> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| malformed(format!("invalid {name} {:?}", fields[i])))
        };
        Ok(RunRow {
            operator,
            alpha: num(1, "alpha")?,
            gamma_o: num(2, "gamma_o")?,
            seed: fields[3]
                .parse::<u64>()
                .map_err(|_| malformed(format!("invalid seed {:?}", fields[3])))?,
            accuracy: num(4, "accuracy")?,
            baseline_accuracy: num(5, "baseline_accuracy")?,
            boost_pp: num(6, "boost_pp")?,
        })
    }
}

/// Flattens a sweep into canonical row order: baseline rows first, then
/// cells ordered by key, seeds in spec order.
pub fn rows_from_sweep(result: &SweepResult) -> Vec<RunRow> {
    let base_mean = result.baseline.mean_accuracy;
    let mut rows = Vec::new();
    for (i, &seed) in result.baseline.spec.seeds.iter().enumerate() {
        let acc = result.baseline.per_seed_accuracy[i];
        rows.push(RunRow {
            operator: None,
            alpha: 0.0,
            gamma_o: 1.0,
            seed,
            accuracy: acc,
            baseline_accuracy: base_mean,
            boost_pp: 100.0 * (acc - base_mean),
        });
    }
    for (key, cell) in &result.cells {
        for (i, &seed) in cell.spec.seeds.iter().enumerate() {
            let acc = cell.per_seed_accuracy[i];
            rows.push(RunRow {
                operator: Some(key.operator),
                alpha: cell.spec.alpha,
                gamma_o: cell.spec.gamma_o,
                seed,
                accuracy: acc,
                baseline_accuracy: base_mean,
                boost_pp: 100.0 * (acc - base_mean),
            });
        }
    }
    rows
}

/// Per-cell aggregate recomputed from flat rows.
#[derive(Clone, Debug)]
pub struct CellAgg {
    pub alpha: f64,
    pub gamma_o: f64,
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub boost: f64,
}

/// Everything the derived reports need, recomputed from rows.
#[derive(Clone, Debug)]
pub struct Aggregates {
    pub baseline_accuracies: Vec<f64>,
    pub baseline_mean: f64,
    pub cells: BTreeMap<CellKey, CellAgg>,
}

pub fn aggregate(rows: &[RunRow]) -> Result<Aggregates, ReportError> {
    let mut baseline_accuracies = Vec::new();
    let mut groups: BTreeMap<CellKey, CellAgg> = BTreeMap::new();
    for row in rows {
        match row.operator {
            None => baseline_accuracies.push(row.accuracy),
            Some(op) => {
                let key = CellKey::new(op, row.alpha, row.gamma_o);
                groups
                    .entry(key)
                    .or_insert_with(|| CellAgg {
                        alpha: row.alpha,
                        gamma_o: row.gamma_o,
                        accuracies: Vec::new(),
                        mean_accuracy: 0.0,
                        boost: 0.0,
                    })
                    .accuracies
                    .push(row.accuracy);
            }
        }
    }
    if baseline_accuracies.is_empty() {
        return Err(ReportError::MissingBaseline);
    }
    let baseline_mean =
        baseline_accuracies.iter().sum::<f64>() / baseline_accuracies.len() as f64;
    for cell in groups.values_mut() {
        cell.mean_accuracy = cell.accuracies.iter().sum::<f64>() / cell.accuracies.len() as f64;
        cell.boost = 100.0 * (cell.mean_accuracy - baseline_mean);
    }
    Ok(Aggregates {
        baseline_accuracies,
        baseline_mean,
        cells: groups,
    })
}

fn runs_csv_string(rows: &[RunRow]) -> String {
    let mut out = String::from(RUNS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Best (alpha, boost) over the alpha grid for one operator and gamma row.
/// Ties resolve to the lowest alpha.
fn best_cell(agg: &Aggregates, op: Operator, gamma_millis: u32) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (key, cell) in &agg.cells {
        if key.operator != op || key.gamma_millis != gamma_millis {
            continue;
        }
        match best {
            Some((_, b)) if cell.boost <= b => {}
            _ => best = Some((cell.alpha, cell.boost)),
        }
    }
    best
}

fn summary_json(agg: &Aggregates) -> serde_json::Value {
    let mut operators: Vec<Operator> = agg
        .cells
        .keys()
        .map(|k| k.operator)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    operators.sort();
    let mut root = serde_json::Map::new();
    for op in operators {
        let traditional = best_cell(agg, op, TRADITIONAL_GAMMA_MILLIS);
        let mtv = best_cell(agg, op, MTV_GAMMA_MILLIS);
        let delta = match (traditional, mtv) {
            (Some((_, t)), Some((_, m))) => Some(m - t),
            _ => None,
        };
        let jnum = |x: f64| serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number);
        let opt_alpha = |b: Option<(f64, f64)>| b.map_or(serde_json::Value::Null, |(a, _)| jnum(a));
        let opt_boost = |b: Option<(f64, f64)>| b.map_or(serde_json::Value::Null, |(_, v)| jnum(round1(v)));
        let mut entry = serde_json::Map::new();
        entry.insert("best_alpha_traditional".into(), opt_alpha(traditional));
        entry.insert("boost_traditional".into(), opt_boost(traditional));
        entry.insert("best_alpha_mtv".into(), opt_alpha(mtv));
        entry.insert("boost_mtv".into(), opt_boost(mtv));
        entry.insert(
            "delta_mtv".into(),
            delta.map_or(serde_json::Value::Null, |d| jnum(round1(d))),
        );
        root.insert(op.name().to_string(), serde_json::Value::Object(entry));
    }
    serde_json::Value::Object(root)
}

fn curves_csv_string(agg: &Aggregates) -> String {
    let mut out = String::from("operator,alpha,framework,mean_boost_pp\n");
    for (key, cell) in &agg.cells {
        let framework = match key.gamma_millis {
            TRADITIONAL_GAMMA_MILLIS => "traditional",
            MTV_GAMMA_MILLIS => "mtv",
            _ => continue,
        };
        let _ = writeln!(
            out,
            "{},{},{},{}",
            key.operator.name(),
            cell.alpha,
            framework,
            cell.boost
        );
    }
    out
}

/// Heatmap matrix: first row is the alpha grid, first column the gamma grid,
/// body cells are boosts averaged over all operators present at that cell.
fn heatmap_csv_string(agg: &Aggregates) -> String {
    let mut alphas: Vec<u32> = Vec::new();
    let mut gammas: Vec<u32> = Vec::new();
    for key in agg.cells.keys() {
        if !alphas.contains(&key.alpha_millis) {
            alphas.push(key.alpha_millis);
        }
        if !gammas.contains(&key.gamma_millis) {
            gammas.push(key.gamma_millis);
        }
    }
    alphas.sort_unstable();
    gammas.sort_unstable();

    let mut out = String::new();
    for &a in &alphas {
        let _ = write!(out, ",{}", a as f64 / 1000.0);
    }
    out.push('\n');
    for &g in &gammas {
        let _ = write!(out, "{}", g as f64 / 1000.0);
        for &a in &alphas {
            let boosts: Vec<f64> = agg
                .cells
                .iter()
                .filter(|(k, _)| k.alpha_millis == a && k.gamma_millis == g)
                .map(|(_, c)| c.boost)
                .collect();
            if boosts.is_empty() {
                out.push(',');
            } else {
                let mean = boosts.iter().sum::<f64>() / boosts.len() as f64;
                let _ = write!(out, ",{mean}");
            }
        }
        out.push('\n');
    }
    out
}

fn write_derived(agg: &Aggregates, out_dir: &Path) -> Result<(), ReportError> {
    let summary = serde_json::to_string_pretty(&summary_json(agg)).expect("summary serializes");
    std::fs::write(out_dir.join("summary.json"), summary + "\n")?;
    std::fs::write(out_dir.join("curves.csv"), curves_csv_string(agg))?;
    std::fs::write(out_dir.join("heatmap.csv"), heatmap_csv_string(agg))?;
    Ok(())
}

/// Writes runs.csv, summary.json, curves.csv, and heatmap.csv for a sweep.
pub fn emit_report(result: &SweepResult, out_dir: impl AsRef<Path>) -> Result<(), ReportError> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    let rows = rows_from_sweep(result);
    std::fs::write(out_dir.join("runs.csv"), runs_csv_string(&rows))?;
    let agg = aggregate(&rows)?;
    write_derived(&agg, out_dir)
}

fn read_rows(content: &str, tolerant_tail: bool) -> Result<Vec<RunRow>, ReportError> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| ReportError::SchemaError {
        expected: RUNS_HEADER.to_string(),
        got: String::new(),
    })?;
    if header != RUNS_HEADER {
        return Err(ReportError::SchemaError {
            expected: RUNS_HEADER.to_string(),
            got: header.to_string(),
        });
    }
    let remaining: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.is_empty()).collect();
    let mut rows = Vec::with_capacity(remaining.len());
    for (pos, (i, line)) in remaining.iter().enumerate() {
        match RunRow::parse(line, i + 1) {
            Ok(row) => rows.push(row),
            // A journal interrupted mid-write may end with a torn line.
            Err(_) if tolerant_tail && pos + 1 == remaining.len() => break,
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// Reads and validates a runs.csv file.
pub fn read_runs_csv(path: impl AsRef<Path>) -> Result<Vec<RunRow>, ReportError> {
    let content = std::fs::read_to_string(path)?;
    read_rows(&content, false)
}

/// Reads a runs.csv journal, dropping a torn final line if present.
pub fn read_runs_journal(path: impl AsRef<Path>) -> Result<Vec<RunRow>, ReportError> {
    let content = std::fs::read_to_string(path)?;
    read_rows(&content, true)
}

/// Regenerates summary.json, curves.csv, and heatmap.csv from a stored
/// runs.csv without retraining.
pub fn regenerate_report(
    runs_csv: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
) -> Result<(), ReportError> {
    let rows = read_runs_csv(runs_csv)?;
    let agg = aggregate(&rows)?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    write_derived(&agg, out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(op: Option<Operator>, alpha: f64, gamma: f64, seed: u64, acc: f64, base: f64) -> RunRow {
        RunRow {
            operator: op,
            alpha,
            gamma_o: gamma,
            seed,
            accuracy: acc,
            baseline_accuracy: base,
            boost_pp: 100.0 * (acc - base),
        }
    }

    /// Hand-built rows: baseline 0.845; substitution traditional best boost
    /// 1.3 at alpha 0.05, mtv best boost 2.1 at alpha 0.3.
    fn fixture_rows() -> Vec<RunRow> {
        let base = 0.845;
        vec![
            row(None, 0.0, 1.0, 1, 0.845, base),
            row(None, 0.0, 1.0, 2, 0.845, base),
            row(Some(Operator::Substitution), 0.05, 0.0, 1, 0.858, base),
            row(Some(Operator::Substitution), 0.05, 0.0, 2, 0.858, base),
            row(Some(Operator::Substitution), 0.3, 0.0, 1, 0.82, base),
            row(Some(Operator::Substitution), 0.3, 0.0, 2, 0.82, base),
            row(Some(Operator::Substitution), 0.05, 0.5, 1, 0.855, base),
            row(Some(Operator::Substitution), 0.05, 0.5, 2, 0.855, base),
            row(Some(Operator::Substitution), 0.3, 0.5, 1, 0.866, base),
            row(Some(Operator::Substitution), 0.3, 0.5, 2, 0.866, base),
        ]
    }

    #[test]
    fn aggregate_recomputes_boosts() {
        let rows = fixture_rows();
        let agg = aggregate(&rows).unwrap();
        assert!((agg.baseline_mean - 0.845).abs() < 1e-12);
        let key = CellKey::new(Operator::Substitution, 0.05, 0.0);
        assert!((agg.cells[&key].boost - 1.3).abs() < 1e-9);
    }

    #[test]
    fn summary_reproduces_delta_arithmetic() {
        let agg = aggregate(&fixture_rows()).unwrap();
        let summary = summary_json(&agg);
        let sub = &summary["substitution"];
        assert_eq!(sub["best_alpha_traditional"], 0.05);
        assert!((sub["boost_traditional"].as_f64().unwrap() - 1.3).abs() < 1e-9);
        assert_eq!(sub["best_alpha_mtv"], 0.3);
        assert!((sub["boost_mtv"].as_f64().unwrap() - 2.1).abs() < 1e-9);
        assert!((sub["delta_mtv"].as_f64().unwrap() - 0.8).abs() < 1e-9);
    }

    #[test]
    fn heatmap_shape_matches_grids() {
        let agg = aggregate(&fixture_rows()).unwrap();
        let csv = heatmap_csv_string(&agg);
        let lines: Vec<&str> = csv.lines().collect();
        // 2 gammas + header row; 2 alphas + leading gamma column.
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], ",0.05,0.3");
        for body in &lines[1..] {
            assert_eq!(body.split(',').count(), 3);
        }
    }

    #[test]
    fn rows_roundtrip_through_csv() {
        let rows = fixture_rows();
        let csv = runs_csv_string(&rows);
        let parsed = read_rows(&csv, false).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn header_mismatch_is_schema_error() {
        assert!(matches!(
            read_rows("operator,alpha\nx,y\n", false),
            Err(ReportError::SchemaError { .. })
        ));
    }

    #[test]
    fn missing_baseline_detected() {
        let rows = vec![row(Some(Operator::Dropout), 0.1, 0.0, 1, 0.8, 0.79)];
        assert!(matches!(aggregate(&rows), Err(ReportError::MissingBaseline)));
    }

    #[test]
    fn tolerant_reader_drops_torn_tail() {
        let rows = fixture_rows();
        let mut csv = runs_csv_string(&rows);
        csv.push_str("substitution,0.3,0.5,2,0.8");
        assert!(read_rows(&csv, false).is_err());
        let parsed = read_rows(&csv, true).unwrap();
        assert_eq!(parsed.len(), rows.len());
    }

    #[test]
    fn curves_include_both_frameworks() {
        let agg = aggregate(&fixture_rows()).unwrap();
        let csv = curves_csv_string(&agg);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "operator,alpha,framework,mean_boost_pp");
        assert_eq!(lines.len(), 1 + 4);
        assert!(lines[1..].iter().any(|l| l.contains(",traditional,")));
        assert!(lines[1..].iter().any(|l| l.contains(",mtv,")));
    }
}
