//! Report rendering (csv, json, markdown) and the line-per-run results
//! file.
//!
//! CSV and the results file print floats with the shortest round-trip
//! representation, so re-parsing reproduces the exact values and
//! re-rendering is byte-identical.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::algorithm::AlgorithmKind;
use crate::bench::{BenchmarkReport, CellStats, Comparison, RunRecord};
use crate::error::{Error, Result};
use crate::objectives::ObjectiveId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidParameter(format!(
                "unknown report format `{other}` (expected csv, json or markdown)"
            ))),
        }
    }
}

const RESULTS_HEADER: &str = "algorithm,objective,seed,best_value,iterations,stop_reason";
const REPORT_HEADER: &str =
    "section,objective,algorithm_a,algorithm_b,mean,std_dev,runs,t,df,p,degenerate,significant";

/// Render a report in the requested format; byte-identical for identical
/// reports.
pub fn render_report(report: &BenchmarkReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => render_markdown(report),
    }
}

fn render_csv(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# test={}\n", report.test));
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for c in &report.cells {
        out.push_str(&format!(
            "cell,{},{},,{},{},{},,,,,\n",
            c.objective, c.algorithm, c.mean, c.std_dev, c.runs
        ));
    }
    for c in &report.comparisons {
        out.push_str(&format!(
            "comparison,{},{},{},,,,{},{},{},{},{}\n",
            c.objective,
            c.algorithm_a,
            c.algorithm_b,
            c.t,
            c.df,
            c.p,
            c.degenerate,
            c.significant()
        ));
    }
    out
}

fn render_markdown(report: &BenchmarkReport) -> String {
    let mut objectives: Vec<ObjectiveId> = Vec::new();
    let mut algorithms: Vec<AlgorithmKind> = Vec::new();
    for c in &report.cells {
        if !objectives.contains(&c.objective) {
            objectives.push(c.objective);
        }
        if !algorithms.contains(&c.algorithm) {
            algorithms.push(c.algorithm);
        }
    }
    let mut out = String::from("# Benchmark report\n\n");
    out.push_str(&format!("Statistical test: {}.\n\n", report.test));
    out.push_str("## Mean best value (standard deviation)\n\n");
    out.push_str("| Function |");
    for a in &algorithms {
        out.push_str(&format!(" {a} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    out.push_str(&"---|".repeat(algorithms.len()));
    out.push('\n');
    for &objective in &objectives {
        out.push_str(&format!("| {objective} |"));
        for &algorithm in &algorithms {
            match report
                .cells
                .iter()
                .find(|c| c.objective == objective && c.algorithm == algorithm)
            {
                Some(c) => out.push_str(&format!(" {:.4e} ({:.4e}) |", c.mean, c.std_dev)),
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }

    if !report.comparisons.is_empty() {
        let mut pairs: Vec<(AlgorithmKind, AlgorithmKind)> = Vec::new();
        for c in &report.comparisons {
            let pair = (c.algorithm_a, c.algorithm_b);
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
        out.push_str("\n## Pairwise p-values (* marks p < 0.05)\n\n");
        out.push_str("| Function |");
        for (a, b) in &pairs {
            out.push_str(&format!(" {a} vs {b} |"));
        }
        out.push('\n');
        out.push_str("|---|");
        out.push_str(&"---|".repeat(pairs.len()));
        out.push('\n');
        for &objective in &objectives {
            out.push_str(&format!("| {objective} |"));
            for &(a, b) in &pairs {
                match report.comparisons.iter().find(|c| {
                    c.objective == objective && c.algorithm_a == a && c.algorithm_b == b
                }) {
                    Some(c) => {
                        let star = if c.significant() { "*" } else { "" };
                        out.push_str(&format!(" {:.3e}{star} |", c.p));
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
    }
    out
}

fn parse_f64(field: &str, context: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::MalformedResults(format!("bad float `{field}` in {context}")))
}

/// Parse a csv-format report back into its exact values.
pub fn parse_report_csv(text: &str) -> Result<BenchmarkReport> {
    let mut lines = text.lines();
    let test = lines
        .next()
        .and_then(|l| l.strip_prefix("# test="))
        .ok_or_else(|| Error::MalformedResults("missing test header".into()))?
        .to_owned();
    match lines.next() {
        Some(h) if h == REPORT_HEADER => {}
        other => {
            return Err(Error::MalformedResults(format!(
                "bad report header: {other:?}"
            )))
        }
    }
    let mut cells = Vec::new();
    let mut comparisons = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(Error::MalformedResults(format!(
                "expected 12 fields, got {} in `{line}`",
                f.len()
            )));
        }
        match f[0] {
            "cell" => cells.push(CellStats {
                objective: f[1].parse()?,
                algorithm: f[2].parse()?,
                mean: parse_f64(f[4], "cell mean")?,
                std_dev: parse_f64(f[5], "cell std_dev")?,
                runs: f[6]
                    .parse()
                    .map_err(|_| Error::MalformedResults("bad run count".into()))?,
            }),
            "comparison" => comparisons.push(Comparison {
                objective: f[1].parse()?,
                algorithm_a: f[2].parse()?,
                algorithm_b: f[3].parse()?,
                t: parse_f64(f[7], "comparison t")?,
                df: parse_f64(f[8], "comparison df")?,
                p: parse_f64(f[9], "comparison p")?,
                degenerate: f[10] == "true",
            }),
            other => {
                return Err(Error::MalformedResults(format!(
                    "unknown report section `{other}`"
                )))
            }
        }
    }
    Ok(BenchmarkReport {
        cells,
        comparisons,
        test,
    })
}

/// Serialize run records, one line each, with a fixed header.
pub fn records_to_string(records: &[RunRecord]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.algorithm, r.objective, r.seed, r.best_value, r.iterations, r.stop_reason
        ));
    }
    out
}

/// Parse a results file produced by [`records_to_string`].
pub fn records_from_str(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RESULTS_HEADER => {}
        other => {
            return Err(Error::MalformedResults(format!(
                "bad results header: {other:?}"
            )))
        }
    }
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(Error::MalformedResults(format!(
                "expected 6 fields, got {} in `{line}`",
                f.len()
            )));
        }
        records.push(RunRecord {
            algorithm: f[0].parse()?,
            objective: f[1].parse()?,
            seed: f[2]
                .parse()
                .map_err(|_| Error::MalformedResults("bad seed".into()))?,
            best_value: parse_f64(f[3], "best_value")?,
            iterations: f[4]
                .parse()
                .map_err(|_| Error::MalformedResults("bad iteration count".into()))?,
            stop_reason: f[5].parse()?,
        });
    }
    Ok(records)
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    fs::write(path, records_to_string(records))?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    records_from_str(&fs::read_to_string(path)?)
}
