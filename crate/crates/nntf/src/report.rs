//! Tab-separated result files and the aligned summary table.
//!
//! Floats are written in Rust's shortest round-trip form, so aggregates
//! recomputed from `runs.tsv` match `report.tsv` bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{Estimator, ExperimentReport, MeanStd, RunResult};

pub const RUNS_HEADER: &str = "repetition\testimator\trisk\tbins\tcomponents";
pub const REPORT_HEADER: &str =
    "estimator\trisk_mean\trisk_std\tbins_mean\tbins_std\tcomponents_mean\tcomponents_std\tp_value";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn runs_to_tsv(runs: &[RunResult]) -> String {
    let mut out = format!("{RUNS_HEADER}\n");
    for r in runs {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.repetition,
            r.estimator,
            r.risk,
            r.bins,
            opt(r.components)
        );
    }
    out
}

pub fn report_to_tsv(report: &ExperimentReport) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for s in &report.summaries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.estimator,
            s.risk.mean,
            s.risk.std,
            s.bins.mean,
            s.bins.std,
            opt(s.components.map(|c| c.mean)),
            opt(s.components.map(|c| c.std)),
            opt(s.p_value)
        );
    }
    out
}

/// Parses a `runs.tsv` file body.
pub fn runs_from_tsv(text: &str, path: &Path) -> Result<Vec<RunResult>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RUNS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                message: "missing runs header".into(),
            })
        }
    }
    let mut runs = Vec::new();
    for (i, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |message: String| Error::Parse {
            path: path.into(),
            line: i + 1,
            message,
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
        runs.push(RunResult {
            repetition: int(f[0])?,
            estimator: f[1].parse().map_err(|e: Error| bad(e.to_string()))?,
            risk: num(f[2])?,
            bins: int(f[3])?,
            components: if f[4] == "-" { None } else { Some(int(f[4])?) },
        });
    }
    Ok(runs)
}

pub fn write_outputs(dir: &Path, runs: &[RunResult], report: &ExperimentReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let runs_path = dir.join("runs.tsv");
    fs::write(&runs_path, runs_to_tsv(runs)).map_err(|e| Error::io(&runs_path, e))?;
    let report_path = dir.join("report.tsv");
    fs::write(&report_path, report_to_tsv(report)).map_err(|e| Error::io(&report_path, e))
}

fn pm(m: &MeanStd, digits: usize) -> String {
    format!("{:.*} ± {:.*}", digits, m.mean, digits, m.std)
}

/// Human-readable table with one row per estimator.
pub fn render_table(report: &ExperimentReport) -> String {
    let header = ["estimator", "risk", "bins", "k", "p (vs standard)"];
    let rows: Vec<[String; 5]> = report
        .summaries
        .iter()
        .map(|s| {
            [
                s.estimator.to_string(),
                pm(&s.risk, 3),
                pm(&s.bins, 1),
                s.components.map_or_else(|| "-".into(), |c| pm(&c, 1)),
                s.p_value.map_or_else(|| "-".into(), |p| format!("{p:.1e}")),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header.map(String::from));
    for row in &rows {
        line(row);
    }
    let _ = writeln!(out, "({} repetitions)", report.repetitions);
    out
}

/// Convenience for callers holding only the estimator list.
pub fn recompute(runs: &[RunResult], estimators: &[Estimator]) -> Result<ExperimentReport> {
    ExperimentReport::from_runs(runs, estimators)
}
