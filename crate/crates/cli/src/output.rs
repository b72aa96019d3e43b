//! Report files: one JSON and/or CSV file per instance plus a summary.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tfq_core::verify::{ExperimentReport, ToleranceKind};

use crate::config::Formats;

/// File stem for an instance id such as `check_x/p=0.5,s=2`.
pub fn file_stem(instance_id: &str) -> String {
    instance_id
        .chars()
        .map(|c| match c {
            '/' => '.',
            ',' => '_',
            c if c.is_ascii_alphanumeric() || "._=-".contains(c) => c,
            _ => '-',
        })
        .collect()
}

fn kind_name(k: ToleranceKind) -> &'static str {
    match k {
        ToleranceKind::Abs => "abs",
        ToleranceKind::Rel => "rel",
        ToleranceKind::AtMost => "at_most",
        ToleranceKind::AtLeast => "at_least",
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "experiment_id,label,measured,target,tolerance,kind,satisfied\n";

/// One row per measured value; target columns are empty when the value has
/// no target.
pub fn report_csv_rows(r: &ExperimentReport) -> String {
    let mut out = String::new();
    for m in &r.measured {
        let id = csv_field(&r.experiment_id);
        let label = csv_field(&m.label);
        match r.targets.iter().find(|t| t.label == m.label) {
            Some(t) => writeln!(
                out,
                "{id},{label},{},{},{},{},{}",
                m.value,
                t.value,
                t.tolerance,
                kind_name(t.kind),
                t.satisfied_by(m.value)
            ),
            None => writeln!(out, "{id},{label},{},,,,", m.value),
        }
        .expect("write to string");
    }
    out
}

#[derive(Serialize)]
struct SummaryEntry<'a> {
    experiment_id: &'a str,
    pass: bool,
    failures: Vec<&'a str>,
    file: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    total: usize,
    passed: usize,
    failed: usize,
    reports: Vec<SummaryEntry<'a>>,
}

fn to_json<T: Serialize>(v: &T) -> io::Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(io::Error::other)?;
    s.push('\n');
    Ok(s)
}

/// Writes every report and the summary; returns the written paths.
pub fn write_all(
    dir: &Path,
    reports: &[ExperimentReport],
    formats: Formats,
    seed: u64,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut all_rows = String::from(CSV_HEADER);
    let mut entries = Vec::new();
    for r in reports {
        let stem = file_stem(&r.experiment_id);
        if formats.json {
            let p = dir.join(format!("{stem}.json"));
            fs::write(&p, to_json(r)?)?;
            written.push(p);
        }
        let rows = report_csv_rows(r);
        if formats.csv {
            let p = dir.join(format!("{stem}.csv"));
            fs::write(&p, format!("{CSV_HEADER}{rows}"))?;
            written.push(p);
        }
        all_rows.push_str(&rows);
        entries.push(SummaryEntry {
            experiment_id: &r.experiment_id,
            pass: r.pass,
            failures: r.failures(),
            file: stem,
        });
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let summary = Summary {
        seed,
        total: reports.len(),
        passed,
        failed: reports.len() - passed,
        reports: entries,
    };
    let p = dir.join("summary.json");
    fs::write(&p, to_json(&summary)?)?;
    written.push(p);
    if formats.csv {
        let p = dir.join("summary.csv");
        fs::write(&p, all_rows)?;
        written.push(p);
    }
    Ok(written)
}
