//! Fixed-format text summary of result files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::{read_summary, Comparison, Summary, SUMMARY_FILE};

/// Summary files under `path`: the file itself, or every `summary.json` in
/// the directory and its immediate subdirectories, sorted by path.
pub fn find_summaries(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    if !path.is_dir() {
        return Err(CliError::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        });
    }
    let mut found = Vec::new();
    let direct = path.join(SUMMARY_FILE);
    if direct.is_file() {
        found.push(direct);
    }
    let entries = std::fs::read_dir(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    for entry in entries.flatten() {
        let p = entry.path().join(SUMMARY_FILE);
        if p.is_file() {
            found.push(p);
        }
    }
    found.sort();
    Ok(found)
}

fn format_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) => format!("{x:.10e}"),
            None => n.to_string(),
        },
        Value::Null => "n/a".into(),
        other => other.to_string(),
    }
}

pub fn render(summary: &Summary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", summary.scenario);
    let _ = writeln!(s, "experiment: {}", summary.experiment);
    if let Some(Value::Object(head)) = summary.results.get("headline") {
        let _ = writeln!(s, "headline:");
        for (k, v) in head {
            let _ = writeln!(s, "  {k:<28} {}", format_value(v));
        }
    }
    if summary.checks.is_empty() {
        let _ = writeln!(s, "checks: none");
    } else {
        let _ = writeln!(s, "checks:");
        for c in &summary.checks {
            let op = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            let _ = writeln!(
                s,
                "  {} {:<36} {:.3e} {op} {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
    }
    let passed = summary.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(
        s,
        "result: {} ({passed}/{} checks passed)",
        if summary.passed { "PASS" } else { "FAIL" },
        summary.checks.len()
    );
    s
}

/// Report text for every summary found and whether all of them passed.
pub fn report(path: &Path) -> CliResult<(String, bool)> {
    let files = find_summaries(path)?;
    if files.is_empty() {
        return Ok(("no experiments run\n".into(), true));
    }
    let mut text = String::new();
    let mut all = true;
    for (i, f) in files.iter().enumerate() {
        let summary = read_summary(f)?;
        all &= summary.passed;
        if i > 0 {
            text.push('\n');
        }
        text.push_str(&render(&summary));
    }
    Ok((text, all))
}
