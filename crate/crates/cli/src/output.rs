//! Result files: a JSON summary plus CSV tables.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Scenario;
use crate::error::{CliError, CliResult};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::AtMost,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: Comparison::AtLeast,
            threshold,
            passed: value >= threshold,
        }
    }
}

/// Outcome of one experiment before it is written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Experiment-specific data; `headline` holds the numbers `report` prints.
    pub results: serde_json::Map<String, Value>,
    pub checks: Vec<Check>,
    /// `(file name, contents)`.
    pub tables: Vec<(String, String)>,
}

impl Outcome {
    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("serializable result");
        self.results.insert(key.into(), v);
    }

    pub fn headline(&mut self, key: &str, value: f64) {
        let entry = self
            .results
            .entry("headline")
            .or_insert_with(|| Value::Object(Default::default()));
        if let Value::Object(map) = entry {
            map.insert(key.into(), number(value));
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn table(&mut self, name: &str, contents: String) {
        self.tables.push((name.into(), contents));
    }

    /// Adds a long-form `<stem>.plot.csv` next to every table that has an x axis.
    pub fn add_plot_data(&mut self) -> CliResult<()> {
        let mut extra = Vec::new();
        for (name, contents) in &self.tables {
            if let Some(x) = plot_axis(name) {
                let stem = name.trim_end_matches(".csv");
                extra.push((format!("{stem}.plot.csv"), plot_data(name, contents, x)?));
            }
        }
        self.tables.extend(extra);
        Ok(())
    }
}

/// Column used as the x coordinate when a table is turned into plot data.
pub fn plot_axis(table: &str) -> Option<&'static str> {
    match table {
        "levels.csv" => Some("n"),
        "trajectory.csv" => Some("t"),
        "synchronism_scan.csv" => Some("k"),
        "dispersion.csv" => Some("kx"),
        "equivalence.csv" => Some("seed"),
        "scaling.csv" => Some("n_t"),
        "sweep.csv" => Some("value"),
        _ => None,
    }
}

/// `(x, y, series)` triples from every numeric column of a wide table. A
/// `sample` column, when present, is appended to the series label.
pub fn plot_data(name: &str, table: &str, x: &str) -> CliResult<String> {
    let corrupt = |message: String| CliError::Corrupt {
        path: name.to_string(),
        message,
    };
    let mut reader = csv::Reader::from_reader(table.as_bytes());
    let header = reader.headers().map_err(|e| corrupt(e.to_string()))?.clone();
    let column = |c: &str| header.iter().position(|h| h == c);
    let xi = column(x).ok_or_else(|| corrupt(format!("no column '{x}'")))?;
    let sample = column("sample");
    let mut out = String::from("x,y,series\n");
    for record in reader.records() {
        let record = record.map_err(|e| corrupt(e.to_string()))?;
        let Ok(xv) = record[xi].parse::<f64>() else {
            continue;
        };
        for (i, label) in header.iter().enumerate() {
            if i == xi || Some(i) == sample || label == "index" {
                continue;
            }
            let Ok(y) = record[i].parse::<f64>() else {
                continue;
            };
            let series = match sample {
                Some(si) => format!("{label}_{}", &record[si]),
                None => label.to_string(),
            };
            out.push_str(&format!("{},{},{}\n", f(xv), f(y), text(&series)));
        }
    }
    Ok(out)
}

/// Non-finite values become `null`, which JSON cannot otherwise represent.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub scenario: String,
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch; absent in reproducible mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub config: Scenario,
    pub results: serde_json::Map<String, Value>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub passed: bool,
}

impl Summary {
    pub fn new(scenario: &Scenario, experiment: &str, outcome: &Outcome, reproducible: bool) -> Self {
        let timestamp = (!reproducible).then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            scenario: scenario.name.clone(),
            experiment: experiment.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: scenario.seed,
            timestamp,
            config: scenario.clone(),
            results: outcome.results.clone(),
            checks: outcome.checks.clone(),
            files: outcome.tables.iter().map(|(n, _)| n.clone()).collect(),
            passed: outcome.checks.iter().all(|c| c.passed),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable summary");
        s.push('\n');
        s
    }
}

fn io(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_all(dir: &Path, summary: &Summary, outcome: &Outcome) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (name, contents) in &outcome.tables {
        let p = dir.join(name);
        std::fs::write(&p, contents).map_err(|e| io(&p, e))?;
    }
    let p = dir.join(SUMMARY_FILE);
    std::fs::write(&p, summary.to_json()).map_err(|e| io(&p, e))
}

/// Reads and re-validates a summary.
pub fn read_summary(path: &Path) -> CliResult<Summary> {
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Corrupt {
        path: path.display().to_string(),
        message: format!("{} at {}", e.inner(), e.path()),
    })
}

/// Full-precision CSV field.
pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV field for an optional value; empty when absent.
pub fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

/// CSV text field, quoted when it contains separators.
pub fn text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
