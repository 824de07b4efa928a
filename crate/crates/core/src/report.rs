//! Report documents: JSON plus a flat CSV table.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::criterion::GridPoint;
use crate::error::{Error, Result};
use crate::fpp::SimulationSummary;

pub const TOOL: &str = "powerfpp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const GRID_HEADER: [&str; 4] = ["s", "t", "f_value", "f_err"];
pub const SUMMARY_HEADER: [&str; 14] = [
    "graph", "n", "hamming_k", "weights", "seed", "replicas", "mean", "stderr", "q05", "q25", "q50", "q75", "q95",
    "mean_geodesic_length",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// A CSV table; cells are already formatted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

// shortest round-trip representation, so bytes depend only on the value
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn grid_table(points: &[GridPoint]) -> Table {
    let mut t = Table::new(&GRID_HEADER);
    t.rows = points.iter().map(|p| vec![num(p.s), num(p.t), num(p.value), num(p.err)]).collect();
    t
}

pub fn summary_table(summaries: &[SimulationSummary]) -> Table {
    let mut t = Table::new(&SUMMARY_HEADER);
    for s in summaries {
        let mut row = vec![
            s.graph.clone(),
            s.n.to_string(),
            s.hamming_k.map(|k| k.to_string()).unwrap_or_default(),
            s.weights.clone(),
            s.seed.to_string(),
            s.replicas.to_string(),
            num(s.mean),
            num(s.stderr),
        ];
        row.extend(s.quantiles.iter().map(|q| num(q.value)));
        row.push(num(s.geodesic_lengths.mean));
        t.rows.push(row);
    }
    t
}

/// One command's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: Value,
    pub results: Value,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, config: Value, results: Value, table: Table) -> Self {
        Report { tool: TOOL.into(), version: VERSION.into(), command: command.into(), seed, config, results, table }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv(),
        })
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let body = report.render(format)?;
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, body)?,
        _ => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_is_header_only() {
        assert_eq!(grid_table(&[]).to_csv(), "s,t,f_value,f_err\n");
        assert_eq!(summary_table(&[]).to_csv().lines().count(), 1);
    }

    #[test]
    fn rows_round_trip_numbers() {
        let p = GridPoint { s: 0.1, t: 1.0 / 3.0, value: -0.25, err: 1e-13 };
        let csv = grid_table(&[p]).to_csv();
        let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1, 1.0 / 3.0, -0.25, 1e-13]);
    }

    #[test]
    fn json_has_version_and_no_table() {
        let r = Report::new("x", Some(3), Value::Null, serde_json::json!({"a": 1}), grid_table(&[]));
        let v: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["tool"], TOOL);
        assert_eq!(v["seed"], 3);
        assert!(v.get("table").is_none());
    }
}
