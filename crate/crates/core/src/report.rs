//! Versioned JSON and flattened CSV reports.
//!
//! JSON floats are written with 17 significant digits; non-finite values
//! become `null`. CSV output of a field is the grid-function layout; any
//! other result is flattened to `key,value` rows whose keys are dotted JSON
//! paths (array positions as numbers).

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// One result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportItem {
    pub kind: String,
    pub data: Value,
    /// Native CSV form, used instead of flattening when present.
    pub csv: Option<String>,
}

impl ReportItem {
    pub fn new(kind: &str, data: &impl Serialize) -> Result<Self> {
        let data = serde_json::to_value(data).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(ReportItem { kind: kind.into(), data, csv: None })
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    /// `None` for runs without a check.
    pub pass: Option<bool>,
    pub results: Vec<ReportItem>,
}

struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// JSON text with full-precision floats.
pub fn to_json(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("writing to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes utf-8")
}

fn envelope(report: &Report) -> Value {
    let results: Vec<Value> = report
        .results
        .iter()
        .map(|r| serde_json::json!({ "kind": r.kind, "data": r.data }))
        .collect();
    serde_json::json!({
        "schema": SCHEMA_VERSION,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": report.command,
        "config": report.config,
        "pass": report.pass,
        "results": results,
    })
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(f)) => format!("{f:.16e}"),
                _ => n.to_string(),
            };
            let _ = writeln!(out, "{},{text}", csv_cell(prefix));
        }
        Value::String(s) => {
            let _ = writeln!(out, "{},{}", csv_cell(prefix), csv_cell(s));
        }
        Value::Bool(b) => {
            let _ = writeln!(out, "{},{b}", csv_cell(prefix));
        }
        Value::Null => {
            let _ = writeln!(out, "{},", csv_cell(prefix));
        }
    }
}

/// The report as text.
pub fn render_report(report: &Report, format: Format) -> Result<String> {
    if report.results.is_empty() {
        return Err(Error::InvalidParameter("a report needs at least one result".into()));
    }
    match format {
        Format::Json => Ok(to_json(&envelope(report))),
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# schema: {SCHEMA_VERSION}");
            let _ = writeln!(out, "# command: {}", report.command);
            let _ = writeln!(out, "# config: {}", report.config);
            match report.pass {
                Some(p) => {
                    let _ = writeln!(out, "# pass: {p}");
                }
                None => out.push_str("# pass: n/a\n"),
            }
            let single_field = report.results.len() == 1 && report.results[0].csv.is_some();
            for (i, r) in report.results.iter().enumerate() {
                if !single_field {
                    let _ = writeln!(out, "# result {i}: {}", r.kind);
                }
                match &r.csv {
                    Some(csv) => out.push_str(csv),
                    None => {
                        out.push_str("key,value\n");
                        flatten("", &r.data, &mut out);
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render_report(report, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
