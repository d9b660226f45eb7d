use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Table,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "table" | "text" => Ok(ReportFormat::Table),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// Percent error with one decimal, as printed in the result tables.
pub fn format_percent(p: f64) -> String {
    format!("{p:.1}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "run", "test_errors", "chosen_SL", "chosen_sigma", "chosen_alpha"])?;
    for m in &report.methods {
        let name = m.method.name();
        for r in &m.runs {
            w.write_record([
                name.to_string(),
                r.run.to_string(),
                r.test_errors.to_string(),
                opt(r.chosen.window()),
                opt(r.chosen.sigma()),
                opt(r.chosen.alpha()),
            ])?;
        }
        w.write_record([name, "total", &m.total_errors.to_string(), "", "", ""])?;
        w.write_record([name, "percent", &format_percent(m.percent_error), "", "", ""])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Validation(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn table(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} runs, {} test instances per run", report.runs, report.test_size);
    let _ = writeln!(out, "{:<8} {:>22} {:>14}", "Method", "Total Number of Errors", "Percent Error");
    for m in &report.methods {
        let _ = writeln!(
            out,
            "{:<8} {:>22} {:>14}",
            m.method.name(),
            m.total_errors,
            format_percent(m.percent_error)
        );
    }
    out
}

/// The report rendered in `format`.
pub fn render_report(report: &RunReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => csv(report),
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Table => Ok(table(report)),
    }
}

pub fn emit_report(report: &RunReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_report(report, format)?).map_err(|e| Error::io(path, e))
}
