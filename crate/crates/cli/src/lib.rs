//! Library side of the `ordanova` command-line tool.

pub mod error;
pub mod report;
pub mod reproduce;
pub mod simulate;

use std::fs;
use std::path::Path;

use ordanova::{parse_table, ContingencyTable};

pub use error::CliError;
pub use report::{analyze, render_text, AnalyzeOptions, Report};

pub const TABLE3_CSV: &str = include_str!("../assets/table3.csv");
pub const TABLE4_CSV: &str = include_str!("../assets/table4.csv");

/// Embedded example dataset by name.
pub fn example_csv(name: &str) -> Option<&'static str> {
    match name {
        "table3" => Some(TABLE3_CSV),
        "table4" => Some(TABLE4_CSV),
        _ => None,
    }
}

pub fn read_table(path: &Path) -> Result<ContingencyTable, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    Ok(parse_table(&text)?)
}

/// Runs the analysis on an embedded example and attaches the published
/// values.
pub fn example_report(name: &str, opts: &AnalyzeOptions) -> Result<Report, CliError> {
    let text = example_csv(name).ok_or_else(|| CliError::Input(format!("unknown example '{name}'")))?;
    let table = parse_table(text)?;
    let mut report = analyze(&format!("example {name}"), &table, opts)?;
    if let Some((published_in, threshold)) = report::example_published(name) {
        report::attach_published(&mut report, published_in, threshold);
    }
    Ok(report)
}

pub fn to_json(report: &Report) -> Result<String, CliError> {
    serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))
}
