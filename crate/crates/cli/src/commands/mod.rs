pub mod calibrate;
pub mod demo;
pub mod eval;
pub mod fixtures;

use clap::ValueEnum;

/// Output format for the data table accompanying the JSON report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    /// JSON report only.
    #[default]
    Json,
    /// JSON report plus a CSV data table with the same stem.
    Csv,
}
