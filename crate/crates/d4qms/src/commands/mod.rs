//! The `exact`, `run` and `analyze` subcommands.

mod analyze;
mod exact;
mod run;

pub use analyze::{cmd_analyze, DsupTriplet, Estimate, HistogramReport, PlaquetteReport, Report, REPORT_FILE};
pub use exact::{cmd_exact, ExactModels, GridModel, Level, PlaquetteReference, ThermalRow, MODELS_FILE};
pub use run::{cmd_run, SAMPLES_FILE};

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(CliError::json(path))?;
    std::fs::write(path, text + "\n").map_err(CliError::io(path))
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path).map_err(CliError::csv(path))?;
    w.write_record(header).map_err(CliError::csv(path))?;
    for row in rows {
        w.write_record(row).map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))
}
