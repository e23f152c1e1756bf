//! Config-driven experiments: reference runs with per-generation
//! predictions, verification suites over random small instances, oracle
//! dumps, schema censuses and SVG plots.
//!
//! All CSV files start with the comment line `# schema-forge v1`.

pub mod config;
pub mod plot;
pub mod run;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

pub use config::{ExperimentConfig, Mode, Theorem, DEFAULT_GP_CONFIG};
pub use plot::{emit_plot, PlotSpec};
pub use run::{gp_seeded_runs, run_experiment, run_ga, run_gp, write_census, write_oracle, RunSummary};
pub use verify::{verify_theorems, PredictionReport, ReportRow, Verdict};

pub const CSV_VERSION_LINE: &str = "# schema-forge v1";

/// Process exit codes used by the command-line tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const CAP: i32 = 3;
    pub const VERDICT: i32 = 4;
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_)
        | Error::Parse(_)
        | Error::LengthMismatch { .. }
        | Error::TournamentTooLarge { .. }
        | Error::UnknownColumn(_)
        | Error::EmptyData
        | Error::Unsupported(_) => {
            exit::CONFIG
        }
        Error::CapExceeded(_) => exit::CAP,
        _ => exit::INTERNAL,
    }
}

/// A CSV table held in memory; cells are already formatted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(CSV_VERSION_LINE.as_bytes());
        out.push(b'\n');
        let mut writer = csv::Writer::from_writer(&mut out);
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        drop(writer);
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
        let header = reader.headers()?.iter().map(str::to_string).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }
}

/// Counts of each verdict, printed in the summary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerdictCounts(pub BTreeMap<Verdict, usize>);

impl VerdictCounts {
    pub fn failures(&self) -> usize {
        self.0.iter().filter(|(v, _)| v.is_failure()).map(|(_, c)| c).sum()
    }
}

impl fmt::Display for VerdictCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (verdict, count) in &self.0 {
            writeln!(f, "{verdict}: {count}")?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_f64(value: f64) -> String {
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{value:.6}")
}
