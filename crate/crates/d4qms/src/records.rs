//! Sample record CSV files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use d4qms_core::qms::SampleRecord;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

const HEADER: [&str; 8] = [
    "chain_id",
    "step",
    "energy_index",
    "energy_value",
    "plaquette",
    "accepted",
    "revert_iters",
    "aborted",
];

/// One CSV row; `plaquette` is empty when not measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct Row {
    chain_id: u64,
    step: u64,
    energy_index: usize,
    energy_value: f64,
    plaquette: Option<i8>,
    accepted: bool,
    revert_iters: usize,
    aborted: bool,
}

impl From<&SampleRecord> for Row {
    fn from(r: &SampleRecord) -> Self {
        Row {
            chain_id: r.chain_id,
            step: r.step,
            energy_index: r.energy_index,
            energy_value: r.energy_value,
            plaquette: r.plaquette,
            accepted: r.accepted,
            revert_iters: r.revert_iters,
            aborted: r.aborted,
        }
    }
}

impl From<Row> for SampleRecord {
    fn from(r: Row) -> Self {
        SampleRecord {
            chain_id: r.chain_id,
            step: r.step,
            energy_index: r.energy_index,
            energy_value: r.energy_value,
            plaquette: r.plaquette,
            accepted: r.accepted,
            revert_iters: r.revert_iters,
            aborted: r.aborted,
        }
    }
}

/// Streams records to a CSV file, flushing after every batch.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl RecordWriter<File> {
    pub fn create(path: &Path) -> CliResult<Self> {
        let file = File::create(path).map_err(CliError::io(path))?;
        Ok(Self::new(file))
    }
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W) -> Self {
        // header written by hand so that a file with no records still has one
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        inner.write_record(HEADER).expect("header fits in the buffer");
        Self { inner }
    }

    pub fn write_batch(&mut self, records: &[SampleRecord]) -> Result<(), csv::Error> {
        for r in records {
            self.inner.serialize(Row::from(r))?;
        }
        self.inner.flush()?;
        Ok(())
    }
}

pub fn read_records(path: &Path) -> CliResult<Vec<SampleRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
    rdr.deserialize::<Row>()
        .map(|r| r.map(SampleRecord::from).map_err(CliError::csv(path)))
        .collect()
}
