//! Experiment drivers behind the command-line subcommands. Each writes CSV
//! files into an output directory.

pub mod pattern;
pub mod simulate;
pub mod sweep_offset;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub use pattern::run_pattern;
pub use simulate::{run_simulation, SimulationOutput, SummaryRow};
pub use sweep_offset::run_sweep_offset;

/// Writes `rows` to `path` as CSV with a header taken from the row type.
pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `10 log10(p)`, clamped so that exact nulls stay finite in the CSV.
pub(crate) fn to_db(p: f64) -> f64 {
    10.0 * p.max(1e-30).log10()
}
