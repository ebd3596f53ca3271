//! CSV output for learning-curve and timing plots.

use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::runner::ResultTable;

/// Writes `run,episode,metric,seconds` rows ordered by (run, episode).
/// Metric columns replay exactly for equal seeds; the seconds column is
/// wall-clock and will not.
pub fn write_csv(table: &ResultTable, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    write_csv_to(table, &mut out)?;
    out.flush()
}

pub fn write_csv_to<W: Write>(table: &ResultTable, out: &mut W) -> io::Result<()> {
    writeln!(out, "run,episode,metric,seconds")?;
    for row in &table.rows {
        writeln!(out, "{},{},{},{}", row.run, row.episode, row.metric, row.seconds)?;
    }
    Ok(())
}
