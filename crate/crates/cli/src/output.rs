//! CSV output with a `#`-prefixed provenance preamble.
//!
//! The preamble names the subcommand, the build's git description, the seed,
//! every parameter and the unit of each column, so a run can be reconstructed
//! from its file. It carries nothing run-dependent such as timestamps, so
//! identical invocations produce identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub const VERSION: &str = env!("TEQKD_GIT_DESCRIBE");

/// A CSV table whose columns carry units.
pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
    width: usize,
}

impl Table {
    /// Opens `path` (stdout if `None`) and writes the preamble and header.
    pub fn create(
        path: Option<&Path>,
        command: &str,
        seed: u64,
        params: &[(&str, String)],
        columns: &[(&str, &str)],
    ) -> io::Result<Self> {
        let mut out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        writeln!(out, "# teqkd {command}")?;
        writeln!(out, "# version: {VERSION}")?;
        writeln!(out, "# seed: {seed}")?;
        for (k, v) in params {
            writeln!(out, "# param {k}: {v}")?;
        }
        let units: Vec<String> = columns.iter().map(|(c, u)| format!("{c}={u}")).collect();
        writeln!(out, "# units: {}", units.join(", "))?;
        let mut writer = csv::WriterBuilder::new().from_writer(out);
        writer.write_record(columns.iter().map(|(c, _)| *c))?;
        Ok(Self { writer, width: columns.len() })
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        assert_eq!(fields.len(), self.width, "row width differs from header");
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.writer.flush()
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

/// Plain decimal, for dB values and counts-like reals.
pub fn plain(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

/// Shortest round-trip scientific form; empty for a missing value.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}
