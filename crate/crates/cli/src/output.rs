//! Deterministic text output. Every float is written with 17 significant
//! digits in scientific notation, so identical runs give identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// A float that serializes as its [`fmt_float`] text; non-finite values
/// become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float(pub f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_float(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn floats(xs: &[f64]) -> Vec<Float> {
    xs.iter().copied().map(Float).collect()
}

/// Stdout or a file, chosen by `--output`.
pub fn open_sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).map_err(|source| io_err(p, source))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

pub fn io_err(path: &Path, source: io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_csv(sink: Box<dyn Write>, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
        .map_err(|e| io_err(&PathBuf::from("<output>"), e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(mut sink: Box<dyn Write>, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut sink, value)?;
    writeln!(sink)
        .and_then(|_| sink.flush())
        .map_err(|e| io_err(&PathBuf::from("<output>"), e))
}
