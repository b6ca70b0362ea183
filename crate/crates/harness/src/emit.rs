//! Writing a [`ResultSet`] to disk.
//!
//! Layout under the output directory:
//!
//! - `config.toml`: the configuration that produced the run
//! - `records.jsonl`: one [`ResultRecord`] per line (json format)
//! - `timings.jsonl`: wall-clock seconds per record (json format)
//! - `tables/<name>.csv`: plot-ready tables (csv format)
//!
//! Floats in JSON are written as `{:.16e}`, which round-trips every `f64`.
//! Timings live apart from the records so that two runs of one configuration
//! produce byte-identical `records.jsonl`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::config::{ExperimentConfig, Format};
use crate::error::{HarnessError, Result};
use crate::runner::{ResultRecord, ResultSet, Table};

/// Compact JSON with fixed-width scientific floats.
struct FloatFormatter;

impl Formatter for FloatFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// One JSON line, floats in `{:.16e}`.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FloatFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(io_err(path))
}

fn jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&to_json_line(item)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn table_csv(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| HarnessError::Io { path: table.name.clone(), source: e.into_error() })
}

/// Writes the run into `dir` and returns the paths written.
pub fn write_results(config: &ExperimentConfig, results: &ResultSet, dir: &Path) -> Result<Vec<PathBuf>> {
    if results.records.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, bytes: &[u8]| -> Result<()> {
        write_file(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put(dir.join("config.toml"), config.to_toml()?.as_bytes())?;
    if config.formats.contains(&Format::Json) {
        put(dir.join("records.jsonl"), jsonl(&results.records)?.as_bytes())?;
        put(dir.join("timings.jsonl"), jsonl(&results.timings)?.as_bytes())?;
    }
    if config.formats.contains(&Format::Csv) {
        let tables = dir.join("tables");
        fs::create_dir_all(&tables).map_err(io_err(&tables))?;
        for t in results.tables.iter().filter(|t| !t.rows.is_empty()) {
            put(tables.join(format!("{}.csv", t.name)), &table_csv(t)?)?;
        }
    }
    Ok(written)
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}
