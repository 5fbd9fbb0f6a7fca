//! CSV tables, JSON envelopes, and writing to a file or stdout.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{CliError, Format, SCHEMA_VERSION};

/// Floats with 17 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table with a header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// `{schema_version, command, config, ...data}`.
pub fn envelope(command: &str, config: &impl Serialize, data: Value) -> Result<Value, CliError> {
    let mut map = Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert("command".into(), command.into());
    map.insert("config".into(), serde_json::to_value(config)?);
    if let Value::Object(fields) = data {
        map.extend(fields);
    }
    Ok(Value::Object(map))
}

pub fn json_bytes(value: &Value) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes `bytes` to `path`, or to stdout when `path` is `None`.
pub fn write(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes)?,
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(bytes).and_then(|()| out.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

/// Writes either the table or the JSON document.
pub fn emit(format: Format, path: Option<&Path>, table: &Table, json: impl FnOnce() -> Result<Value, CliError>) -> Result<(), CliError> {
    let bytes = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => json_bytes(&json()?)?,
    };
    write(path, &bytes)
}
