//! Canonical JSON-lines: one table per line, each line tagged with
//! `schema_version`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{validated, IngestError};
use crate::model::TableAnnotation;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
struct Line<'a> {
    schema_version: &'static str,
    #[serde(flatten)]
    table: &'a TableAnnotation,
}

pub fn write_canonical<W: Write>(mut out: W, tables: &[TableAnnotation]) -> std::io::Result<()> {
    for table in tables {
        serde_json::to_writer(
            &mut out,
            &Line {
                schema_version: SCHEMA_VERSION,
                table,
            },
        )?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_canonical_file(path: &Path, tables: &[TableAnnotation]) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_canonical(BufWriter::new(file), tables).map_err(|e| IngestError::io(path, e))
}

pub(crate) fn parse_line(line: &str) -> Result<TableAnnotation, IngestError> {
    let mut value: serde_json::Value = serde_json::from_str(line)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| IngestError::InvalidRecord("expected a JSON object".into()))?;
    let found = match obj.remove("schema_version") {
        Some(serde_json::Value::String(s)) => s,
        Some(other) => other.to_string(),
        None => String::from("<missing>"),
    };
    if found != SCHEMA_VERSION {
        return Err(IngestError::SchemaVersionMismatch {
            found,
            expected: SCHEMA_VERSION.into(),
        });
    }
    let table: TableAnnotation = serde_json::from_value(value)?;
    validated(table)
}

/// Read every table. Any bad line fails the read, reporting its 1-based
/// line number.
pub fn read_canonical<R: BufRead>(input: R) -> Result<Vec<TableAnnotation>, IngestError> {
    let mut tables = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| IngestError::io("<stream>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let table = parse_line(&line).map_err(|e| IngestError::Line {
            line: i + 1,
            source: Box::new(e),
        })?;
        tables.push(table);
    }
    Ok(tables)
}

pub fn read_canonical_file(path: &Path) -> Result<Vec<TableAnnotation>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_canonical(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;
    use crate::model::{Cell, Extent, Split, Word};

    fn fixture() -> TableAnnotation {
        let mut t = TableAnnotation::new("fx-1", Split::Val, 1, 2);
        t.cells.push(Cell::new(Extent::single(0, 0), "Year", Some(BBox::new(0.0, 0.0, 20.5, 10.0))));
        t.cells.push(Cell::new(Extent::single(0, 1), "2013", Some(BBox::new(30.0, 0.0, 50.0, 10.0))));
        t.words.push(Word::new("Year", BBox::new(0.0, 0.0, 20.5, 10.0)));
        t.stage = "a1".into();
        t
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let mut first = Vec::new();
        write_canonical(&mut first, &[fixture()]).unwrap();
        let back = read_canonical(first.as_slice()).unwrap();
        assert_eq!(back, vec![fixture()]);
        let mut second = Vec::new();
        write_canonical(&mut second, &back).unwrap();
        assert_eq!(first, second);
        assert!(String::from_utf8(first).unwrap().starts_with("{\"schema_version\":\"1\",\"table_id\""));
    }

    #[test]
    fn overlapping_cells_fail_validation() {
        let mut t = fixture();
        t.cells[1].col_start = 0;
        let mut buf = Vec::new();
        write_canonical(&mut buf, &[t]).unwrap();
        let err = read_canonical(buf.as_slice()).unwrap_err();
        let IngestError::Line { line: 1, source } = err else { panic!("{err}") };
        match *source {
            IngestError::ValidationFailure { table_id, source } => {
                assert_eq!(table_id, "fx-1");
                assert_eq!(source.path, "cells[0]/cells[1]");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn wrong_version_rejected() {
        let line = r#"{"schema_version":"2","table_id":"x"}"#;
        let err = read_canonical(line.as_bytes()).unwrap_err();
        assert_eq!(err.code(), "schema_version_mismatch");
    }
}
