//! Readers for source annotation formats, the canonical interchange format,
//! and manual-correction overlays.
//!
//! Source readers tolerate per-record failures: a record that cannot be
//! turned into a valid [`TableAnnotation`] is reported in
//! [`ParsedBatch::failures`] and parsing continues.

mod canonical;
mod corrections;
mod fintabnet;
mod icdar;
mod manifest;
mod words;

pub use canonical::{read_canonical, read_canonical_file, write_canonical, write_canonical_file, SCHEMA_VERSION};
pub use corrections::{apply_corrections, load_overlay, CorrectionOp, ManualCorrection, Overlay};
pub use fintabnet::{expand_html_structure, parse_fintabnet_record, HtmlCell, HtmlStructure};
pub use icdar::{parse_icdar_xml, IcdarSource};
pub use manifest::{load_dataset, DatasetKind, DatasetManifest, LoadedDataset, SourceFile};
pub use words::{attach_words, load_words, WordIndex};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::model::{InvalidTable, TableAnnotation};

/// Vertical origin of coordinates in a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordOrigin {
    #[default]
    BottomLeft,
    TopLeft,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("cell {cell} lacks a grid index ({attribute})")]
    MissingIndex { cell: String, attribute: &'static str },
    #[error("no page height known for page {page}")]
    MissingPageHeight { page: String },
    #[error("invalid HTML token stream: {0}")]
    TokenStreamInvalid(String),
    #[error("{boxes} boxes for {non_blank} non-blank cells ({cells} cell entries for {slots} structure cells)")]
    BoxCountMismatch {
        boxes: usize,
        non_blank: usize,
        cells: usize,
        slots: usize,
    },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("schema version '{found}' is not supported (expected '{expected}')")]
    SchemaVersionMismatch { found: String, expected: String },
    #[error("table {table_id}: {source}")]
    ValidationFailure {
        table_id: String,
        #[source]
        source: InvalidTable,
    },
    #[error("correction target not found: {0}")]
    TargetNotFound(String),
    #[error("correction of {table_id} produced an invalid table: {reason}")]
    ResultInvalid { table_id: String, reason: String },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<IngestError>,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::MalformedXml(_) => "malformed_xml",
            IngestError::MissingIndex { .. } => "missing_index",
            IngestError::MissingPageHeight { .. } => "missing_page_height",
            IngestError::TokenStreamInvalid(_) => "token_stream_invalid",
            IngestError::BoxCountMismatch { .. } => "box_count_mismatch",
            IngestError::InvalidRecord(_) => "invalid_record",
            IngestError::SchemaVersionMismatch { .. } => "schema_version_mismatch",
            IngestError::ValidationFailure { .. } => "validation_failure",
            IngestError::TargetNotFound(_) => "target_not_found",
            IngestError::ResultInvalid { .. } => "result_invalid",
            IngestError::Line { source, .. } => source.code(),
            IngestError::Manifest(_) => "manifest",
            IngestError::Io { .. } => "io",
            IngestError::Json(_) => "json",
        }
    }
}

/// A source record that could not be read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordFailure {
    pub source: String,
    pub record: String,
    pub code: String,
    pub message: String,
}

impl RecordFailure {
    pub fn new(source: impl Into<String>, record: impl Into<String>, err: &IngestError) -> Self {
        RecordFailure {
            source: source.into(),
            record: record.into(),
            code: err.code().to_string(),
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedBatch {
    pub tables: Vec<TableAnnotation>,
    pub failures: Vec<RecordFailure>,
}

pub(crate) fn validated(t: TableAnnotation) -> Result<TableAnnotation, IngestError> {
    match t.validate() {
        Ok(()) => Ok(t),
        Err(source) => Err(IngestError::ValidationFailure {
            table_id: t.table_id.clone(),
            source,
        }),
    }
}
