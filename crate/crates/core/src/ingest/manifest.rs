//! Dataset manifests: which files make up a dataset and how to read them.
//!
//! ```json
//! {
//!   "name": "fintabnet",
//!   "kind": "fintabnet",
//!   "annotations": [{"path": "fintabnet_train.jsonl", "split": "train"}],
//!   "words": "words/",
//!   "origin": "bottom-left"
//! }
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use super::canonical::parse_line;
use super::corrections::{load_overlay, ManualCorrection};
use super::words::{attach_words, load_words};
use super::{parse_fintabnet_record, parse_icdar_xml, CoordOrigin, IcdarSource, IngestError, RecordFailure};
use crate::model::{Split, TableAnnotation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Icdar,
    Fintabnet,
    Canonical,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SourceFile {
    pub path: PathBuf,
    #[serde(default)]
    pub split: Option<Split>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub kind: DatasetKind,
    pub annotations: Vec<SourceFile>,
    #[serde(default)]
    pub words: Option<PathBuf>,
    #[serde(default)]
    pub corrections: Option<PathBuf>,
    /// JSON object: document id -> page number -> page height.
    #[serde(default)]
    pub page_heights: Option<PathBuf>,
    #[serde(default)]
    pub default_page_height: Option<f64>,
    #[serde(default)]
    pub origin: CoordOrigin,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let raw = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        let mut m: DatasetManifest =
            serde_json::from_str(&raw).map_err(|e| IngestError::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        m.annotations.iter_mut().for_each(|s| resolve(&mut s.path));
        m.words.iter_mut().for_each(resolve);
        m.corrections.iter_mut().for_each(resolve);
        m.page_heights.iter_mut().for_each(resolve);
        if m.name.is_empty() || m.name.contains(['/', '\\']) {
            return Err(IngestError::Manifest(format!("invalid dataset name '{}'", m.name)));
        }
        if m.annotations.is_empty() {
            return Err(IngestError::Manifest("no annotation files listed".into()));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadedDataset {
    pub tables: Vec<TableAnnotation>,
    pub failures: Vec<RecordFailure>,
    pub corrections: Vec<ManualCorrection>,
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))
}

fn load_page_heights(path: &Path) -> Result<BTreeMap<String, BTreeMap<u32, f64>>, IngestError> {
    let raw: BTreeMap<String, BTreeMap<String, f64>> = serde_json::from_str(&read(path)?)?;
    raw.into_iter()
        .map(|(doc, pages)| {
            let pages = pages
                .into_iter()
                .map(|(p, h)| {
                    p.parse::<u32>()
                        .map(|p| (p, h))
                        .map_err(|_| IngestError::Manifest(format!("page '{p}' of {doc} is not a number")))
                })
                .collect::<Result<_, _>>()?;
            Ok((doc, pages))
        })
        .collect()
}

fn icdar_document_id(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("document");
    stem.strip_suffix("-str").unwrap_or(stem).to_string()
}

type RecordResult = (String, Result<TableAnnotation, IngestError>);

/// Read every source file. Records are parsed in parallel; the output order
/// is always (file order, record order).
pub fn load_dataset(m: &DatasetManifest) -> Result<LoadedDataset, IngestError> {
    let mut out = LoadedDataset::default();
    let heights = match &m.page_heights {
        Some(p) => load_page_heights(p)?,
        None => BTreeMap::new(),
    };

    for src in &m.annotations {
        let source_name = src.path.display().to_string();
        let raw = read(&src.path)?;
        match m.kind {
            DatasetKind::Icdar => {
                let document_id = icdar_document_id(&src.path);
                let isrc = IcdarSource {
                    page_heights: heights.get(&document_id).cloned().unwrap_or_default(),
                    document_id,
                    split: src.split.unwrap_or(Split::Test),
                    default_page_height: m.default_page_height,
                };
                match parse_icdar_xml(&raw, &isrc) {
                    Ok(batch) => {
                        out.tables.extend(batch.tables);
                        out.failures.extend(batch.failures);
                    }
                    Err(e) => {
                        log::warn!("{source_name}: {e}");
                        out.failures.push(RecordFailure::new(source_name.as_str(), isrc.document_id.as_str(), &e));
                    }
                }
            }
            DatasetKind::Fintabnet | DatasetKind::Canonical => {
                let lines: Vec<(usize, &str)> = raw
                    .lines()
                    .enumerate()
                    .filter(|(_, l)| !l.trim().is_empty())
                    .collect();
                let parsed: Vec<RecordResult> = lines
                    .par_iter()
                    .map(|&(i, line)| {
                        let label = format!("line {}", i + 1);
                        let res = if m.kind == DatasetKind::Fintabnet {
                            parse_fintabnet_record(line, m.origin, src.split)
                        } else {
                            parse_line(line).map(|mut t| {
                                if let Some(s) = src.split {
                                    t.split = s;
                                }
                                t
                            })
                        };
                        (label, res)
                    })
                    .collect();
                for (label, res) in parsed {
                    match res {
                        Ok(t) => out.tables.push(t),
                        Err(e) => {
                            log::warn!("{source_name} {label}: {e}");
                            out.failures.push(RecordFailure::new(source_name.as_str(), label, &e));
                        }
                    }
                }
            }
        }
    }

    if let Some(p) = &m.words {
        attach_words(&mut out.tables, &load_words(p)?);
    }
    if let Some(p) = &m.corrections {
        out.corrections = load_overlay(p)?;
    }
    Ok(out)
}
