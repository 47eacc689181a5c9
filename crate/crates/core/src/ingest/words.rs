//! Word files. Either a single JSON object mapping table id to a list of
//! words, or a directory holding one `<table_id>.json` list per table.
//! Word boxes are expected in the top-left frame.

use std::collections::BTreeMap;
use std::path::Path;

use super::IngestError;
use crate::model::{TableAnnotation, Word};

pub type WordIndex = BTreeMap<String, Vec<Word>>;

pub fn load_words(path: &Path) -> Result<WordIndex, IngestError> {
    if path.is_dir() {
        let mut index = WordIndex::new();
        let mut entries: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| IngestError::io(path, e))?
            .collect::<Result<_, _>>()
            .map_err(|e| IngestError::io(path, e))?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let p = entry.path();
            if p.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let id = stem.strip_suffix("_words").unwrap_or(stem).to_string();
            let raw = std::fs::read_to_string(&p).map_err(|e| IngestError::io(&p, e))?;
            index.insert(id, serde_json::from_str(&raw)?);
        }
        Ok(index)
    } else {
        let raw = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        Ok(serde_json::from_str(&raw)?)
    }
}

/// Attach words to tables that have none. Blank words are dropped.
pub fn attach_words(tables: &mut [TableAnnotation], index: &WordIndex) {
    for t in tables.iter_mut().filter(|t| t.words.is_empty()) {
        if let Some(words) = index.get(&t.table_id) {
            t.words = words
                .iter()
                .filter(|w| !crate::text::is_blank(&w.text) && w.bbox.is_valid())
                .cloned()
                .collect();
        }
    }
}
