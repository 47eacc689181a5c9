//! ICDAR-2013 competition structure files (`*-str.xml`).
//!
//! ```xml
//! <document filename="us-012.pdf">
//!   <table id="1">
//!     <region id="1" page="1">
//!       <cell id="0" start-row="0" start-col="0" end-col="1">
//!         <bounding-box x1="64" y1="700" x2="120" y2="712"/>
//!         <content>Year</content>
//!       </cell>
//! ```
//!
//! Every region becomes one table. Boxes are given in PDF space (origin at
//! the bottom-left) and are flipped with the page height.

use std::collections::BTreeMap;

use roxmltree::{Document, Node};

use super::{validated, IngestError, ParsedBatch, RecordFailure};
use crate::geometry::BBox;
use crate::model::{Cell, Extent, Provenance, Split, TableAnnotation};

#[derive(Debug, Clone)]
pub struct IcdarSource {
    pub document_id: String,
    pub split: Split,
    /// Page number (1-based, as in the XML) to page height.
    pub page_heights: BTreeMap<u32, f64>,
    pub default_page_height: Option<f64>,
}

impl IcdarSource {
    fn page_height(&self, page: u32) -> Option<f64> {
        self.page_heights.get(&page).copied().or(self.default_page_height)
    }
}

fn index_attr(node: Node, name: &'static str, cell: &str) -> Result<usize, IngestError> {
    node.attribute(name)
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| IngestError::MissingIndex {
            cell: cell.to_string(),
            attribute: name,
        })
}

fn float_attr(node: Node, name: &str) -> Result<f64, IngestError> {
    node.attribute(name)
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| IngestError::InvalidRecord(format!("bounding-box attribute {name}")))
}

fn parse_region(region: Node, table_id: &str, src: &IcdarSource) -> Result<TableAnnotation, IngestError> {
    let page: u32 = region
        .attribute("page")
        .and_then(|p| p.trim().parse().ok())
        .unwrap_or(1);
    let mut cells = Vec::new();
    for (k, node) in region.children().filter(|n| n.has_tag_name("cell")).enumerate() {
        let label = node
            .attribute("id")
            .map_or_else(|| format!("#{k}"), str::to_string);
        let row_start = index_attr(node, "start-row", &label)?;
        let col_start = index_attr(node, "start-col", &label)?;
        let row_end = match node.attribute("end-row") {
            Some(_) => index_attr(node, "end-row", &label)?,
            None => row_start,
        };
        let col_end = match node.attribute("end-col") {
            Some(_) => index_attr(node, "end-col", &label)?,
            None => col_start,
        };
        let text: String = node
            .children()
            .find(|n| n.has_tag_name("content"))
            .map(|n| n.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect())
            .unwrap_or_default();
        let text = crate::text::normalize(&text);
        let bbox = match node.children().find(|n| n.has_tag_name("bounding-box")) {
            Some(b) if !text.is_empty() => {
                let (x1, y1, x2, y2) = (
                    float_attr(b, "x1")?,
                    float_attr(b, "y1")?,
                    float_attr(b, "x2")?,
                    float_attr(b, "y2")?,
                );
                let h = src.page_height(page).ok_or_else(|| IngestError::MissingPageHeight {
                    page: format!("{}:{page}", src.document_id),
                })?;
                Some(BBox::new(x1.min(x2), y1.min(y2), x1.max(x2), y1.max(y2)).flip_y(h))
            }
            _ => None,
        };
        cells.push(Cell::new(
            Extent::new(row_start, row_end, col_start, col_end),
            text,
            bbox,
        ));
    }
    if cells.is_empty() {
        return Err(IngestError::InvalidRecord("region has no cells".into()));
    }
    let n_rows = cells.iter().map(|c| c.row_end + 1).max().unwrap_or(0);
    let n_cols = cells.iter().map(|c| c.col_end + 1).max().unwrap_or(0);
    let mut t = TableAnnotation::new(table_id, src.split, n_rows, n_cols);
    t.cells = cells;
    t.provenance = Provenance {
        dataset: "icdar2013".into(),
        document_id: src.document_id.clone(),
    };
    validated(t)
}

/// Parse one structure file. Malformed XML fails the whole file; a region
/// that cannot be read is recorded as a failure and skipped.
pub fn parse_icdar_xml(xml: &str, src: &IcdarSource) -> Result<ParsedBatch, IngestError> {
    let doc = Document::parse(xml).map_err(|e| IngestError::MalformedXml(e.to_string()))?;
    let mut batch = ParsedBatch::default();
    for (ti, table) in doc.descendants().filter(|n| n.has_tag_name("table")).enumerate() {
        let table_no = table.attribute("id").map_or_else(|| (ti + 1).to_string(), str::to_string);
        for (ri, region) in table.children().filter(|n| n.has_tag_name("region")).enumerate() {
            let region_no = region.attribute("id").map_or_else(|| (ri + 1).to_string(), str::to_string);
            let table_id = format!("{}-t{}-r{}", src.document_id, table_no, region_no);
            match parse_region(region, &table_id, src) {
                Ok(t) => batch.tables.push(t),
                Err(e) => {
                    log::warn!("{table_id}: unreadable region: {e}");
                    batch.failures.push(RecordFailure::new(&src.document_id, &table_id, &e));
                }
            }
        }
    }
    Ok(batch)
}
