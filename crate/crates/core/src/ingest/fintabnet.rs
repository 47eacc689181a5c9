//! FinTabNet / PubTabNet style records: an HTML structure token sequence
//! plus one content entry per `<td>`.

use serde::Deserialize;

use super::{validated, CoordOrigin, IngestError};
use crate::geometry::BBox;
use crate::model::{Cell, Extent, Provenance, Split, TableAnnotation};

/// One `<td>` after span placement, in token order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtmlCell {
    pub extent: Extent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtmlStructure {
    pub n_rows: usize,
    pub n_cols: usize,
    pub cells: Vec<HtmlCell>,
    /// Rows opened inside `<thead>`.
    pub header_rows: Vec<usize>,
}

fn invalid(msg: impl Into<String>) -> IngestError {
    IngestError::TokenStreamInvalid(msg.into())
}

fn parse_span_attr(token: &str) -> Result<Option<(&'static str, usize)>, IngestError> {
    let Some((key, value)) = token.trim().split_once('=') else {
        return Ok(None);
    };
    let key = match key.trim() {
        "rowspan" => "rowspan",
        "colspan" => "colspan",
        _ => return Ok(None),
    };
    let value = value.trim().trim_matches(|c| c == '"' || c == '\'');
    match value.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some((key, n))),
        _ => Err(invalid(format!("bad {key} value '{value}'"))),
    }
}

/// Expand structure tokens into cell extents using HTML table placement:
/// each cell goes to the first position in its row not already claimed by a
/// row-spanning cell from above.
pub fn expand_html_structure<S: AsRef<str>>(tokens: &[S]) -> Result<HtmlStructure, IngestError> {
    let mut occupied: Vec<Vec<bool>> = Vec::new();
    let mut cursor = 0usize;
    let mut row: Option<usize> = None;
    let mut n_rows = 0usize;
    let mut in_thead = false;
    let mut header_rows = Vec::new();
    // (rowspan, colspan, still reading attributes)
    let mut open: Option<(usize, usize, bool)> = None;
    let mut cells = Vec::new();

    let place = |row: usize, cursor: &mut usize, rowspan: usize, colspan: usize, occupied: &mut Vec<Vec<bool>>| -> Result<Extent, IngestError> {
        let rows_needed = row + rowspan;
        if occupied.len() < rows_needed {
            occupied.resize(rows_needed, Vec::new());
        }
        let mut c = *cursor;
        while occupied[row].get(c).copied().unwrap_or(false) {
            c += 1;
        }
        for line in occupied.iter_mut().take(rows_needed).skip(row) {
            if line.len() < c + colspan {
                line.resize(c + colspan, false);
            }
            if line[c..c + colspan].iter().any(|&o| o) {
                return Err(invalid(format!("span overlap at row {row}, col {c}")));
            }
            line[c..c + colspan].iter_mut().for_each(|o| *o = true);
        }
        *cursor = c + colspan;
        Ok(Extent::new(row, row + rowspan - 1, c, c + colspan - 1))
    };

    for token in tokens {
        let tok = token.as_ref();
        let trimmed = tok.trim();
        if let Some((_, _, true)) = open {
            if trimmed == ">" {
                open = open.map(|(r, c, _)| (r, c, false));
                continue;
            }
            match parse_span_attr(tok)? {
                Some(("rowspan", n)) => open = open.map(|(_, c, a)| (n, c, a)),
                Some((_, n)) => open = open.map(|(r, _, a)| (r, n, a)),
                None => {}
            }
            continue;
        }
        match trimmed {
            "<thead>" => in_thead = true,
            "</thead>" => in_thead = false,
            "<tbody>" | "</tbody>" | "<table>" | "</table>" => {}
            "<tr>" => {
                if row.is_some() {
                    return Err(invalid("nested <tr>"));
                }
                if open.is_some() {
                    return Err(invalid("<tr> inside an open cell"));
                }
                row = Some(n_rows);
                if in_thead {
                    header_rows.push(n_rows);
                }
                n_rows += 1;
                cursor = 0;
            }
            "</tr>" => {
                if row.take().is_none() {
                    return Err(invalid("</tr> without <tr>"));
                }
                if open.is_some() {
                    return Err(invalid("</tr> inside an open cell"));
                }
            }
            "<td>" | "<th>" | "<td" | "<th" => {
                if row.is_none() {
                    return Err(invalid("cell outside a row"));
                }
                if open.is_some() {
                    return Err(invalid("nested cell"));
                }
                open = Some((1, 1, trimmed.len() == 3));
            }
            "</td>" | "</th>" => {
                let r = row.ok_or_else(|| invalid("cell end outside a row"))?;
                let (rowspan, colspan, _) = open.take().ok_or_else(|| invalid("</td> without <td>"))?;
                let extent = place(r, &mut cursor, rowspan, colspan, &mut occupied)?;
                cells.push(HtmlCell { extent });
            }
            "<td></td>" | "<th></th>" => {
                let r = row.ok_or_else(|| invalid("cell outside a row"))?;
                if open.is_some() {
                    return Err(invalid("nested cell"));
                }
                let extent = place(r, &mut cursor, 1, 1, &mut occupied)?;
                cells.push(HtmlCell { extent });
            }
            _ => return Err(invalid(format!("unexpected token '{tok}'"))),
        }
    }
    if row.is_some() || open.is_some() {
        return Err(invalid("unterminated row or cell"));
    }
    if n_rows == 0 || cells.is_empty() {
        return Err(invalid("table has no cells"));
    }
    if let Some(c) = cells.iter().find(|c| c.extent.row_end >= n_rows) {
        return Err(invalid(format!("rowspan overflow at row {}", c.extent.row_start)));
    }
    let n_cols = cells.iter().map(|c| c.extent.col_end + 1).max().unwrap_or(0);
    Ok(HtmlStructure {
        n_rows,
        n_cols,
        cells,
        header_rows,
    })
}

#[derive(Debug, Deserialize)]
struct Record {
    #[serde(default)]
    filename: Option<String>,
    #[serde(default)]
    split: Option<String>,
    table_id: serde_json::Value,
    #[serde(default)]
    page_height: Option<f64>,
    html: RecordHtml,
}

#[derive(Debug, Deserialize)]
struct RecordHtml {
    structure: RecordStructure,
    cells: Vec<RecordCell>,
}

#[derive(Debug, Deserialize)]
struct RecordStructure {
    tokens: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct RecordCell {
    #[serde(default)]
    tokens: Vec<String>,
    #[serde(default)]
    bbox: Option<[f64; 4]>,
}

fn is_markup(token: &str) -> bool {
    token.len() > 1 && token.starts_with('<') && token.ends_with('>')
}

fn cell_text(tokens: &[String]) -> String {
    let raw: String = tokens.iter().filter(|t| !is_markup(t)).map(String::as_str).collect();
    raw.replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .trim()
        .to_string()
}

/// Parse one JSON-lines record. `split` overrides the record's own split.
pub fn parse_fintabnet_record(
    line: &str,
    origin: CoordOrigin,
    split: Option<Split>,
) -> Result<TableAnnotation, IngestError> {
    let rec: Record = serde_json::from_str(line)?;
    let table_id = match &rec.table_id {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(IngestError::InvalidRecord(format!("table_id {other}"))),
    };
    let split = match (split, &rec.split) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse().map_err(IngestError::InvalidRecord)?,
        (None, None) => Split::Train,
    };
    let structure = expand_html_structure(&rec.html.structure.tokens)?;

    let texts: Vec<String> = rec.html.cells.iter().map(|c| cell_text(&c.tokens)).collect();
    let non_blank = texts.iter().filter(|t| !t.is_empty()).count();
    let boxes = rec
        .html
        .cells
        .iter()
        .zip(&texts)
        .filter(|(c, t)| c.bbox.is_some() && !t.is_empty())
        .count();
    if rec.html.cells.len() != structure.cells.len() || boxes != non_blank {
        return Err(IngestError::BoxCountMismatch {
            boxes,
            non_blank,
            cells: rec.html.cells.len(),
            slots: structure.cells.len(),
        });
    }

    let mut table = TableAnnotation::new(table_id, split, structure.n_rows, structure.n_cols);
    for ((slot, rc), text) in structure.cells.iter().zip(&rec.html.cells).zip(texts) {
        if text.is_empty() {
            if slot.extent.is_spanning() {
                table.cells.push(Cell::new(slot.extent, "", None));
            }
            continue;
        }
        let [x0, y0, x1, y1] = rc.bbox.expect("counted above");
        let mut bbox = BBox::new(x0.min(x1), y0.min(y1), x0.max(x1), y0.max(y1));
        if origin == CoordOrigin::BottomLeft {
            let h = rec.page_height.ok_or_else(|| IngestError::MissingPageHeight {
                page: rec.filename.clone().unwrap_or_default(),
            })?;
            bbox = bbox.flip_y(h);
        }
        table.cells.push(Cell::new(slot.extent, text, Some(bbox)));
    }
    table.markup_header_rows = structure.header_rows;
    table.provenance = Provenance {
        dataset: "fintabnet".into(),
        document_id: rec.filename.unwrap_or_default(),
    };
    validated(table)
}
