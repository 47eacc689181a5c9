//! SVG overlays of a table's boxes, one layer per kind of element.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::geometry::{union_all, BBox};
use crate::model::TableAnnotation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Rows,
    Columns,
    Cells,
    Words,
    Header,
    Projected,
}

impl Layer {
    pub const ALL: [Layer; 6] = [
        Layer::Rows,
        Layer::Columns,
        Layer::Cells,
        Layer::Words,
        Layer::Header,
        Layer::Projected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Rows => "rows",
            Layer::Columns => "columns",
            Layer::Cells => "cells",
            Layer::Words => "words",
            Layer::Header => "header",
            Layer::Projected => "projected",
        }
    }

    fn id_prefix(self) -> &'static str {
        match self {
            Layer::Rows => "row",
            Layer::Columns => "col",
            Layer::Cells => "cell",
            Layer::Words => "word",
            Layer::Header => "header",
            Layer::Projected => "projected",
        }
    }

    /// Fill and stroke colour; columns use [`COLUMN_PALETTE`] instead.
    fn style(self) -> (&'static str, &'static str) {
        match self {
            Layer::Rows => ("#9ecae1", "#3182bd"),
            Layer::Columns => ("none", "#555555"),
            Layer::Cells => ("none", "#d62728"),
            Layer::Words => ("#ffe08a", "#b8860b"),
            Layer::Header => ("#c7e9c0", "#31a354"),
            Layer::Projected => ("#dadaeb", "#756bb1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("no table with id {0}")]
    UnknownTable(String),
    #[error("unknown layer {0:?} (expected rows, columns, cells, words, header or projected)")]
    UnknownLayer(String),
}

impl FromStr for Layer {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Layer::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| RenderError::UnknownLayer(s.to_string()))
    }
}

/// Parse a comma separated layer list. Duplicates collapse and the result is
/// in drawing order.
pub fn parse_layers(list: &str) -> Result<Vec<Layer>, RenderError> {
    let mut layers = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Layer::from_str)
        .collect::<Result<Vec<_>, _>>()?;
    layers.sort();
    layers.dedup();
    Ok(layers)
}

/// Cycled over the columns so neighbours are always distinguishable.
pub const COLUMN_PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948"];

pub fn find_table<'a>(tables: &'a [TableAnnotation], table_id: &str) -> Result<&'a TableAnnotation, RenderError> {
    tables
        .iter()
        .find(|t| t.table_id == table_id)
        .ok_or_else(|| RenderError::UnknownTable(table_id.to_string()))
}

/// `(element id, box)` for every element of a layer that has a box.
fn elements(t: &TableAnnotation, layer: Layer) -> Vec<(usize, BBox)> {
    let boxed = |it: Vec<Option<BBox>>| -> Vec<(usize, BBox)> {
        it.into_iter().enumerate().filter_map(|(i, b)| b.map(|b| (i, b))).collect()
    };
    match layer {
        Layer::Rows => boxed(t.rows.iter().map(|r| r.bbox).collect()),
        Layer::Columns => boxed(t.columns.iter().map(|c| c.bbox).collect()),
        Layer::Cells => boxed(t.cells.iter().map(|c| c.bbox).collect()),
        Layer::Words => t.words.iter().map(|w| w.bbox).enumerate().collect(),
        Layer::Header => boxed(t.cells.iter().map(|c| c.bbox.filter(|_| c.is_column_header)).collect()),
        Layer::Projected => boxed(t.cells.iter().map(|c| c.bbox.filter(|_| c.is_projected_row_header)).collect()),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const MARGIN: f64 = 5.0;

/// Render the requested layers as a standalone SVG document in page
/// coordinates. Output depends only on the table and the layer set.
pub fn render_svg(t: &TableAnnotation, layers: &[Layer]) -> String {
    let mut layers = layers.to_vec();
    layers.sort();
    layers.dedup();
    let all: Vec<BBox> = Layer::ALL.iter().flat_map(|&l| elements(t, l)).map(|(_, b)| b).collect();
    let frame = union_all(&all).unwrap_or(BBox::new(0.0, 0.0, 1.0, 1.0));
    let (x0, y0) = (frame.x_min - MARGIN, frame.y_min - MARGIN);
    let (w, h) = (frame.width() + 2.0 * MARGIN, frame.height() + 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.2} {y0:.2} {w:.2} {h:.2}" width="{w:.2}" height="{h:.2}">"#
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(&t.table_id));
    for layer in layers {
        let _ = writeln!(out, r#"  <g id="{}">"#, layer.name());
        for (i, b) in elements(t, layer) {
            let (fill, stroke) = match layer {
                Layer::Columns => (COLUMN_PALETTE[i % COLUMN_PALETTE.len()], "#555555"),
                _ => layer.style(),
            };
            let _ = writeln!(
                out,
                r#"    <rect id="{}-{i}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" fill-opacity="0.35" stroke="{stroke}" stroke-width="0.5"/>"#,
                layer.id_prefix(),
                b.x_min,
                b.y_min,
                b.width(),
                b.height(),
            );
        }
        let _ = writeln!(out, "  </g>");
    }
    out.push_str("</svg>\n");
    out
}
