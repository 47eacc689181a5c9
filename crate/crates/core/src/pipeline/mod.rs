//! Staged alignment of table annotations.
//!
//! Each stage is a pure per-table transform that either returns the updated
//! table or a [`ReasonCode`] explaining why the table cannot be kept. The
//! driver in [`run`] chains the stages, collects snapshots and builds the
//! [`PipelineReport`].

mod canonicalize;
mod complete;
mod consistency;
mod headers;
mod quality;
mod refine;
mod report;
mod run;

pub use canonicalize::canonicalize;
pub use complete::complete_rows_columns;
pub use consistency::{
    detect_currency_column, merge_adjacent_header_rows, remove_empty_rows_columns, strip_dot_leaders,
};
pub use headers::{infer_headers, infer_two_column_header, is_projected_row_header_row, set_header_rows};
pub use quality::quality_control;
pub use refine::refine_boxes;
pub use report::{format_report, Flag, Outcome, PipelineReport, StageSummary, TableOutcome};
pub use run::{run_pipeline, Mode, PipelineError, PipelineRun, Snapshot};

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{TableAnnotation, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageId {
    /// Completion of row and column boxes and header labels.
    A1,
    /// Cell box adjustment.
    A2,
    /// Consistency adjustments.
    A3,
    /// Header inference and canonicalization.
    A4,
    /// Two-column header inference (executes before A4).
    A5,
    /// Quality control.
    A6,
}

impl StageId {
    pub const ALL: [StageId; 6] = [StageId::A1, StageId::A2, StageId::A3, StageId::A4, StageId::A5, StageId::A6];

    pub fn tag(self) -> &'static str {
        match self {
            StageId::A1 => "a1",
            StageId::A2 => "a2",
            StageId::A3 => "a3",
            StageId::A4 => "a4",
            StageId::A5 => "a5",
            StageId::A6 => "a6",
        }
    }

    pub fn title(self, mode: Mode) -> &'static str {
        match (mode, self) {
            (_, StageId::A1) => "Completion",
            (Mode::Standard, StageId::A2) => "Cell box adjustment",
            (Mode::Standard, StageId::A3) => "Consistency adjustments",
            (Mode::Icdar, StageId::A2) => "Manual correction",
            (Mode::Icdar, StageId::A3) => "Consistency adjustments and canonicalization",
            (_, StageId::A4) => "Canonicalization",
            (_, StageId::A5) => "Additional column header inference",
            (_, StageId::A6) => "Quality control",
        }
    }
}

impl fmt::Display for StageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StageId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StageId::ALL
            .into_iter()
            .find(|st| st.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown stage '{s}' (expected a1..a6)"))
    }
}

/// Why a table was removed or flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonCode {
    UndefinedExtent,
    InvertedOrder,
    AmbiguousWord,
    NoConvergence,
    LeaderAmbiguity,
    AllEmpty,
    CurrencySplitColumn,
    TwoColumnAmbiguous,
    CanonicalizationConflict,
    HeaderUndetermined,
    WordCellCoincidence,
    CaptionAsRow,
    FooterAsRow,
    HeaderOnly,
    InvalidGrid,
}

impl ReasonCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonCode::UndefinedExtent => "undefined_extent",
            ReasonCode::InvertedOrder => "inverted_order",
            ReasonCode::AmbiguousWord => "ambiguous_word",
            ReasonCode::NoConvergence => "no_convergence",
            ReasonCode::LeaderAmbiguity => "leader_ambiguity",
            ReasonCode::AllEmpty => "all_empty",
            ReasonCode::CurrencySplitColumn => "currency_split_column",
            ReasonCode::TwoColumnAmbiguous => "two_column_ambiguous",
            ReasonCode::CanonicalizationConflict => "canonicalization_conflict",
            ReasonCode::HeaderUndetermined => "header_undetermined",
            ReasonCode::WordCellCoincidence => "word_cell_coincidence",
            ReasonCode::CaptionAsRow => "caption_as_row",
            ReasonCode::FooterAsRow => "footer_as_row",
            ReasonCode::HeaderOnly => "header_only",
            ReasonCode::InvalidGrid => "invalid_grid",
        }
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Corrections applied to a kept table. Completion of missing labels is not
/// a correction and has no code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeCode {
    ManualCorrection,
    CellBoxesRefined,
    DotLeadersStripped,
    EmptyRowsRemoved,
    EmptyColumnsRemoved,
    HeaderRowsMerged,
    Canonicalized,
}

impl ChangeCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeCode::ManualCorrection => "manual_correction",
            ChangeCode::CellBoxesRefined => "cell_boxes_refined",
            ChangeCode::DotLeadersStripped => "dot_leaders_stripped",
            ChangeCode::EmptyRowsRemoved => "empty_rows_removed",
            ChangeCode::EmptyColumnsRemoved => "empty_columns_removed",
            ChangeCode::HeaderRowsMerged => "header_rows_merged",
            ChangeCode::Canonicalized => "canonicalized",
        }
    }
}

impl fmt::Display for ChangeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tunable thresholds. Defaults match the documented pipeline behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineOptions {
    /// Minimum number of periods in an edge run before it counts as a dot leader.
    pub dot_leader_min_dots: usize,
    /// Fraction of a word's area that, when reached in two or more cells,
    /// makes the word ambiguous (inclusive).
    pub word_overlap_threshold: f64,
    /// Fraction of a word's area its best cell must exceed in quality control.
    pub word_coverage_threshold: f64,
    pub iteration_cap: usize,
    pub currency_glyphs: String,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            dot_leader_min_dots: 3,
            word_overlap_threshold: 0.5,
            word_coverage_threshold: 0.5,
            iteration_cap: 10,
            currency_glyphs: crate::text::DEFAULT_CURRENCY_GLYPHS.to_string(),
        }
    }
}

/// Words used for geometric reasoning. Tables shipped without words fall
/// back to one pseudo-word per boxed, non-blank cell.
pub(crate) fn effective_words(t: &TableAnnotation) -> Cow<'_, [Word]> {
    if !t.words.is_empty() {
        return Cow::Borrowed(&t.words);
    }
    Cow::Owned(
        t.cells
            .iter()
            .filter(|c| !c.is_blank())
            .filter_map(|c| c.bbox.map(|b| Word::new(c.text.clone(), b)))
            .collect(),
    )
}
