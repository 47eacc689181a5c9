use super::{Cell, Word};
use crate::geometry::BBox;

/// Index of the target box with the largest intersection area with `word`.
/// Ties go to the lowest index; zero overlap everywhere yields `None`.
pub fn slot_boxes(targets: &[Option<BBox>], word: &BBox) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, target) in targets.iter().enumerate() {
        let Some(b) = target else { continue };
        let area = b.intersection_area(word);
        if area > 0.0 && best.is_none_or(|(_, a)| area > a) {
            best = Some((i, area));
        }
    }
    best.map(|(i, _)| i)
}

/// Assign every word to the cell whose box it overlaps most.
pub fn slot_words(cells: &[Cell], words: &[Word]) -> Vec<Option<usize>> {
    let targets: Vec<Option<BBox>> = cells.iter().map(|c| c.bbox).collect();
    words.iter().map(|w| slot_boxes(&targets, &w.bbox)).collect()
}
