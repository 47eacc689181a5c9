//! Axis-aligned boxes in a top-left-origin frame.

use serde::{Deserialize, Serialize};

/// An axis-aligned rectangle. `y` grows downwards.
///
/// Serialized as `[x_min, y_min, x_max, y_max]`, the layout used by most
/// table annotation formats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl From<[f64; 4]> for BBox {
    fn from(v: [f64; 4]) -> Self {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x_min, b.y_min, b.x_max, b.y_max]
    }
}

impl BBox {
    pub const fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        BBox {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    /// True when all coordinates are finite and min <= max on both axes.
    pub fn is_valid(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min <= self.x_max
            && self.y_min <= self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center_y(&self) -> f64 {
        (self.y_min + self.y_max) / 2.0
    }

    pub fn x_span(&self) -> Span {
        Span::new(self.x_min, self.x_max)
    }

    pub fn y_span(&self) -> Span {
        Span::new(self.y_min, self.y_max)
    }

    pub fn from_spans(x: Span, y: Span) -> Self {
        BBox::new(x.lo, y.lo, x.hi, y.hi)
    }

    /// Overlapping region, if it has non-negative extent on both axes.
    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let b = BBox::new(
            self.x_min.max(other.x_min),
            self.y_min.max(other.y_min),
            self.x_max.min(other.x_max),
            self.y_max.min(other.y_max),
        );
        (b.x_min <= b.x_max && b.y_min <= b.y_max).then_some(b)
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        self.intersection(other).map_or(0.0, |b| b.area())
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.x_min.min(other.x_min),
            self.y_min.min(other.y_min),
            self.x_max.max(other.x_max),
            self.y_max.max(other.y_max),
        )
    }

    /// Intersection over union. Two identical degenerate boxes score 1.
    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            return if self == other { 1.0 } else { 0.0 };
        }
        (inter / union).clamp(0.0, 1.0)
    }

    /// Mirror the box vertically inside a page of the given height. Converts
    /// between bottom-left and top-left origins; applying it twice with the
    /// same height is the identity.
    pub fn flip_y(&self, page_height: f64) -> BBox {
        BBox::new(
            self.x_min,
            page_height - self.y_max,
            self.x_max,
            page_height - self.y_min,
        )
    }

    pub fn translate(&self, dx: f64, dy: f64) -> BBox {
        BBox::new(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)
    }

    pub fn scale(&self, factor: f64) -> BBox {
        BBox::new(
            self.x_min * factor,
            self.y_min * factor,
            self.x_max * factor,
            self.y_max * factor,
        )
    }
}

/// Union of a sequence of boxes, `None` when empty.
pub fn union_all<'a, I>(boxes: I) -> Option<BBox>
where
    I: IntoIterator<Item = &'a BBox>,
{
    boxes
        .into_iter()
        .fold(None, |acc: Option<BBox>, b| Some(acc.map_or(*b, |a| a.union(b))))
}

/// Closed 1-D interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Span { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn union(&self, other: &Span) -> Span {
        Span::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Split into `parts` equal consecutive pieces and return piece `index`.
    pub fn slice(&self, index: usize, parts: usize) -> Span {
        let step = self.len() / parts as f64;
        Span::new(
            self.lo + step * index as f64,
            self.lo + step * (index + 1) as f64,
        )
    }
}

/// Turn per-index extents into shared boundaries: outer edges come from the
/// first and last extents, inner boundaries sit at the midpoint between
/// neighbouring extents. Returns `None` unless the boundaries are strictly
/// increasing.
pub fn tile_boundaries(extents: &[Span]) -> Option<Vec<f64>> {
    let first = extents.first()?;
    let last = extents.last()?;
    let mut bounds = Vec::with_capacity(extents.len() + 1);
    bounds.push(first.lo);
    for pair in extents.windows(2) {
        bounds.push((pair[0].hi + pair[1].lo) / 2.0);
    }
    bounds.push(last.hi);
    bounds
        .windows(2)
        .all(|w| w[0] < w[1])
        .then_some(bounds)
}
