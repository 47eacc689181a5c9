//! Alignment, canonicalization and evaluation of table structure
//! recognition annotations.
//!
//! The crate is organised around [`model::TableAnnotation`]. Source formats
//! are read by [`ingest`], cleaned by the staged [`pipeline`], summarised by
//! [`stats`], scored against predictions by [`metrics`] and drawn by
//! [`render`].

pub mod geometry;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod render;
pub mod stats;
pub mod text;

pub use geometry::BBox;
pub use model::{Cell, Extent, Split, TableAnnotation, TableGrid, Word};
