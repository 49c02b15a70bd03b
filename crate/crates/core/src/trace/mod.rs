//! Annotator strokes, their rasterization, and the indexed PNG mask format.

mod codec;
mod document;
mod palette;
mod stroke;

pub use codec::{decode_mask_png, decode_mask_png_checked, encode_mask_png};
pub use document::{StrokeDocument, STROKE_DOCUMENT_VERSION};
pub use palette::{Palette, VOID_COLOR};
pub use stroke::{bresenham, raster_from_strokes, rasterize_stroke, Stroke, Tool, THICKNESSES};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("stroke thickness {0} is not one of 1, 2, 4, 8")]
    InvalidThickness(u8),
    #[error("degenerate {tool} stroke with {points} point(s)")]
    DegenerateStroke { tool: Tool, points: usize },
    #[error("category {0} is reserved for unlabeled pixels")]
    ReservedCategory(u8),
    #[error("mask value {0} has no palette entry")]
    UnknownCategoryValue(u8),
    #[error("palette has {0} entries, at most 255 are allowed")]
    PaletteTooLarge(usize),
    #[error("palette color {0:?} is used twice")]
    DuplicateColor([u8; 3]),
    #[error("malformed PNG: {0}")]
    MalformedPng(String),
    #[error("unsupported stroke document version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid stroke document: {0}")]
    Document(#[from] serde_json::Error),
}
