use std::fmt;

use serde::{Deserialize, Serialize};

use super::TraceError;
use crate::grid::{LabelPlane, TraceRaster, UNLABELED};

/// Allowed stroke thicknesses in pixels.
pub const THICKNESSES: [u8; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tool {
    Pencil,
    Line,
    Eraser,
}

impl fmt::Display for Tool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tool::Pencil => "pencil",
            Tool::Line => "line",
            Tool::Eraser => "eraser",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stroke {
    pub tool: Tool,
    /// Ignored for the eraser.
    #[serde(default)]
    pub category: u8,
    pub thickness: u8,
    pub points: Vec<(i32, i32)>,
}

impl Stroke {
    pub fn pencil(category: u8, thickness: u8, points: Vec<(i32, i32)>) -> Self {
        Self { tool: Tool::Pencil, category, thickness, points }
    }

    pub fn line(category: u8, thickness: u8, from: (i32, i32), to: (i32, i32)) -> Self {
        Self { tool: Tool::Line, category, thickness, points: vec![from, to] }
    }

    pub fn eraser(thickness: u8, points: Vec<(i32, i32)>) -> Self {
        Self { tool: Tool::Eraser, category: UNLABELED, thickness, points }
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        if !THICKNESSES.contains(&self.thickness) {
            return Err(TraceError::InvalidThickness(self.thickness));
        }
        let ok = match self.tool {
            Tool::Line => self.points.len() == 2,
            Tool::Pencil | Tool::Eraser => !self.points.is_empty(),
        };
        if !ok {
            return Err(TraceError::DegenerateStroke { tool: self.tool, points: self.points.len() });
        }
        if self.tool != Tool::Eraser && self.category == UNLABELED {
            return Err(TraceError::ReservedCategory(self.category));
        }
        Ok(())
    }

    /// Value the stroke writes into a raster.
    pub fn value(&self) -> u8 {
        match self.tool {
            Tool::Eraser => UNLABELED,
            Tool::Pencil | Tool::Line => self.category,
        }
    }
}

/// Integer line from `a` to `b`, both endpoints included.
pub fn bresenham(a: (i32, i32), b: (i32, i32)) -> Vec<(i32, i32)> {
    let (mut x, mut y) = a;
    let dx = (b.0 - a.0).abs();
    let dy = -(b.1 - a.1).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity((dx - dy + 1) as usize);
    loop {
        out.push((x, y));
        if (x, y) == b {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

/// Draws one stroke. Points are clamped into the raster; each path pixel is
/// stamped with a `thickness`-sided square whose top-left corner is the
/// pixel, clipped at the raster edge.
pub fn rasterize_stroke(raster: &mut TraceRaster, stroke: &Stroke) -> Result<(), TraceError> {
    stroke.validate()?;
    let (w, h) = (raster.width() as i32, raster.height() as i32);
    let clamp = |(x, y): (i32, i32)| (x.clamp(0, w - 1), y.clamp(0, h - 1));
    let points: Vec<(i32, i32)> = stroke.points.iter().copied().map(clamp).collect();
    let value = stroke.value();
    let t = i32::from(stroke.thickness);
    let labels = raster.labels_mut();
    let mut stamp = |(x, y): (i32, i32)| {
        for sy in y..(y + t).min(h) {
            let row = sy as usize * w as usize;
            for sx in x..(x + t).min(w) {
                labels[row + sx as usize] = value;
            }
        }
    };
    if points.len() == 1 {
        stamp(points[0]);
    }
    for pair in points.windows(2) {
        for p in bresenham(pair[0], pair[1]) {
            stamp(p);
        }
    }
    Ok(())
}

/// Replays strokes in order onto an all-unlabeled raster.
pub fn raster_from_strokes(width: u32, height: u32, strokes: &[Stroke]) -> Result<TraceRaster, TraceError> {
    let mut raster = TraceRaster::empty(width, height);
    for s in strokes {
        rasterize_stroke(&mut raster, s)?;
    }
    Ok(raster)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn horizontal_line() {
        let r = raster_from_strokes(4, 4, &[Stroke::line(5, 1, (0, 0), (3, 0))]).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(r.label(x, y), if y == 0 { 5 } else { UNLABELED });
            }
        }
    }

    #[test]
    fn eraser_clears_its_stamp() {
        let mut r = TraceRaster::filled(12, 12, 3);
        rasterize_stroke(&mut r, &Stroke::eraser(8, vec![(2, 2)])).unwrap();
        for y in 0..12 {
            for x in 0..12 {
                let inside = (2..10).contains(&x) && (2..10).contains(&y);
                assert_eq!(r.label(x, y), if inside { UNLABELED } else { 3 }, "({x},{y})");
            }
        }
    }

    // Per-pixel oracle: a pixel is labeled iff it lies in the 2x2 stamp of
    // some path pixel of the diagonal.
    #[test]
    fn thick_diagonal_matches_stamp_oracle() {
        let path = [(0, 0), (1, 1), (2, 2)];
        assert_eq!(bresenham((0, 0), (2, 2)), path.to_vec());
        let r = raster_from_strokes(8, 8, &[Stroke::pencil(1, 2, vec![(0, 0), (2, 2)])]).unwrap();
        for y in 0..8i32 {
            for x in 0..8i32 {
                let covered = path.iter().any(|&(px, py)| x >= px && x < px + 2 && y >= py && y < py + 2);
                assert_eq!(r.label(x as u32, y as u32), if covered { 1 } else { UNLABELED }, "({x},{y})");
            }
        }
    }

    #[test]
    fn replay_semantics() {
        assert!(raster_from_strokes(5, 5, &[]).unwrap().labels().iter().all(|&l| l == UNLABELED));
        let drawn = Stroke::pencil(1, 2, vec![(0, 0), (4, 4)]);
        let erased = Stroke::eraser(8, vec![(0, 0)]);
        let r = raster_from_strokes(5, 5, &[drawn.clone(), erased]).unwrap();
        assert!(r.labels().iter().all(|&l| l == UNLABELED));
        let r = raster_from_strokes(5, 5, &[Stroke::line(1, 4, (0, 0), (4, 0)), Stroke::line(2, 1, (0, 1), (4, 1))])
            .unwrap();
        assert_eq!(r.label(2, 1), 2);
        assert_eq!(r.label(2, 0), 1);
        assert_eq!(r.label(2, 2), 1);
    }

    #[test]
    fn clamps_out_of_bounds_points() {
        let r = raster_from_strokes(4, 3, &[Stroke::line(2, 1, (-10, 1), (50, 1))]).unwrap();
        assert_eq!(r.labels(), &[255, 255, 255, 255, 2, 2, 2, 2, 255, 255, 255, 255]);
    }

    #[test]
    fn rejects_invalid_strokes() {
        let mut r = TraceRaster::empty(4, 4);
        assert!(matches!(
            rasterize_stroke(&mut r, &Stroke::pencil(1, 3, vec![(0, 0)])),
            Err(TraceError::InvalidThickness(3))
        ));
        assert!(matches!(
            rasterize_stroke(&mut r, &Stroke::pencil(1, 1, vec![])),
            Err(TraceError::DegenerateStroke { tool: Tool::Pencil, points: 0 })
        ));
        let three = Stroke { tool: Tool::Line, category: 1, thickness: 1, points: vec![(0, 0), (1, 1), (2, 2)] };
        assert!(matches!(rasterize_stroke(&mut r, &three), Err(TraceError::DegenerateStroke { .. })));
        assert!(matches!(
            rasterize_stroke(&mut r, &Stroke::pencil(255, 1, vec![(0, 0)])),
            Err(TraceError::ReservedCategory(255))
        ));
    }

    fn stroke_strategy() -> impl Strategy<Value = Stroke> {
        (
            prop_oneof![Just(Tool::Pencil), Just(Tool::Line), Just(Tool::Eraser)],
            0u8..21,
            proptest::sample::select(THICKNESSES.to_vec()),
            proptest::collection::vec((-3i32..20, -3i32..20), 1..6),
        )
            .prop_map(|(tool, category, thickness, mut points)| {
                if tool == Tool::Line {
                    points.resize(2, points[0]);
                }
                Stroke { tool, category, thickness, points }
            })
    }

    proptest! {
        #[test]
        fn repeated_stroke_is_idempotent(base in proptest::collection::vec(stroke_strategy(), 0..4), s in stroke_strategy()) {
            let mut once = raster_from_strokes(16, 12, &base).unwrap();
            rasterize_stroke(&mut once, &s).unwrap();
            let mut twice = once.clone();
            rasterize_stroke(&mut twice, &s).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn changes_stay_inside_the_stamped_path(base in proptest::collection::vec(stroke_strategy(), 0..4), s in stroke_strategy()) {
            let before = raster_from_strokes(16, 12, &base).unwrap();
            let mut after = before.clone();
            rasterize_stroke(&mut after, &s).unwrap();
            let clamp = |(x, y): (i32, i32)| (x.clamp(0, 15), y.clamp(0, 11));
            let pts: Vec<_> = s.points.iter().copied().map(clamp).collect();
            let mut path: BTreeSet<(i32, i32)> = pts.iter().copied().collect();
            for w in pts.windows(2) {
                path.extend(bresenham(w[0], w[1]));
            }
            let t = i32::from(s.thickness);
            for y in 0..12i32 {
                for x in 0..16i32 {
                    let covered = path.iter().any(|&(px, py)| x >= px && x < px + t && y >= py && y < py + t);
                    let (b, a) = (before.label(x as u32, y as u32), after.label(x as u32, y as u32));
                    if covered {
                        prop_assert_eq!(a, s.value());
                    } else {
                        prop_assert_eq!(a, b);
                    }
                }
            }
        }
    }
}
