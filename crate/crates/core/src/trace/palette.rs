use super::TraceError;
use crate::grid::UNLABELED;

/// Color stored for the void/unlabeled index 255 (the PASCAL VOC border color).
pub const VOID_COLOR: [u8; 3] = [224, 224, 192];

/// Category colors, indexed by category id. Index 255 is reserved for void.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<[u8; 3]>,
}

impl Palette {
    pub fn new(colors: Vec<[u8; 3]>) -> Result<Self, TraceError> {
        if colors.len() > UNLABELED as usize {
            return Err(TraceError::PaletteTooLarge(colors.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &colors {
            if !seen.insert(*c) || *c == VOID_COLOR {
                return Err(TraceError::DuplicateColor(*c));
            }
        }
        Ok(Self { colors })
    }

    /// The 21-entry PASCAL VOC palette (background + 20 classes).
    pub fn pascal_voc() -> Self {
        Self { colors: (0..21).map(voc_color).collect() }
    }

    /// The first `count` entries (at most 255) of the VOC color map.
    pub fn voc(count: usize) -> Result<Self, TraceError> {
        if count > UNLABELED as usize {
            return Err(TraceError::PaletteTooLarge(count));
        }
        Ok(Self { colors: (0..count).map(|i| voc_color(i as u8)).collect() })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, category: u8) -> Option<[u8; 3]> {
        if category == UNLABELED {
            return Some(VOID_COLOR);
        }
        self.colors.get(category as usize).copied()
    }

    pub fn contains(&self, value: u8) -> bool {
        value == UNLABELED || (value as usize) < self.colors.len()
    }

    pub fn colors(&self) -> &[[u8; 3]] {
        &self.colors
    }

    /// 256 RGB entries for a PLTE chunk; unused indices are black.
    pub(crate) fn plte(&self) -> Vec<u8> {
        let mut out = vec![0u8; 256 * 3];
        for (i, c) in self.colors.iter().enumerate() {
            out[i * 3..i * 3 + 3].copy_from_slice(c);
        }
        out[255 * 3..].copy_from_slice(&VOID_COLOR);
        out
    }
}

impl Default for Palette {
    fn default() -> Self {
        Self::pascal_voc()
    }
}

// Bit-interleaved VOC color map.
fn voc_color(index: u8) -> [u8; 3] {
    let (mut r, mut g, mut b) = (0u8, 0u8, 0u8);
    let mut c = index;
    for j in 0..8 {
        r |= (c & 1) << (7 - j);
        g |= ((c >> 1) & 1) << (7 - j);
        b |= ((c >> 2) & 1) << (7 - j);
        c >>= 3;
    }
    [r, g, b]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voc_colors() {
        let p = Palette::pascal_voc();
        assert_eq!(p.len(), 21);
        assert_eq!(p.color(0), Some([0, 0, 0]));
        assert_eq!(p.color(1), Some([128, 0, 0]));
        assert_eq!(p.color(15), Some([192, 128, 128]));
        assert_eq!(p.color(20), Some([0, 64, 128]));
        assert_eq!(p.color(255), Some(VOID_COLOR));
        assert_eq!(p.color(21), None);
        // The 256-entry map assigns the void color to index 255.
        assert_eq!(voc_color(255), VOID_COLOR);
    }

    #[test]
    fn validation() {
        assert!(matches!(Palette::new(vec![[1, 2, 3], [1, 2, 3]]), Err(TraceError::DuplicateColor(_))));
        assert!(matches!(Palette::new(vec![[0, 0, 0]; 256]), Err(TraceError::PaletteTooLarge(256))));
        assert!(matches!(Palette::new(vec![VOID_COLOR]), Err(TraceError::DuplicateColor(_))));
        let p = Palette::new(vec![[0, 0, 0], [255, 0, 0]]).unwrap();
        assert!(p.contains(1) && p.contains(255) && !p.contains(2));
    }

    #[test]
    fn extended_voc_map_is_valid() {
        let p = Palette::voc(255).unwrap();
        assert_eq!(Palette::new(p.colors().to_vec()).unwrap(), p);
        assert_eq!(&p.colors()[..21], Palette::pascal_voc().colors());
        assert!(matches!(Palette::voc(256), Err(TraceError::PaletteTooLarge(256))));
    }
}
