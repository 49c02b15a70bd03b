//! Pixel containers shared by the engine, the stroke model and the evaluator.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Label value meaning "no category": unlabeled in a trace, void in ground truth.
pub const UNLABELED: u8 = 255;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
}

fn check_dims(width: u32, height: u32, actual: usize, per_pixel: usize) -> Result<(), GridError> {
    if width == 0 || height == 0 {
        return Err(GridError::EmptyDimensions { width, height });
    }
    let expected = width as usize * height as usize * per_pixel;
    if actual != expected {
        return Err(GridError::BufferSize { expected, actual });
    }
    Ok(())
}

/// 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, GridError> {
        check_dims(width, height, data.len(), 3)?;
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }
}

/// Common read access to a one-byte-per-pixel label plane.
pub trait LabelPlane {
    fn width(&self) -> u32;
    fn height(&self) -> u32;
    fn labels(&self) -> &[u8];

    fn label(&self, x: u32, y: u32) -> u8 {
        self.labels()[y as usize * self.width() as usize + x as usize]
    }

    fn same_shape(&self, other: &impl LabelPlane) -> bool {
        self.width() == other.width() && self.height() == other.height()
    }
}

macro_rules! label_plane {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub struct $name {
            width: u32,
            height: u32,
            labels: Vec<u8>,
        }

        impl $name {
            pub fn from_raw(width: u32, height: u32, labels: Vec<u8>) -> Result<Self, GridError> {
                check_dims(width, height, labels.len(), 1)?;
                Ok(Self { width, height, labels })
            }

            pub fn filled(width: u32, height: u32, value: u8) -> Self {
                assert!(width > 0 && height > 0, "plane must be non-empty");
                Self { width, height, labels: vec![value; width as usize * height as usize] }
            }

            pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
                assert!(width > 0 && height > 0, "plane must be non-empty");
                let mut labels = Vec::with_capacity(width as usize * height as usize);
                for y in 0..height {
                    for x in 0..width {
                        labels.push(f(x, y));
                    }
                }
                Self { width, height, labels }
            }

            pub fn set(&mut self, x: u32, y: u32, value: u8) {
                let w = self.width as usize;
                self.labels[y as usize * w + x as usize] = value;
            }

            pub fn labels_mut(&mut self) -> &mut [u8] {
                &mut self.labels
            }

            pub fn into_labels(self) -> Vec<u8> {
                self.labels
            }
        }

        impl LabelPlane for $name {
            fn width(&self) -> u32 {
                self.width
            }
            fn height(&self) -> u32 {
                self.height
            }
            fn labels(&self) -> &[u8] {
                &self.labels
            }
        }
    };
}

label_plane! {
    /// Sparse per-pixel category labels drawn by the annotator.
    /// [`UNLABELED`] marks pixels without a trace.
    TraceRaster
}

label_plane! {
    /// Dense per-pixel category mask.
    LabelMask
}

impl TraceRaster {
    /// All-unlabeled raster.
    pub fn empty(width: u32, height: u32) -> Self {
        Self::filled(width, height, UNLABELED)
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != UNLABELED).count()
    }
}

impl From<TraceRaster> for LabelMask {
    fn from(t: TraceRaster) -> Self {
        LabelMask { width: t.width, height: t.height, labels: t.labels }
    }
}
