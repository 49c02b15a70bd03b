use crate::grid::LabelMask;
use crate::scalar::Scalar;

/// Per-pixel, per-category vote counts over the Monte Carlo iterations.
///
/// Counts are kept as integers so that each pixel's counts sum to the
/// iteration count exactly; [`LikelihoodTensor::likelihood`] exposes them
/// as fractions in whatever scalar type the caller wants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LikelihoodTensor {
    width: u32,
    height: u32,
    categories: usize,
    iterations: u32,
    counts: Vec<u16>,
}

impl LikelihoodTensor {
    pub(crate) fn new(width: u32, height: u32, categories: usize) -> Self {
        Self {
            width,
            height,
            categories,
            iterations: 0,
            counts: vec![0; width as usize * height as usize * categories],
        }
    }

    /// Adds one iteration's per-pixel labels.
    pub(crate) fn accumulate(&mut self, labels: &[u8]) {
        debug_assert_eq!(labels.len(), self.width as usize * self.height as usize);
        for (p, &l) in labels.iter().enumerate() {
            self.counts[p * self.categories + l as usize] += 1;
        }
        self.iterations += 1;
    }

    /// Builds a tensor from explicit per-iteration label planes.
    pub fn from_iterations<'a>(
        width: u32,
        height: u32,
        categories: usize,
        planes: impl IntoIterator<Item = &'a [u8]>,
    ) -> Self {
        let mut t = Self::new(width, height, categories);
        for plane in planes {
            t.accumulate(plane);
        }
        t
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn num_categories(&self) -> usize {
        self.categories
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    /// Raw counts, pixel-major: `counts[pixel * num_categories + category]`.
    pub fn counts(&self) -> &[u16] {
        &self.counts
    }

    pub fn count(&self, x: u32, y: u32, category: u8) -> u16 {
        let p = y as usize * self.width as usize + x as usize;
        self.counts[p * self.categories + category as usize]
    }

    /// Fraction of iterations that labeled `(x, y)` with `category`.
    pub fn likelihood<T: Scalar>(&self, x: u32, y: u32, category: u8) -> T {
        T::from_count(u64::from(self.count(x, y, category))) / T::from_count(u64::from(self.iterations))
    }

    /// Count of the winning category at each pixel.
    pub fn max_counts(&self) -> impl Iterator<Item = u16> + '_ {
        self.counts.chunks_exact(self.categories).map(|row| row.iter().copied().max().unwrap_or(0))
    }

    /// Per-pixel argmax, ties toward the smaller category id.
    pub fn argmax(&self) -> LabelMask {
        let labels = self
            .counts
            .chunks_exact(self.categories)
            .map(|row| {
                let mut best = 0usize;
                for (c, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = c;
                    }
                }
                best as u8
            })
            .collect();
        LabelMask::from_raw(self.width, self.height, labels).expect("tensor dimensions are valid")
    }
}
