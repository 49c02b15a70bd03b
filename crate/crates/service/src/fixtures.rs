//! Synthetic striped datasets written to disk.
//!
//! Every image is a row of vertical stripes, `STRIPE_WIDTH` pixels wide,
//! each in its own strongly distinct color. The ground truth gives stripe
//! `i` the category listed at position `i`.

use std::fs;
use std::path::{Path, PathBuf};

use tracegrow_core::{encode_mask_png, LabelMask, Palette, Stroke};

use crate::manifest::{Category, CheckpointPolicy, DatasetManifest, ImageEntry};

pub const STRIPE_WIDTH: u32 = 8;
pub const STRIPE_HEIGHT: u32 = 24;

pub const STRIPE_COLORS: [[u8; 3]; 10] = [
    [230, 25, 25],
    [20, 30, 220],
    [250, 240, 30],
    [0, 120, 20],
    [240, 0, 240],
    [0, 230, 230],
    [110, 0, 0],
    [255, 255, 255],
    [0, 0, 0],
    [255, 140, 0],
];

#[derive(Debug, Clone)]
pub struct StripeImage {
    pub id: String,
    /// Ground-truth category per stripe.
    pub stripes: Vec<u8>,
    pub with_ground_truth: bool,
    pub objects: u32,
}

impl StripeImage {
    pub fn new(id: &str, stripes: &[u8], with_ground_truth: bool) -> Self {
        Self { id: id.to_string(), stripes: stripes.to_vec(), with_ground_truth, objects: 1 }
    }

    pub fn width(&self) -> u32 {
        self.stripes.len() as u32 * STRIPE_WIDTH
    }

    pub fn ground_truth(&self) -> LabelMask {
        LabelMask::from_fn(self.width(), STRIPE_HEIGHT, |x, _| self.stripes[(x / STRIPE_WIDTH) as usize])
    }

    /// One vertical line per stripe down its middle, labeled `labels[i]`.
    pub fn strokes(&self, labels: &[u8]) -> Vec<Stroke> {
        labels
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let x = i as i32 * STRIPE_WIDTH as i32 + STRIPE_WIDTH as i32 / 2;
                Stroke::line(c, 1, (x, 2), (x, STRIPE_HEIGHT as i32 - 3))
            })
            .collect()
    }

    /// Strokes that reproduce the ground truth.
    pub fn correct_strokes(&self) -> Vec<Stroke> {
        self.strokes(&self.stripes)
    }
}

pub fn stripe_rgb(stripes: usize) -> image::RgbImage {
    image::RgbImage::from_fn(stripes as u32 * STRIPE_WIDTH, STRIPE_HEIGHT, |x, _| {
        image::Rgb(STRIPE_COLORS[(x / STRIPE_WIDTH) as usize % STRIPE_COLORS.len()])
    })
}

/// Writes `<root>/datasets/<id>/` and returns the dataset directory.
pub fn write_stripe_dataset(
    root: &Path,
    id: &str,
    categories: usize,
    images: &[StripeImage],
    policy: CheckpointPolicy,
) -> PathBuf {
    let dir = root.join("datasets").join(id);
    fs::create_dir_all(dir.join("images")).unwrap();
    fs::create_dir_all(dir.join("gt")).unwrap();
    let voc = Palette::pascal_voc();
    let colors: Vec<[u8; 3]> = (0..categories)
        .map(|c| voc.color(c as u8).unwrap_or([c as u8, 255 - c as u8, (c * 7) as u8]))
        .collect();
    let palette = Palette::new(colors.clone()).unwrap();
    let mut entries = Vec::new();
    for img in images {
        let file = format!("images/{}.png", img.id);
        stripe_rgb(img.stripes.len()).save(dir.join(&file)).unwrap();
        let ground_truth = img.with_ground_truth.then(|| {
            let gt = format!("gt/{}.png", img.id);
            fs::write(dir.join(&gt), encode_mask_png(&img.ground_truth(), &palette).unwrap()).unwrap();
            gt
        });
        entries.push(ImageEntry { id: img.id.clone(), file, ground_truth, boxes: Vec::new(), objects: Some(img.objects) });
    }
    let manifest = DatasetManifest {
        dataset_id: id.to_string(),
        categories: colors.iter().enumerate().map(|(i, &color)| Category { name: format!("class{i}"), color }).collect(),
        images: entries,
        checkpoint: policy,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    dir
}
