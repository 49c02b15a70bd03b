use std::collections::HashSet;
use std::path::{Component, Path};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracegrow_core::{Palette, TraceError};

pub const MAX_CATEGORIES: usize = 254;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dataset id {0:?} must be non-empty and use only [A-Za-z0-9_-]")]
    BadId(String),
    #[error("dataset needs between 1 and {MAX_CATEGORIES} categories, found {0}")]
    CategoryCount(usize),
    #[error("palette: {0}")]
    Palette(TraceError),
    #[error("image id {0:?} appears twice")]
    DuplicateImage(String),
    #[error("path {0:?} must be relative and stay inside the dataset directory")]
    UnsafePath(String),
    #[error("image {0:?} must have at least one object")]
    NoObjects(String),
    #[error("checkpoint policy: {0}")]
    Policy(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Category {
    pub name: String,
    pub color: [u8; 3],
}

/// Axis-aligned box `[x, y, width, height]` around one object to annotate.
pub type BoundingBox = [u32; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageEntry {
    pub id: String,
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boxes: Vec<BoundingBox>,
    /// Number of objects to annotate; defaults to the box count, or 1.
    #[serde(default)]
    pub objects: Option<u32>,
}

impl ImageEntry {
    pub fn object_count(&self) -> u32 {
        self.objects.unwrap_or_else(|| (self.boxes.len() as u32).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckpointPolicy {
    pub batch_size: usize,
    pub ground_truth_per_batch: usize,
    pub threshold: f64,
}

impl Default for CheckpointPolicy {
    fn default() -> Self {
        Self { batch_size: 3, ground_truth_per_batch: 1, threshold: tracegrow_core::eval::DEFAULT_CHECKPOINT_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub categories: Vec<Category>,
    pub images: Vec<ImageEntry>,
    #[serde(default)]
    pub checkpoint: CheckpointPolicy,
}

pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn check_path(p: &str) -> Result<(), ManifestError> {
    let path = Path::new(p);
    let ok = !p.is_empty() && path.components().all(|c| matches!(c, Component::Normal(_)));
    if ok {
        Ok(())
    } else {
        Err(ManifestError::UnsafePath(p.to_string()))
    }
}

impl DatasetManifest {
    /// Parses and checks everything that does not need the file system.
    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let m: DatasetManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        if !valid_id(&self.dataset_id) {
            return Err(ManifestError::BadId(self.dataset_id.clone()));
        }
        let n = self.categories.len();
        if n == 0 || n > MAX_CATEGORIES {
            return Err(ManifestError::CategoryCount(n));
        }
        self.palette()?;
        let mut seen = HashSet::new();
        for img in &self.images {
            if !valid_id(&img.id) {
                return Err(ManifestError::BadId(img.id.clone()));
            }
            if !seen.insert(img.id.as_str()) {
                return Err(ManifestError::DuplicateImage(img.id.clone()));
            }
            check_path(&img.file)?;
            if let Some(gt) = &img.ground_truth {
                check_path(gt)?;
            }
            if img.object_count() == 0 {
                return Err(ManifestError::NoObjects(img.id.clone()));
            }
        }
        let p = &self.checkpoint;
        if p.batch_size == 0 {
            return Err(ManifestError::Policy("batch_size must be positive"));
        }
        if p.ground_truth_per_batch == 0 || p.ground_truth_per_batch > p.batch_size {
            return Err(ManifestError::Policy("ground_truth_per_batch must lie in 1..=batch_size"));
        }
        if !(0.0..=1.0).contains(&p.threshold) {
            return Err(ManifestError::Policy("threshold must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn palette(&self) -> Result<Palette, ManifestError> {
        Palette::new(self.categories.iter().map(|c| c.color).collect()).map_err(ManifestError::Palette)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "dataset_id": "voc-mini",
        "categories": [{"name": "background", "color": [0, 0, 0]}, {"name": "cat", "color": [64, 0, 0]}],
        "images": [
            {"id": "a", "file": "images/a.png", "ground_truth": "gt/a.png", "boxes": [[1, 2, 3, 4], [0, 0, 2, 2]]},
            {"id": "b", "file": "images/b.jpg", "objects": 3}
        ]
    }"#;

    #[test]
    fn parses_with_default_policy() {
        let m = DatasetManifest::from_json(GOOD).unwrap();
        assert_eq!(m.checkpoint, CheckpointPolicy { batch_size: 3, ground_truth_per_batch: 1, threshold: 0.70 });
        assert_eq!(m.images[0].object_count(), 2);
        assert_eq!(m.images[1].object_count(), 3);
        assert_eq!(m.palette().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_manifests() {
        let edit = |from: &str, to: &str| DatasetManifest::from_json(&GOOD.replace(from, to));
        assert!(matches!(edit("\"voc-mini\"", "\"../x\""), Err(ManifestError::BadId(_))));
        assert!(matches!(edit("images/a.png", "../a.png"), Err(ManifestError::UnsafePath(_))));
        assert!(matches!(edit("gt/a.png", "/etc/passwd"), Err(ManifestError::UnsafePath(_))));
        assert!(matches!(edit("\"id\": \"b\"", "\"id\": \"a\""), Err(ManifestError::DuplicateImage(_))));
        assert!(matches!(edit("[64, 0, 0]", "[0, 0, 0]"), Err(ManifestError::Palette(_))));
        assert!(matches!(edit("\"objects\": 3", "\"objects\": 0"), Err(ManifestError::NoObjects(_))));
        assert!(matches!(edit("{\"id\"", "{\"idd\""), Err(ManifestError::Json(_))));
        let m = GOOD.replacen('{', "{\"checkpoint\": {\"ground_truth_per_batch\": 4},", 1);
        assert!(matches!(DatasetManifest::from_json(&m), Err(ManifestError::Policy(_))));
    }

    #[test]
    fn category_limit() {
        let cats: Vec<Category> =
            (0..255u32).map(|i| Category { name: format!("c{i}"), color: [i as u8, (i >> 8) as u8, 1] }).collect();
        let mut m = DatasetManifest::from_json(GOOD).unwrap();
        m.categories = cats[..254].to_vec();
        assert!(m.validate().is_ok());
        m.categories = cats;
        assert!(matches!(m.validate(), Err(ManifestError::CategoryCount(255))));
    }
}
