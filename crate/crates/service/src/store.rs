//! On-disk dataset store.
//!
//! ```text
//! <data_root>/datasets/<dataset_id>/
//!     manifest.json
//!     images/...            annotator-facing images
//!     gt/...                indexed PNG ground truth
//!     submissions/<id>.png  accepted masks, never overwritten
//!     submissions.log       one JSON record per line, append-only
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use tracegrow_core::trace::decode_mask_png_checked;
use tracegrow_core::{IouReport64, LabelMask, LabelPlane, Palette, RgbImage, ScoreReport64};

use crate::error::ServiceError;
use crate::manifest::{DatasetManifest, ImageEntry};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUBMISSIONS_DIR: &str = "submissions";
pub const SUBMISSIONS_LOG: &str = "submissions.log";

/// Decodes any format the `image` crate understands into 8-bit RGB.
pub fn load_rgb_image(path: &Path) -> Result<RgbImage, ServiceError> {
    let rgb = image::open(path)?.to_rgb8();
    let (w, h) = rgb.dimensions();
    RgbImage::from_raw(w, h, rgb.into_raw()).map_err(|e| ServiceError::Internal(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmissionRecord {
    pub record_id: String,
    pub dataset_id: String,
    pub user_id: String,
    pub session_id: String,
    pub image_id: String,
    /// Relative to the dataset directory.
    pub mask_file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iou: Option<IouReport64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreReport64>,
    pub elapsed_seconds: f64,
    pub refine_count: u32,
    pub attempt: u32,
    pub first_stroke_at_ms: Option<u64>,
    pub submitted_at_ms: u64,
}

#[derive(Debug)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
    pub palette: Palette,
    entries: HashMap<String, usize>,
    dims: HashMap<String, (u32, u32)>,
    ground_truth: HashMap<String, Arc<LabelMask>>,
    images: Mutex<HashMap<String, Arc<RgbImage>>>,
    log_lock: Mutex<()>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Manifest(#[from] crate::manifest::ManifestError),
    #[error("manifest id {found:?} does not match directory name {dir:?}")]
    IdMismatch { found: String, dir: String },
    #[error("image {id}: {message}")]
    Image { id: String, message: String },
}

impl Dataset {
    pub fn load(dir: &Path) -> Result<Self, LoadError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| LoadError::Io { path, source }
        };
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path).map_err(io(&manifest_path))?;
        let manifest = DatasetManifest::from_json(&text)?;
        let dir_name = dir.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if manifest.dataset_id != dir_name {
            return Err(LoadError::IdMismatch { found: manifest.dataset_id, dir: dir_name.to_string() });
        }
        let palette = manifest.palette()?;
        let mut entries = HashMap::new();
        let mut dims = HashMap::new();
        let mut ground_truth = HashMap::new();
        for (i, img) in manifest.images.iter().enumerate() {
            let bad = |message: String| LoadError::Image { id: img.id.clone(), message };
            let (w, h) = image::image_dimensions(dir.join(&img.file)).map_err(|e| bad(e.to_string()))?;
            if let Some(gt_file) = &img.ground_truth {
                let gt_path = dir.join(gt_file);
                let bytes = fs::read(&gt_path).map_err(io(&gt_path))?;
                let gt = decode_mask_png_checked(&bytes, &palette).map_err(|e| bad(format!("ground truth: {e}")))?;
                if (gt.width(), gt.height()) != (w, h) {
                    return Err(bad(format!(
                        "ground truth is {}x{} but the image is {w}x{h}",
                        gt.width(),
                        gt.height()
                    )));
                }
                ground_truth.insert(img.id.clone(), Arc::new(gt));
            }
            entries.insert(img.id.clone(), i);
            dims.insert(img.id.clone(), (w, h));
        }
        Ok(Self {
            manifest,
            root: dir.to_path_buf(),
            palette,
            entries,
            dims,
            ground_truth,
            images: Mutex::new(HashMap::new()),
            log_lock: Mutex::new(()),
        })
    }

    pub fn id(&self) -> &str {
        &self.manifest.dataset_id
    }

    pub fn entry(&self, image_id: &str) -> Option<&ImageEntry> {
        self.entries.get(image_id).map(|&i| &self.manifest.images[i])
    }

    pub fn dimensions(&self, image_id: &str) -> Option<(u32, u32)> {
        self.dims.get(image_id).copied()
    }

    pub fn ground_truth(&self, image_id: &str) -> Option<Arc<LabelMask>> {
        self.ground_truth.get(image_id).cloned()
    }

    pub fn image_path(&self, image_id: &str) -> Option<PathBuf> {
        self.entry(image_id).map(|e| self.root.join(&e.file))
    }

    /// Decoded RGB pixels, cached after the first load.
    pub fn rgb_image(&self, image_id: &str) -> Result<Arc<RgbImage>, ServiceError> {
        if let Some(img) = self.images.lock().expect("image cache poisoned").get(image_id) {
            return Ok(img.clone());
        }
        let path = self.image_path(image_id).ok_or_else(|| ServiceError::UnknownImage(image_id.to_string()))?;
        let img = Arc::new(load_rgb_image(&path)?);
        self.images.lock().expect("image cache poisoned").insert(image_id.to_string(), img.clone());
        Ok(img)
    }

    /// Writes the masks, then appends their records to the log.
    ///
    /// Mask files are created exclusively, so an existing submission can
    /// never be replaced.
    pub fn persist(&self, submissions: &[(SubmissionRecord, Vec<u8>)]) -> Result<(), ServiceError> {
        let _guard = self.log_lock.lock().expect("submission log poisoned");
        fs::create_dir_all(self.root.join(SUBMISSIONS_DIR))?;
        let mut lines = String::new();
        for (record, png) in submissions {
            let mut f = OpenOptions::new().write(true).create_new(true).open(self.root.join(&record.mask_file))?;
            f.write_all(png)?;
            f.sync_all()?;
            lines.push_str(&serde_json::to_string(record).map_err(|e| ServiceError::Internal(e.to_string()))?);
            lines.push('\n');
        }
        let mut log = OpenOptions::new().create(true).append(true).open(self.root.join(SUBMISSIONS_LOG))?;
        log.write_all(lines.as_bytes())?;
        log.sync_all()?;
        Ok(())
    }

    /// Tar archive of the submission log and every stored mask.
    pub fn export(&self) -> Result<Vec<u8>, ServiceError> {
        let _guard = self.log_lock.lock().expect("submission log poisoned");
        let mut tar = tar::Builder::new(Vec::new());
        let mut add = |name: &str, data: &[u8]| -> std::io::Result<()> {
            let mut header = tar::Header::new_gnu();
            header.set_size(data.len() as u64);
            header.set_mode(0o644);
            header.set_cksum();
            tar.append_data(&mut header, name, data)
        };
        let log_path = self.root.join(SUBMISSIONS_LOG);
        if log_path.is_file() {
            add(SUBMISSIONS_LOG, &fs::read(&log_path)?)?;
        }
        let dir = self.root.join(SUBMISSIONS_DIR);
        if dir.is_dir() {
            let mut names: Vec<String> = fs::read_dir(&dir)?
                .filter_map(|e| e.ok())
                .filter(|e| e.path().is_file())
                .filter_map(|e| e.file_name().into_string().ok())
                .filter(|n| n.ends_with(".png"))
                .collect();
            names.sort();
            for name in names {
                add(&format!("{SUBMISSIONS_DIR}/{name}"), &fs::read(dir.join(&name))?)?;
            }
        }
        Ok(tar.into_inner()?)
    }
}

/// A dataset directory that failed to load.
#[derive(Debug, Clone)]
pub struct Rejected {
    pub dir: PathBuf,
    pub reason: String,
}

/// All datasets under a data root, loaded once and immutable afterwards.
#[derive(Debug, Default)]
pub struct DatasetStore {
    datasets: BTreeMap<String, Arc<Dataset>>,
    rejected: Vec<Rejected>,
}

impl DatasetStore {
    /// Loads every `datasets/*/manifest.json`. Broken datasets are logged
    /// and left out.
    pub fn load(data_root: &Path) -> Result<Self, std::io::Error> {
        let mut store = Self::default();
        let base = data_root.join("datasets");
        if !base.is_dir() {
            return Ok(store);
        }
        let mut dirs: Vec<PathBuf> = fs::read_dir(&base)?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
        dirs.sort();
        for dir in dirs.into_iter().filter(|d| d.is_dir()) {
            match Dataset::load(&dir) {
                Ok(ds) => {
                    tracing::info!(dataset = ds.id(), images = ds.manifest.images.len(), "loaded dataset");
                    store.datasets.insert(ds.id().to_string(), Arc::new(ds));
                }
                Err(e) => {
                    tracing::warn!(dir = %dir.display(), error = %e, "skipping dataset");
                    store.rejected.push(Rejected { dir, reason: e.to_string() });
                }
            }
        }
        Ok(store)
    }

    pub fn get(&self, id: &str) -> Option<&Arc<Dataset>> {
        self.datasets.get(id)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &Arc<Dataset>> {
        self.datasets.values()
    }

    pub fn rejected(&self) -> &[Rejected] {
        &self.rejected
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }
}
