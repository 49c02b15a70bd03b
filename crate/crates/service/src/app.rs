use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex, RwLock};

use base64::Engine as _;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex as SessionLock;
use tracegrow_core::eval::{checkpoint_gate, final_score, iou, ScoreInput};
use tracegrow_core::{
    encode_mask_png, raster_from_strokes, refine, IouReport64, LabelPlane, Refinement, ScoreReport64, StrokeDocument,
};

use crate::clock::Clock;
use crate::config::EngineSettings;
use crate::error::ServiceError;
use crate::manifest::Category;
use crate::session::{BatchStatus, ImageWork, SessionState, SessionView};
use crate::store::{Dataset, DatasetStore, SubmissionRecord, SUBMISSIONS_DIR};

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub dataset_id: String,
    pub categories: Vec<Category>,
    pub image_count: usize,
    pub batch_size: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    pub user_id: String,
    pub dataset_id: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceAck {
    pub image_id: String,
    pub stroke_count: usize,
    pub labeled_pixels: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CategoryShare {
    pub category: u8,
    pub pixels: u64,
}

/// Compact description of the likelihood tensor behind a refined mask.
#[derive(Debug, Clone, Serialize)]
pub struct LikelihoodSummary {
    pub iterations: u32,
    pub categories: usize,
    /// Mean over pixels of the winning category's likelihood.
    pub mean_confidence: f64,
    /// Pixels where not every iteration agreed.
    pub contested_pixels: u64,
    pub per_category: Vec<CategoryShare>,
}

impl LikelihoodSummary {
    pub fn of(r: &Refinement) -> Self {
        let lt = &r.likelihood;
        let iterations = lt.iterations();
        let mut total = 0u64;
        let mut contested = 0u64;
        for m in lt.max_counts() {
            total += u64::from(m);
            contested += u64::from(u32::from(m) < iterations);
        }
        let pixels = r.mask.labels().len() as f64;
        let mut per = vec![0u64; lt.num_categories()];
        for &l in r.mask.labels() {
            per[l as usize] += 1;
        }
        Self {
            iterations,
            categories: lt.num_categories(),
            mean_confidence: total as f64 / (pixels * f64::from(iterations)),
            contested_pixels: contested,
            per_category: per
                .into_iter()
                .enumerate()
                .map(|(c, pixels)| CategoryShare { category: c as u8, pixels })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineResponse {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub refine_count: u32,
    /// Indexed PNG, base64.
    pub mask_png: String,
    pub likelihood: LikelihoodSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Passed,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmitResponse {
    pub outcome: Outcome,
    /// One report per verified image, in no particular order.
    pub scores: Vec<ScoreReport64>,
    pub session: SessionView,
}

struct Inner {
    store: DatasetStore,
    engine: EngineSettings,
    clock: Arc<dyn Clock>,
    rng: Mutex<ChaCha8Rng>,
    sessions: RwLock<HashMap<String, Arc<SessionLock<SessionState>>>>,
    /// Images already handed to each (user, dataset).
    assigned: Mutex<HashMap<(String, String), HashSet<String>>>,
}

/// Shared service state. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(store: DatasetStore, engine: EngineSettings, rng_seed: Option<u64>, clock: Arc<dyn Clock>) -> Self {
        let rng = match rng_seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_os_rng(),
        };
        Self {
            inner: Arc::new(Inner {
                store,
                engine,
                clock,
                rng: Mutex::new(rng),
                sessions: RwLock::new(HashMap::new()),
                assigned: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn store(&self) -> &DatasetStore {
        &self.inner.store
    }

    pub fn engine(&self) -> &EngineSettings {
        &self.inner.engine
    }

    fn now(&self) -> f64 {
        self.inner.clock.seconds()
    }

    fn dataset(&self, id: &str) -> Result<&Arc<Dataset>, ServiceError> {
        self.inner.store.get(id).ok_or_else(|| ServiceError::UnknownDataset(id.to_string()))
    }

    fn session(&self, id: &str) -> Result<Arc<SessionLock<SessionState>>, ServiceError> {
        let sessions = self.inner.sessions.read().expect("session table poisoned");
        sessions.get(id).cloned().ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn list_datasets(&self) -> Vec<DatasetSummary> {
        self.inner
            .store
            .datasets()
            .map(|d| DatasetSummary {
                dataset_id: d.id().to_string(),
                categories: d.manifest.categories.clone(),
                image_count: d.manifest.images.len(),
                batch_size: d.manifest.checkpoint.batch_size,
                threshold: d.manifest.checkpoint.threshold,
            })
            .collect()
    }

    /// Draws the next batch for a user and records the assignment.
    fn assemble_batch(&self, user: &str, ds: &Dataset) -> Result<Vec<ImageWork>, ServiceError> {
        let policy = &ds.manifest.checkpoint;
        let mut assigned = self.inner.assigned.lock().expect("assignment table poisoned");
        let taken = assigned.entry((user.to_string(), ds.id().to_string())).or_default();
        let (mut verified, mut plain) = (Vec::new(), Vec::new());
        for img in &ds.manifest.images {
            if taken.contains(&img.id) {
                continue;
            }
            if ds.ground_truth(&img.id).is_some() {
                verified.push(img.id.as_str());
            } else {
                plain.push(img.id.as_str());
            }
        }
        let insufficient = |reason| ServiceError::InsufficientImages { dataset: ds.id().to_string(), reason };
        if verified.len() < policy.ground_truth_per_batch {
            return Err(insufficient("not enough unassigned ground-truth images"));
        }
        let plain_needed = policy.batch_size - policy.ground_truth_per_batch;
        if plain.len() < plain_needed {
            return Err(insufficient("not enough unassigned images"));
        }
        let mut rng = self.inner.rng.lock().expect("rng poisoned");
        let mut batch: Vec<ImageWork> = index::sample(&mut *rng, verified.len(), policy.ground_truth_per_batch)
            .into_iter()
            .map(|i| ImageWork::new(verified[i].to_string(), true))
            .chain(
                index::sample(&mut *rng, plain.len(), plain_needed)
                    .into_iter()
                    .map(|i| ImageWork::new(plain[i].to_string(), false)),
            )
            .collect();
        batch.shuffle(&mut *rng);
        taken.extend(batch.iter().map(|w| w.image_id.clone()));
        Ok(batch)
    }

    pub async fn create_session(&self, req: CreateSession) -> Result<SessionView, ServiceError> {
        if req.user_id.trim().is_empty() {
            return Err(ServiceError::BadRequest("user_id must not be empty".into()));
        }
        let ds = self.dataset(&req.dataset_id)?;
        let images = self.assemble_batch(&req.user_id, ds)?;
        let (session_id, rng_seed) = {
            let mut rng = self.inner.rng.lock().expect("rng poisoned");
            (uuid::Builder::from_random_bytes(rng.random()).into_uuid().to_string(), rng.random::<u64>())
        };
        let state = SessionState {
            session_id: session_id.clone(),
            user_id: req.user_id,
            dataset_id: req.dataset_id,
            rng_seed,
            batch_number: 0,
            attempt: 0,
            status: BatchStatus::InProgress,
            images,
        };
        let view = state.view(self.now());
        tracing::info!(session = %session_id, user = %state.user_id, dataset = %state.dataset_id, "session created");
        self.inner
            .sessions
            .write()
            .expect("session table poisoned")
            .insert(session_id, Arc::new(SessionLock::new(state)));
        Ok(view)
    }

    pub async fn session_view(&self, id: &str) -> Result<SessionView, ServiceError> {
        let s = self.session(id)?;
        let s = s.lock().await;
        Ok(s.view(self.now()))
    }

    /// Full server-side state, including which images carry ground truth.
    /// Never hand this to clients.
    #[doc(hidden)]
    pub async fn session_state(&self, id: &str) -> Result<SessionState, ServiceError> {
        Ok(self.session(id)?.lock().await.clone())
    }

    fn open_image<'a>(s: &'a mut SessionState, image_id: &str) -> Result<&'a mut ImageWork, ServiceError> {
        if !s.status.is_open() {
            return Err(ServiceError::BatchClosed(s.session_id.clone()));
        }
        let sid = s.session_id.clone();
        s.image_mut(image_id).ok_or_else(|| ServiceError::NotInSession { session: sid, image: image_id.to_string() })
    }

    pub async fn put_trace(&self, id: &str, image_id: &str, doc: StrokeDocument) -> Result<TraceAck, ServiceError> {
        let lock = self.session(id)?;
        let mut s = lock.lock().await;
        let ds = self.dataset(&s.dataset_id)?.clone();
        let work = Self::open_image(&mut s, image_id)?;
        let available = ds.palette.len();
        if let Some(bad) = doc.strokes.iter().find(|st| st.value() != tracegrow_core::UNLABELED && usize::from(st.category) >= available)
        {
            return Err(ServiceError::UnknownCategory { category: bad.category, available });
        }
        let (w, h) = ds.dimensions(image_id).ok_or_else(|| ServiceError::UnknownImage(image_id.to_string()))?;
        let raster = raster_from_strokes(w, h, &doc.strokes)?;
        if !doc.strokes.is_empty() && work.first_stroke_at.is_none() {
            work.first_stroke_at = Some(self.inner.clock.seconds());
            work.first_stroke_unix_ms = Some(self.inner.clock.unix_millis());
        }
        let ack = TraceAck { image_id: image_id.to_string(), stroke_count: doc.strokes.len(), labeled_pixels: raster.labeled_count() };
        work.strokes = doc.strokes;
        work.trace = Some(raster);
        Ok(ack)
    }

    pub async fn refine_image(&self, id: &str, image_id: &str) -> Result<RefineResponse, ServiceError> {
        let lock = self.session(id)?;
        let mut s = lock.lock().await;
        let ds = self.dataset(&s.dataset_id)?.clone();
        let config = self.inner.engine.rgr_config(s.rng_seed);
        let work = Self::open_image(&mut s, image_id)?;
        let trace = match &work.trace {
            Some(t) if t.labeled_count() > 0 => t.clone(),
            _ => return Err(ServiceError::EmptyTrace(image_id.to_string())),
        };
        let ds2 = ds.clone();
        let img_id = image_id.to_string();
        let (refinement, png) = tokio::task::spawn_blocking(move || -> Result<_, ServiceError> {
            let image = ds2.rgb_image(&img_id)?;
            let r = refine(&image, &trace, &config).map_err(|e| match e {
                tracegrow_core::EngineError::EmptyTrace => ServiceError::EmptyTrace(img_id.clone()),
                other => other.into(),
            })?;
            let png = encode_mask_png(&r.mask, &ds2.palette)?;
            Ok((r, png))
        })
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))??;
        work.refine_count += 1;
        let response = RefineResponse {
            image_id: image_id.to_string(),
            width: refinement.mask.width(),
            height: refinement.mask.height(),
            refine_count: work.refine_count,
            mask_png: base64::engine::general_purpose::STANDARD.encode(&png),
            likelihood: LikelihoodSummary::of(&refinement),
        };
        work.mask = Some(refinement.mask);
        Ok(response)
    }

    pub async fn submit(&self, id: &str) -> Result<SubmitResponse, ServiceError> {
        let lock = self.session(id)?;
        let mut s = lock.lock().await;
        if !s.status.is_open() {
            return Err(ServiceError::BatchClosed(s.session_id.clone()));
        }
        let missing: Vec<String> = s.images.iter().filter(|w| w.mask.is_none()).map(|w| w.image_id.clone()).collect();
        if !missing.is_empty() {
            return Err(ServiceError::IncompleteBatch { missing });
        }
        let ds = self.dataset(&s.dataset_id)?.clone();
        let now = self.now();
        let categories: BTreeSet<u8> = (0..ds.palette.len() as u8).collect();
        let threshold = ds.manifest.checkpoint.threshold;

        let mut evaluations: Vec<Option<(IouReport64, ScoreReport64)>> = Vec::with_capacity(s.images.len());
        let mut passed = true;
        for w in &s.images {
            let gt = match (w.checkpoint, ds.ground_truth(&w.image_id)) {
                (true, Some(gt)) => gt,
                _ => {
                    evaluations.push(None);
                    continue;
                }
            };
            let mask = w.mask.as_ref().expect("checked above");
            let report: IouReport64 = iou(mask, gt.as_ref(), &categories)?;
            // Every verified image must clear the threshold on its own.
            passed &= checkpoint_gate(&report, threshold);
            let objects = ds.entry(&w.image_id).map_or(1, |e| e.object_count());
            let score = final_score(ScoreInput { mean_iou: report.mean_iou, elapsed: w.elapsed(now), objects })?;
            evaluations.push(Some((report, score)));
        }
        let scores: Vec<ScoreReport64> = evaluations.iter().flatten().map(|(_, sc)| sc.clone()).collect();

        if !passed {
            for w in &mut s.images {
                w.reset(now);
            }
            s.attempt += 1;
            s.status = BatchStatus::Failed;
            tracing::info!(session = %s.session_id, attempt = s.attempt, "batch failed, re-issued");
            return Ok(SubmitResponse { outcome: Outcome::Failed, scores, session: s.view(now) });
        }

        let submitted_at_ms = self.inner.clock.unix_millis();
        let mut submissions = Vec::with_capacity(s.images.len());
        for (w, eval) in s.images.iter().zip(evaluations) {
            let record_id = uuid::Uuid::new_v4().to_string();
            let png = encode_mask_png(w.mask.as_ref().expect("checked above"), &ds.palette)?;
            let (iou_report, score) = eval.map_or((None, None), |(i, sc)| (Some(i), Some(sc)));
            submissions.push((
                SubmissionRecord {
                    mask_file: format!("{SUBMISSIONS_DIR}/{record_id}.png"),
                    record_id,
                    dataset_id: s.dataset_id.clone(),
                    user_id: s.user_id.clone(),
                    session_id: s.session_id.clone(),
                    image_id: w.image_id.clone(),
                    iou: iou_report,
                    score,
                    elapsed_seconds: w.elapsed(now),
                    refine_count: w.refine_count,
                    attempt: s.attempt,
                    first_stroke_at_ms: w.first_stroke_unix_ms,
                    submitted_at_ms,
                },
                png,
            ));
        }
        let ds2 = ds.clone();
        tokio::task::spawn_blocking(move || ds2.persist(&submissions))
            .await
            .map_err(|e| ServiceError::Internal(e.to_string()))??;

        match self.assemble_batch(&s.user_id, &ds) {
            Ok(next) => {
                s.images = next;
                s.batch_number += 1;
                s.attempt = 0;
                s.status = BatchStatus::InProgress;
            }
            Err(ServiceError::InsufficientImages { .. }) => s.status = BatchStatus::Complete,
            Err(e) => return Err(e),
        }
        tracing::info!(session = %s.session_id, batch = s.batch_number, "batch passed");
        Ok(SubmitResponse { outcome: Outcome::Passed, scores, session: s.view(now) })
    }

    /// Raw bytes of a dataset image plus a content type.
    ///
    /// Without a dataset hint the id must be unique across datasets.
    pub fn image_file(&self, image_id: &str, dataset: Option<&str>) -> Result<(&'static str, Vec<u8>), ServiceError> {
        let unknown = || ServiceError::UnknownImage(image_id.to_string());
        let ds = match dataset {
            Some(d) => self.dataset(d)?,
            None => {
                let mut hits = self.inner.store.datasets().filter(|d| d.entry(image_id).is_some());
                let first = hits.next().ok_or_else(unknown)?;
                if hits.next().is_some() {
                    return Err(ServiceError::BadRequest(format!(
                        "image id {image_id} exists in several datasets; pass ?dataset="
                    )));
                }
                first
            }
        };
        let path = ds.image_path(image_id).ok_or_else(unknown)?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default().to_ascii_lowercase();
        let ctype = match ext.as_str() {
            "png" => "image/png",
            "jpg" | "jpeg" => "image/jpeg",
            "bmp" => "image/bmp",
            "gif" => "image/gif",
            _ => "application/octet-stream",
        };
        Ok((ctype, std::fs::read(path)?))
    }

    pub async fn export(&self, dataset_id: &str) -> Result<Vec<u8>, ServiceError> {
        let ds = self.dataset(dataset_id)?.clone();
        tokio::task::spawn_blocking(move || ds.export()).await.map_err(|e| ServiceError::Internal(e.to_string()))?
    }
}
