use serde::Serialize;
use tracegrow_core::{LabelMask, Stroke, TraceRaster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchStatus {
    InProgress,
    Passed,
    Failed,
    /// Passed, and the dataset has nothing left for this user.
    Complete,
}

impl BatchStatus {
    pub fn is_open(self) -> bool {
        matches!(self, BatchStatus::InProgress | BatchStatus::Failed)
    }
}

/// Server-side state of one batch image.
#[derive(Debug, Clone)]
pub struct ImageWork {
    pub image_id: String,
    pub(crate) checkpoint: bool,
    pub strokes: Vec<Stroke>,
    pub trace: Option<TraceRaster>,
    pub mask: Option<LabelMask>,
    pub refine_count: u32,
    /// Time spent in earlier attempts at this image.
    pub carried_seconds: f64,
    pub first_stroke_at: Option<f64>,
    pub first_stroke_unix_ms: Option<u64>,
}

impl ImageWork {
    pub(crate) fn new(image_id: String, checkpoint: bool) -> Self {
        Self {
            image_id,
            checkpoint,
            strokes: Vec::new(),
            trace: None,
            mask: None,
            refine_count: 0,
            carried_seconds: 0.0,
            first_stroke_at: None,
            first_stroke_unix_ms: None,
        }
    }

    /// Accumulated seconds from first stroke to `now`.
    pub fn elapsed(&self, now: f64) -> f64 {
        self.carried_seconds + self.first_stroke_at.map_or(0.0, |t| (now - t).max(0.0))
    }

    /// Clears the drawing for a re-issued batch while keeping the time spent.
    pub(crate) fn reset(&mut self, now: f64) {
        self.carried_seconds = self.elapsed(now);
        self.first_stroke_at = None;
        self.strokes.clear();
        self.trace = None;
        self.mask = None;
    }
}

/// One annotator's progress through a dataset.
///
/// Deliberately not serializable: clients only ever see [`SessionView`].
#[derive(Debug, Clone)]
pub struct SessionState {
    pub session_id: String,
    pub user_id: String,
    pub dataset_id: String,
    pub rng_seed: u64,
    pub batch_number: u32,
    pub attempt: u32,
    pub status: BatchStatus,
    pub images: Vec<ImageWork>,
}

impl SessionState {
    pub fn image(&self, image_id: &str) -> Option<&ImageWork> {
        self.images.iter().find(|w| w.image_id == image_id)
    }

    pub(crate) fn image_mut(&mut self, image_id: &str) -> Option<&mut ImageWork> {
        self.images.iter_mut().find(|w| w.image_id == image_id)
    }

    /// Batch positions of the ground-truth images. Operator use only.
    pub fn checkpoint_positions(&self) -> Vec<usize> {
        self.images.iter().enumerate().filter(|(_, w)| w.checkpoint).map(|(i, _)| i).collect()
    }

    pub fn view(&self, now: f64) -> SessionView {
        SessionView {
            session_id: self.session_id.clone(),
            user_id: self.user_id.clone(),
            dataset_id: self.dataset_id.clone(),
            rng_seed: self.rng_seed,
            batch_number: self.batch_number,
            attempt: self.attempt,
            status: self.status,
            images: self
                .images
                .iter()
                .map(|w| ImageView {
                    image_id: w.image_id.clone(),
                    stroke_count: w.strokes.len(),
                    refine_count: w.refine_count,
                    refined: w.mask.is_some(),
                    elapsed_seconds: w.elapsed(now),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub user_id: String,
    pub dataset_id: String,
    pub rng_seed: u64,
    pub batch_number: u32,
    pub attempt: u32,
    pub status: BatchStatus,
    pub images: Vec<ImageView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageView {
    pub image_id: String,
    pub stroke_count: usize,
    pub refine_count: u32,
    pub refined: bool,
    pub elapsed_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elapsed_accumulates_across_resets() {
        let mut w = ImageWork::new("a".into(), false);
        assert_eq!(w.elapsed(10.0), 0.0);
        w.first_stroke_at = Some(10.0);
        assert_eq!(w.elapsed(25.0), 15.0);
        w.reset(25.0);
        assert_eq!(w.elapsed(100.0), 15.0);
        w.first_stroke_at = Some(100.0);
        assert_eq!(w.elapsed(110.0), 25.0);
    }

    #[test]
    fn view_omits_checkpoint_flag() {
        let s = SessionState {
            session_id: "s".into(),
            user_id: "u".into(),
            dataset_id: "d".into(),
            rng_seed: 1,
            batch_number: 0,
            attempt: 0,
            status: BatchStatus::InProgress,
            images: vec![ImageWork::new("x".into(), true), ImageWork::new("y".into(), false)],
        };
        assert_eq!(s.checkpoint_positions(), vec![0]);
        let v = s.view(0.0);
        let a = serde_json::to_value(&v.images[0]).unwrap();
        let b = serde_json::to_value(&v.images[1]).unwrap();
        let keys = |v: &serde_json::Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
        assert_eq!(keys(&a), keys(&b));
        assert!(!serde_json::to_string(&v).unwrap().contains("checkpoint"));
    }
}
