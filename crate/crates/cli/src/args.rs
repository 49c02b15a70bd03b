use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tracegrow_core::RgrConfig64;

#[derive(Debug, Parser)]
#[command(name = "tracegrow", version, about = "Grow annotator scribbles into segmentation masks and score them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a trace into a mask and dump per-category likelihoods.
    Refine(RefineArgs),
    /// Rasterize a stroke document into an indexed trace PNG.
    Rasterize(RasterizeArgs),
    /// Per-image and aggregate IoU of predicted masks against ground truth.
    Eval(EvalArgs),
    /// Game score of one submission.
    Score(ScoreArgs),
    /// Per-pixel annotator agreement and majority mask.
    Consensus(ConsensusArgs),
    /// Run the annotation service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Share of labeled trace pixels sampled as seeds per iteration.
    #[arg(long, default_value_t = 0.75)]
    pub seed_fraction: f64,
    /// Monte Carlo iterations.
    #[arg(long, default_value_t = 8)]
    pub iterations: u32,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Color scale of the growing distance, in Lab units.
    #[arg(long, default_value_t = 20.0)]
    pub color_scale: f64,
    /// Spatial scale in pixels; a quarter of the longer side when omitted.
    #[arg(long)]
    pub spatial_scale: Option<f64>,
    /// Worker threads for the iterations.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl EngineArgs {
    pub fn config(&self) -> RgrConfig64 {
        RgrConfig64 {
            seed_fraction: self.seed_fraction,
            mc_iterations: self.iterations,
            color_scale: self.color_scale,
            spatial_scale: self.spatial_scale,
            rng_seed: self.rng_seed,
            threads: self.threads,
            ..RgrConfig64::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Stroke document (`.json`) or indexed trace PNG (255 = unlabeled).
    #[arg(long)]
    pub trace: PathBuf,
    /// Output mask (indexed PNG).
    #[arg(long, short)]
    pub out: PathBuf,
    /// Directory for `likelihood_<category>.png`, 16-bit, 65535 = every iteration.
    #[arg(long)]
    pub likelihood_dir: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct RasterizeArgs {
    #[arg(long)]
    pub strokes: PathBuf,
    /// Take the canvas size from this image.
    #[arg(long, conflicts_with_all = ["width", "height"])]
    pub like: Option<PathBuf>,
    #[arg(long, requires = "height")]
    pub width: Option<u32>,
    #[arg(long, requires = "width")]
    pub height: Option<u32>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Categories to evaluate; every non-void value present when omitted.
    #[arg(long, value_delimiter = ',')]
    pub categories: Option<Vec<u8>>,
    /// Adds a pass/fail column for each image's mean IoU.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Write the table here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub mean_iou: String,
    /// Seconds spent.
    #[arg(long)]
    pub elapsed: String,
    /// Objects annotated.
    #[arg(long, default_value_t = 1)]
    pub objects: u32,
    #[arg(long)]
    pub threshold: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConsensusArgs {
    #[arg(long)]
    pub masks: PathBuf,
    #[arg(long)]
    pub category: u8,
    /// Count image: 8-bit grayscale, or 16-bit above 255 annotators.
    #[arg(long)]
    pub out_counts: PathBuf,
    #[arg(long)]
    pub out_majority: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long, env = "TRACEGROW_DATA_ROOT")]
    pub data_root: Option<PathBuf>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long)]
    pub seed_fraction: Option<f64>,
    #[arg(long)]
    pub iterations: Option<u32>,
}
