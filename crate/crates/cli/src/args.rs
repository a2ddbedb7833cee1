use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "marathon",
    version,
    about = "Annotation and alignment tools for multi-camera marathon footage"
)]
pub struct Cli {
    /// Print human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Write the result to this file instead of stdout.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a video manifest, runner results and annotations; print dataset statistics.
    Ingest(IngestArgs),
    /// List the source frame indices kept when sampling a 30 fps video at a lower rate.
    Subsample(SubsampleArgs),
    /// Pick score values whose distribution matches all locations (two-sample KS test).
    SampleLocations(SampleArgs),
    /// Densify keyframe tracks by linear interpolation.
    Interpolate(InterpolateArgs),
    /// Keep detections containing a path point and label them with the path's runner.
    Link(LinkArgs),
    /// Match predictions against ground truth; print P/R/F1 and the workload estimate.
    Evaluate(EvaluateArgs),
    /// Estimate every runner's passing time at every location, as CSV.
    Timeline(TimelineArgs),
    /// Bibs passing a location within a time window.
    AlignQuery(AlignQueryArgs),
    /// Rank gallery images by distance to a probe.
    ReidRank(ReidArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Video manifest (JSON array of container tags).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Official results CSV. Repeatable.
    #[arg(long)]
    pub runners: Vec<PathBuf>,
    /// Annotation document to check against the manifest. Repeatable.
    #[arg(long)]
    pub annotations: Vec<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["frames", "frame_dir"])))]
pub struct SubsampleArgs {
    /// Number of source frames.
    #[arg(long)]
    pub frames: Option<u32>,
    /// Directory of extracted frames (uses frames.txt when present).
    #[arg(long)]
    pub frame_dir: Option<PathBuf>,
    /// Target rate; must divide 30.
    #[arg(long)]
    pub fps: u32,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Location score table (CSV).
    #[arg(long)]
    pub scores: PathBuf,
    /// Number of score values to pick.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// KS coefficient c(alpha); 1.63 corresponds to alpha = 0.01.
    #[arg(long, default_value_t = 1.63)]
    pub c_alpha: f64,
    /// Seed for random search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random subsets to try.
    #[arg(long, default_value_t = 10_000)]
    pub iterations: u32,
    /// Try every subset instead of sampling.
    #[arg(long, conflicts_with_all = ["seed", "iterations"])]
    pub exhaustive: bool,
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    /// Annotation document.
    #[arg(long)]
    pub annotations: PathBuf,
    /// Only this runner (bib or LiRj).
    #[arg(long)]
    pub identity: Option<String>,
    /// Round coordinates half-up to whole pixels.
    #[arg(long)]
    pub round: bool,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    /// Path-supervision file: identity -> [[frame, x, y], ...].
    #[arg(long)]
    pub paths: PathBuf,
    /// Detector output: list of detections.
    #[arg(long)]
    pub detections: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth annotation document. Repeat once per video.
    #[arg(long, required = true)]
    pub gt: Vec<PathBuf>,
    /// Predictions for the matching --gt: a detection list or an annotation document.
    #[arg(long, required = true)]
    pub pred: Vec<PathBuf>,
    /// Restrict ground truth to this runner (bib or LiRj).
    #[arg(long)]
    pub identity: Option<String>,
    /// Per-action costs in seconds (JSON: removal_s, addition_s, adjustment_s, label_s).
    #[arg(long)]
    pub costs: Option<PathBuf>,
    /// Videos evaluated in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct TimelineArgs {
    /// Official results CSV. Repeatable.
    #[arg(long, required = true)]
    pub runners: Vec<PathBuf>,
    /// Location distances (CSV location_number,distance_km); default one per km.
    #[arg(long)]
    pub checkpoints: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlignQueryArgs {
    /// Official results CSV. Repeatable.
    #[arg(long, required = true)]
    pub runners: Vec<PathBuf>,
    /// Location distances; default one per km.
    #[arg(long)]
    pub checkpoints: Option<PathBuf>,
    /// Location number, 1 to 42.
    #[arg(long)]
    pub location: u8,
    /// Race time in seconds or H:MM:SS.
    #[arg(long)]
    pub t: String,
    /// Window half-width in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub dt: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("probe").required(true).args(["probe_feature", "probe_image"])))]
pub struct ReidArgs {
    /// Gallery file: [{image_id, label?, feature}].
    #[arg(long)]
    pub gallery: PathBuf,
    /// Probe feature vector (JSON array).
    #[arg(long)]
    pub probe_feature: Option<PathBuf>,
    /// Probe image (PNG or JPEG), embedded with the baseline extractor.
    #[arg(long)]
    pub probe_image: Option<PathBuf>,
    /// Crop box x_min,y_min,x_max,y_max applied to --probe-image.
    #[arg(long, requires = "probe_image", value_name = "X1,Y1,X2,Y2")]
    pub r#box: Option<String>,
    /// Number of matches.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, env = "PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "DATA_ROOT")]
    pub data_root: PathBuf,
    /// Default /alignment half-width in seconds.
    #[arg(long, env = "DELTA_T_DEFAULT", default_value_t = 60.0)]
    pub delta_t: f64,
    /// Maximum k for /reid/query.
    #[arg(long, env = "REID_TOP_K", default_value_t = 20)]
    pub reid_top_k: usize,
}
