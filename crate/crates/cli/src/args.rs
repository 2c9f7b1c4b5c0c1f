use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tvsense", version, about = "Detect an operating TV from audio clips and camera frames")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for independent clips and shots.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labelled synthetic corpus.
    Synth(SynthArgs),
    /// Dump per-window acoustic features of one WAV file as CSV.
    Features(FeaturesArgs),
    /// Train the acoustic SVM from a manifest.
    Train(TrainArgs),
    /// Classify audio clips; one JSON record per clip.
    Classify(ClassifyArgs),
    /// Run the visual detector on shots; one JSON record per shot.
    DetectVideo(DetectArgs),
    /// Fuse acoustic and visual records by clip id.
    Fuse(FuseArgs),
    /// Score detection records.
    Eval(EvalArgs),
    /// Sweep the audio rate or the frame count.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FusionArg {
    Or,
    And,
    Acoustic,
    Visual,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum IntersectionArg {
    Candidate,
    Bbox,
}

/// Controller knobs shared by the detection commands.
#[derive(Debug, Clone, Args)]
pub struct ControllerArgs {
    /// Audio rate in Hz; clips above it are downsampled.
    #[arg(long, default_value_t = 44_100)]
    pub rate: u32,

    /// Aggregation window in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,

    #[arg(long, default_value_t = 8)]
    pub frames_per_shot: usize,

    #[arg(long, value_enum, default_value_t = FusionArg::Or)]
    pub fusion: FusionArg,

    #[arg(long, value_enum, default_value_t = IntersectionArg::Candidate)]
    pub intersection_mode: IntersectionArg,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,

    /// Audio clips per class, e.g. `tv=5,laptop=5,conversation=5`.
    #[arg(long)]
    pub audio: Option<String>,

    /// Shots per class, e.g. `tv_screen=14,picture_frame=4`.
    #[arg(long)]
    pub visual: Option<String>,

    /// Clip length in seconds.
    #[arg(long, default_value_t = 30.0)]
    pub duration: f64,

    #[arg(long, default_value_t = 8)]
    pub frames_per_shot: usize,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    pub input: PathBuf,

    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Downsample to this rate first.
    #[arg(long)]
    pub rate: Option<u32>,

    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,

    #[arg(long)]
    pub model: PathBuf,

    #[arg(long, value_enum, default_value_t = KernelArg::Rbf)]
    pub kernel: KernelArg,

    #[arg(long, default_value_t = 10.0)]
    pub c: f64,

    /// RBF width; defaults to 1 / feature count.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Feature columns: `all`, `mfcc`, or names such as `zcr,ste`.
    #[arg(long, default_value = "all")]
    pub features: String,

    /// Downsample training clips to this rate first.
    #[arg(long)]
    pub rate: Option<u32>,

    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,

    /// Manifest of clips; mutually exclusive with `--input`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub manifest: Option<PathBuf>,

    /// A single WAV file.
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Manifest of shot directories; mutually exclusive with `--input`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub manifest: Option<PathBuf>,

    /// A single shot directory of `frame_NNNN.pgm` files.
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub acoustic: PathBuf,

    #[arg(long)]
    pub visual: PathBuf,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FusionArg::Or)]
    pub fusion: FusionArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Detection records (JSON lines) to score.
    #[arg(long, required_unless_present = "model", conflicts_with = "model")]
    pub records: Option<PathBuf>,

    /// Classify `--manifest` with this model and score the result.
    #[arg(long, requires = "manifest")]
    pub model: Option<PathBuf>,

    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Metric table destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub controller: ControllerArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(subcommand)]
    pub kind: SweepKind,
}

#[derive(Debug, Subcommand)]
pub enum SweepKind {
    /// Re-classify an audio manifest at each rate.
    AudioRate {
        #[arg(long)]
        model: PathBuf,

        #[arg(long)]
        manifest: PathBuf,

        #[arg(long, value_delimiter = ',', default_values_t = [4000, 8000, 16000, 44100])]
        rates: Vec<u32>,

        /// Retrain on this manifest at every rate instead of reusing `--model`.
        #[arg(long)]
        train_manifest: Option<PathBuf>,

        #[arg(long)]
        out: Option<PathBuf>,

        #[arg(long, default_value_t = 1.0)]
        window: f64,
    },
    /// Re-detect a visual manifest with shots truncated to each count.
    FrameCount {
        #[arg(long)]
        manifest: PathBuf,

        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
        counts: Vec<usize>,

        #[arg(long)]
        out: Option<PathBuf>,

        #[arg(long, value_enum, default_value_t = IntersectionArg::Candidate)]
        intersection_mode: IntersectionArg,
    },
}
