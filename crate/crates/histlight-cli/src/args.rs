use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "histlight",
    version,
    about = "Low-light image enhancement by Retinex decomposition in the histogram domain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Enhance a low-light image and write the result as PNG
    Enhance(EnhanceArgs),
    /// Write the illumination/reflectance histograms and objective trace as CSV
    Decompose(DecomposeArgs),
    /// Time the pipeline stages across a sweep of resolutions
    Bench(BenchArgs),
    /// Compute PSNR/SSIM/LOE for an image pair or paired folders
    Metrics(MetricsArgs),
}

/// Model parameters shared by the pipeline commands. Every flag is
/// optional; unset values fall back to the config file, then to the
/// built-in defaults.
#[derive(Args, Clone)]
pub struct TuningFlags {
    /// Weight of the illumination fidelity term
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weight of the reflectance prior term
    #[arg(long)]
    pub beta: Option<f64>,
    /// Brightening exponent applied to the illumination locations (>= 1)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Number of gray levels l
    #[arg(long)]
    pub levels: Option<usize>,
    /// Convergence threshold on the squared histogram change
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Iteration cap T
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Which closed-form coordinate update to use
    #[arg(long, value_enum)]
    pub update_form: Option<UpdateFormArg>,
    /// Gradient operator for the reflectance prior histogram
    #[arg(long, value_enum)]
    pub gradient: Option<GradientArg>,
    /// TOML file supplying any of the tuning values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum UpdateFormArg {
    /// Denominators derived from the quadratic objective
    Gradient,
    /// Literal published denominators
    Paper,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum GradientArg {
    /// Forward differences |dx| + |dy|
    Forward,
    /// 3x3 Sobel magnitude
    Sobel,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
pub struct EnhanceArgs {
    /// Input image (PNG or JPEG)
    pub input: PathBuf,
    /// Output PNG path
    #[arg(short, long)]
    pub output: PathBuf,
    /// Optional JSON sidecar with parameters and iteration count
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: TuningFlags,
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Input image (PNG or JPEG)
    pub input: PathBuf,
    /// Output CSV with one row per bin (bin, illumination, reflectance)
    #[arg(short, long)]
    pub output: PathBuf,
    /// Objective-trace CSV (defaults to "<output stem>-trace.csv")
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: TuningFlags,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Source image; each benchmark resolution is a nearest-neighbor resize of it
    pub input: PathBuf,
    /// Report path (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value = "csv")]
    pub report: ReportFormat,
    /// Comma-separated resolutions, e.g. 100x100,200x200
    #[arg(long, value_delimiter = ',', default_value = "100x100,200x200,300x300,400x400,500x500,600x600,700x700,800x800,900x900,1000x1000")]
    pub resolutions: Vec<String>,
    /// Reference image for per-resolution PSNR/SSIM/LOE (resized alongside the input)
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Warn when the largest resolution's total time exceeds this budget
    #[arg(long, default_value_t = 5000)]
    pub budget_ms: u64,
    #[command(flatten)]
    pub tuning: TuningFlags,
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Reference image or folder
    pub reference: PathBuf,
    /// Candidate image or folder (paired with the reference by file name)
    pub candidate: PathBuf,
    /// Report path (stdout when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value = "csv")]
    pub report: ReportFormat,
}
