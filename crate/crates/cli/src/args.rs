use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mfia::moments::{QGrid, ScaleSet, SpectrumMethod};
use mfia::pipeline::AnalysisConfig;
use mfia::MeasureKind;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "mfia", version, about = "Multifractal image analysis pipeline")]
pub struct Cli {
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true, env = "MFIA_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate multiplicative-cascade measures.
    Synth(SynthArgs),
    /// Extract feature vectors from a labeled directory tree.
    Analyze(AnalyzeArgs),
    /// Export one curve of one image as TSV.
    Spectrum(SpectrumArgs),
    /// Select pixels by Hölder exponent or spectrum value.
    Segment(SegmentArgs),
    /// Leave-one-out discriminant classification of a feature CSV.
    Classify(ClassifyArgs),
    /// One-way ANOVA per feature of a feature CSV.
    Anova(AnovaArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisOpts {
    /// Coarse-graining rule: sum, max or min.
    #[arg(long, default_value = "sum")]
    pub measure: MeasureKind,
    /// Moment orders as start:end:step or a comma list.
    #[arg(long = "q", default_value = "-5:5:0.25", allow_hyphen_values = true)]
    pub q: QGrid,
    /// Box sides of the moment route.
    #[arg(long, default_value = "2,4,8,16,32,64")]
    pub scales: ScaleSet,
    /// Odd window sides of the Hölder exponent map.
    #[arg(long, default_value = "1,3,5,7,9", value_delimiter = ',')]
    pub windows: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub bin_width: f64,
    /// Box sides for level-set dimensions.
    #[arg(long, default_value = "1,2,4,8,16,32")]
    pub hausdorff_sides: ScaleSet,
    /// Smallest accepted side of the centered dyadic crop.
    #[arg(long, default_value_t = 32)]
    pub min_side: usize,
}

impl AnalysisOpts {
    pub fn config(&self) -> CliResult<AnalysisConfig> {
        let cfg = AnalysisConfig {
            q_grid: self.q.clone(),
            scales: self.scales.clone(),
            windows: self.windows.clone(),
            bin_width: self.bin_width,
            hausdorff_sides: self.hausdorff_sides.clone(),
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if self.min_side < 2 {
            return Err(CliError::Usage(format!("--min-side must be at least 2, got {}", self.min_side)));
        }
        Ok(cfg)
    }

    /// Every parameter that can change a result, in a fixed order.
    pub fn echo(&self) -> CliResult<String> {
        Ok(format!(
            "measure={} {} min_side={}",
            self.measure.as_str(),
            self.config()?,
            self.min_side
        ))
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Four weights NW,NE,SW,SE summing to 1.
    #[arg(long, value_delimiter = ',', required = true)]
    pub weights: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Randomly permute the weights at every cell.
    #[arg(long)]
    pub shuffle: bool,
    /// MFM1 file, or a directory when --count is given.
    #[arg(long)]
    pub output: PathBuf,
    /// 8-bit PGM preview (single measure only).
    #[arg(long)]
    pub preview: Option<PathBuf>,
    /// Write this many measures with seeds seed, seed+1, …
    #[arg(long)]
    pub count: Option<usize>,
    /// File name prefix used with --count.
    #[arg(long, default_value = "cascade")]
    pub prefix: String,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory with one subdirectory per class.
    #[arg(long)]
    pub input: PathBuf,
    /// Feature CSV.
    #[arg(long)]
    pub output: PathBuf,
    /// Directory for per-image curve TSVs.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[command(flatten)]
    pub analysis: AnalysisOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Tau,
    Dq,
    Spectrum(SpectrumMethod),
}

impl std::str::FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tau" => Ok(CurveKind::Tau),
            "dq" => Ok(CurveKind::Dq),
            other => other.parse().map(CurveKind::Spectrum).map_err(|_| {
                format!("unknown curve `{other}` (tau, dq, chhabra, legendre, large-deviation, hausdorff)")
            }),
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Image (PGM/PNG) or MFM1 measure.
    #[arg(long)]
    pub input: PathBuf,
    /// tau, dq, chhabra, legendre, large-deviation or hausdorff.
    #[arg(long, default_value = "chhabra")]
    pub method: CurveKind,
    /// TSV path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub analysis: AnalysisOpts,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Mask PGM: 0 unselected, 255 selected.
    #[arg(long)]
    pub output: PathBuf,
    /// Select pixels whose f(α) is within --tol of this value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha_range")]
    pub f_target: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub tol: f64,
    /// Spectrum used for the f lookup.
    #[arg(long, default_value = "hausdorff")]
    pub spectrum: SpectrumMethod,
    /// Select pixels with α in lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_range: Option<String>,
    /// Source dimmed to half with selected pixels at 255.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// AMF1 export of the exponent map.
    #[arg(long)]
    pub alpha_map: Option<PathBuf>,
    /// 8-bit PGM preview of the exponent map.
    #[arg(long)]
    pub alpha_preview: Option<PathBuf>,
    #[command(flatten)]
    pub analysis: AnalysisOpts,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Feature CSV written by `analyze`.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma list of feature columns, or all, moments, map.
    #[arg(long, default_value = "all")]
    pub features: String,
    /// Restrict to two classes, as a:b.
    #[arg(long)]
    pub pair: Option<String>,
    /// Hold out together all images sharing the file-name prefix before the
    /// first `_` within a class.
    #[arg(long)]
    pub group_by_prefix: bool,
    /// Ridge factor relative to the mean covariance diagonal.
    #[arg(long, default_value_t = 1e-6)]
    pub ridge: f64,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnovaArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "all")]
    pub features: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
