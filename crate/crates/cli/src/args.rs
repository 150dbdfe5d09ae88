use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ebzip::{CompressorConfig, ElementWidth, ErrorBoundSpec};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "ebzip", version, about = "Error-bounded lossy compression for floating point grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress raw little-endian dumps into `.ebz` containers.
    Compress(CompressArgs),
    /// Restore raw dumps from `.ebz` containers.
    Decompress(DecompressArgs),
    /// Run an analysis and emit CSV.
    Analyze(AnalyzeArgs),
    /// Write a synthetic field as a raw dump.
    Generate(GenerateArgs),
}

/// Grid extents, fastest-varying axis first: `100x200` or `100,200`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

impl FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let dims = s
            .split(['x', 'X', ','])
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad extent {p:?} in dims {s:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        if dims.is_empty() || dims.len() > ebzip::grid::MAX_DIMS {
            return Err(format!("dims {s:?} must have 1 to {} extents", ebzip::grid::MAX_DIMS));
        }
        if dims.contains(&0) {
            return Err(format!("dims {s:?} contain a zero extent"));
        }
        Ok(Dims(dims))
    }
}

pub fn parse_width(s: &str) -> Result<ElementWidth, String> {
    s.parse::<u32>()
        .ok()
        .and_then(ElementWidth::from_bits)
        .ok_or_else(|| format!("width must be 32 or 64, got {s:?}"))
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    /// Prediction layers.
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    /// Quantization uses 2^m - 1 intervals.
    #[arg(long = "intervals-exp", default_value_t = 8)]
    pub intervals_exp: u32,
    #[arg(long = "abs-bound")]
    pub abs_bound: Option<f64>,
    /// Bound relative to the grid's value range.
    #[arg(long = "rel-bound")]
    pub rel_bound: Option<f64>,
    /// Hitting-rate threshold for warnings.
    #[arg(long, default_value_t = 0.9)]
    pub theta: f64,
}

impl CodecArgs {
    pub fn bound(&self) -> Result<ErrorBoundSpec, CliError> {
        if self.abs_bound.is_none() && self.rel_bound.is_none() {
            return Err(CliError::Usage("one of --abs-bound or --rel-bound is required".into()));
        }
        ErrorBoundSpec::new(self.abs_bound, self.rel_bound).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn config(&self) -> Result<CompressorConfig, CliError> {
        self.config_with(self.bound()?)
    }

    /// Config with an explicit bound; used by sweeps that override it.
    pub fn config_with(&self, bound: ErrorBoundSpec) -> Result<CompressorConfig, CliError> {
        let cfg = CompressorConfig::new(bound)
            .with_layers(self.layers)
            .with_interval_exponent(self.intervals_exp)
            .with_threshold(self.theta);
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompressArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub dims: Dims,
    #[arg(long, default_value = "32", value_parser = parse_width)]
    pub width: ElementWidth,
    #[command(flatten)]
    pub codec: CodecArgs,
    #[arg(long, env = "EBZIP_WORKERS", default_value = "1")]
    pub workers: NonZeroUsize,
    /// Retry at m + 2 (up to 16) while the hitting rate is below theta.
    #[arg(long = "auto-m")]
    pub auto_m: bool,
    /// Output directory; defaults to each input's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-file summary as CSV (`-` for stdout).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecompressArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, env = "EBZIP_WORKERS", default_value = "1")]
    pub workers: NonZeroUsize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Replace existing output files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeMode {
    BestLayer,
    IntervalSweep,
    RateDistortion,
    Metrics,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub mode: AnalyzeMode,
    /// Raw input grid (the original, for `metrics`).
    pub input: Option<PathBuf>,
    /// Use a synthetic field instead of an input file.
    #[arg(long, conflicts_with = "input")]
    pub generator: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub dims: Option<Dims>,
    #[arg(long, default_value = "32", value_parser = parse_width)]
    pub width: ElementWidth,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Layer counts for `best-layer`.
    #[arg(long = "layer-set", value_delimiter = ',', default_value = "1,2,3,4")]
    pub layer_set: Vec<usize>,
    /// Relative bounds for `interval-sweep` and `rate-distortion`.
    #[arg(long = "rel-bounds", value_delimiter = ',')]
    pub rel_bounds: Vec<f64>,
    /// Absolute bounds for `rate-distortion`.
    #[arg(long = "abs-bounds", value_delimiter = ',')]
    pub abs_bounds: Vec<f64>,
    /// Interval exponents for `interval-sweep`.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12,14,16")]
    pub exponents: Vec<u32>,
    /// Reconstructed grid for `metrics`.
    #[arg(long)]
    pub reconstructed: Option<PathBuf>,
    /// Container for `metrics`; gives the compressed size, and the
    /// reconstruction when `--reconstructed` is absent.
    #[arg(long)]
    pub container: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// constant, poly, sines, noise or spiky.
    pub generator: String,
    #[arg(long)]
    pub dims: Dims,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "32", value_parser = parse_width)]
    pub width: ElementWidth,
    #[arg(long)]
    pub out: PathBuf,
}
