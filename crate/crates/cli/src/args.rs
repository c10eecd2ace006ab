use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ife_core::{CurvatureConfig, Denominator, EntropyConfig, Method, Padding};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "ife", version, about = "Score, select and concatenate instructive feature channels")]
pub struct Cli {
    /// Worker threads for per-channel parallelism (0 = one per core).
    #[arg(long, global = true, env = "IFE_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Print one line per channel to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score every channel of a .npy tensor or PNG image.
    Score(ScoreArgs),
    /// Append the top-ratio channels to a tensor.
    Enhance(EnhanceArgs),
    /// Show selections for a list of ratios.
    Sweep(SweepArgs),
    /// Check the optimized kernels against the brute-force oracles.
    Selftest(SelftestArgs),
    /// Time scoring on a random tensor.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Curvature,
    Entropy,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DenominatorArg {
    /// (H + ext_k)·(W + ext_k)
    Literal,
    /// H·W, probabilities sum to one
    Exact,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaddingArg {
    Replicate,
    Zero,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct MethodArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Quantization levels (entropy only) [default: 256].
    #[arg(long)]
    pub bins: Option<usize>,

    /// Odd window size (entropy only) [default: 3].
    #[arg(long)]
    pub kernel_size: Option<usize>,

    /// Probability normalizer (entropy only) [default: literal].
    #[arg(long, value_enum)]
    pub denominator: Option<DenominatorArg>,

    /// Border handling (entropy supports replicate only) [default: replicate].
    #[arg(long, value_enum)]
    pub padding: Option<PaddingArg>,
}

impl MethodArgs {
    pub fn resolve(&self) -> Result<Method, CliError> {
        match self.method {
            MethodArg::Curvature => {
                let entropy_only = [
                    ("--bins", self.bins.is_some()),
                    ("--kernel-size", self.kernel_size.is_some()),
                    ("--denominator", self.denominator.is_some()),
                ];
                if let Some((flag, _)) = entropy_only.iter().find(|(_, set)| *set) {
                    return Err(CliError::Usage(format!("{flag} only applies to --method entropy")));
                }
                let padding = match self.padding {
                    Some(PaddingArg::Zero) => Padding::Zero,
                    _ => Padding::Replicate,
                };
                Ok(Method::Curvature(CurvatureConfig { padding }))
            }
            MethodArg::Entropy => {
                if self.padding == Some(PaddingArg::Zero) {
                    return Err(CliError::Usage("entropy windows always use replicate padding".into()));
                }
                let denominator = match self.denominator {
                    Some(DenominatorArg::Exact) => Denominator::ExactNormalize,
                    _ => Denominator::AlgorithmLiteral,
                };
                EntropyConfig::new(
                    self.bins.unwrap_or(EntropyConfig::DEFAULT_BINS),
                    self.kernel_size.unwrap_or(EntropyConfig::DEFAULT_KERNEL_SIZE),
                    denominator,
                )
                .map(Method::Entropy)
                .map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Input .npy tensor (C×H×W or H×W) or PNG image.
    pub input: PathBuf,

    #[command(flatten)]
    pub method: MethodArgs,

    /// Ratio used to mark selected channels in the report.
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,

    /// Report destination; stdout if omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Report format [default: csv for *.csv outputs, json otherwise].
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Accept f64 tensors by rounding them to f32.
    #[arg(long)]
    pub narrow_f64: bool,
}

#[derive(Args, Debug)]
pub struct EnhanceArgs {
    pub input: PathBuf,

    #[command(flatten)]
    pub method: MethodArgs,

    /// Proportion of channels to append, in [0, 1].
    #[arg(long)]
    pub ratio: f64,

    /// Enhanced .npy tensor.
    #[arg(short, long)]
    pub output: PathBuf,

    /// JSON report [default: <output stem>.report.json].
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[arg(long)]
    pub narrow_f64: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    pub input: PathBuf,

    #[command(flatten)]
    pub method: MethodArgs,

    /// Comma-separated ratios.
    #[arg(long, default_value = "0.5,0.75,1.0")]
    pub ratios: String,

    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    #[arg(long)]
    pub narrow_f64: bool,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Perturb the optimized results so every comparison must fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Tensor shape as CxHxW.
    #[arg(long, default_value = "64x224x224")]
    pub shape: String,

    #[arg(long, value_enum)]
    pub method: MethodArg,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `CxHxW`.
pub fn parse_shape(s: &str) -> Result<(usize, usize, usize), CliError> {
    let bad = || CliError::Usage(format!("shape {s:?} is not CxHxW"));
    let dims: Vec<usize> = s
        .split(['x', 'X'])
        .map(|d| d.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match dims[..] {
        [c, h, w] if c > 0 && h > 0 && w > 0 => Ok((c, h, w)),
        _ => Err(bad()),
    }
}

pub fn parse_ratios(s: &str) -> Result<Vec<f64>, CliError> {
    let ratios: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.parse::<f64>()
                .ok()
                .filter(|v| (0.0..=1.0).contains(v))
                .ok_or_else(|| CliError::Usage(format!("ratio {r:?} is not a number in [0, 1]")))
        })
        .collect::<Result<_, _>>()?;
    if ratios.is_empty() {
        return Err(CliError::Usage("empty ratio list".into()));
    }
    Ok(ratios)
}
