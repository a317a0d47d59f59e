use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kcompound::NormKind;

#[derive(Debug, Parser)]
#[command(name = "kcompound", version, about = "Compound matrices, log norms and k-contraction certificates")]
pub struct Cli {
    /// Add wall-clock timing to the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplicative or additive k-compound of a matrix.
    Compound(CompoundArgs),
    /// Log norm of a matrix, or of its additive k-compound with --k.
    Lognorm(LognormArgs),
    /// k-shifted log norm tau_{p,k}.
    Tau(TauArgs),
    /// Run a k-contraction or stability certificate.
    Certify(CertifyArgs),
    /// Residuals of the duality identities.
    DualityCheck(DualityArgs),
    /// Seeded convergence experiment for a Hopfield network.
    Simulate(SimulateArgs),
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: kcompound::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Mult,
    Add,
}

#[derive(Debug, Args)]
pub struct CompoundArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Also write the compound to this file in the text matrix format.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LognormArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_norm)]
    pub p: NormKind,
    #[arg(long)]
    pub k: Option<usize>,
    /// Invertible n x n matrix T; the norm is |T x|.
    #[arg(long)]
    pub scaling: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = parse_norm)]
    pub p: NormKind,
    #[arg(long)]
    pub scaling: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Matrix,
    Hopfield,
    Ltv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodKind {
    Direct,
    Tau,
    TraceDominance,
    Smith,
    Hopfield,
    LocalStability,
    LiWang,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long, value_enum)]
    pub method: MethodKind,
    /// Required by every method except local-stability and li-wang.
    #[arg(long)]
    pub k: Option<usize>,
    /// Norm for direct, tau and local-stability (default inf).
    #[arg(long, value_parser = parse_norm)]
    pub p: Option<NormKind>,
    /// Required contraction rate.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Matrix file for --model matrix.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Model file for --model hopfield.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Positive diagonal weights for trace-dominance and hopfield.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Invertible scaling matrix for direct, tau and local-stability.
    #[arg(long)]
    pub scaling: Option<PathBuf>,
    /// Positive definite Q for smith (default identity).
    #[arg(long)]
    pub q: Option<PathBuf>,
    /// Constant theta for smith (default: smallest admissible per sample).
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Grid points per axis (hopfield) or time points (ltv).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the sampled state box for hopfield.
    #[arg(long = "box", default_value_t = 4.0)]
    pub half_width: f64,
    /// Use this many seeded random states instead of a grid.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Newton start for the equilibrium used by local-stability and li-wang.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub at: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Mult,
    Add,
    Exp,
    Mu,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub which: Identity,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Directory for per-trajectory CSV files.
    #[arg(long, env = "KCOMPOUND_OUT_DIR")]
    pub csv: Option<PathBuf>,
}
