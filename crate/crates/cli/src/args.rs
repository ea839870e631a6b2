use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Lightfield coordinate, John-equation and Asgeirsson-identity checks.
#[derive(Debug, Parser)]
#[command(name = "lfcheck", version, about)]
pub struct Cli {
    /// Seed for every random draw (sample points, configurations, jitter).
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for the data-parallel loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Turn report tolerances into a pass/fail exit status (3 on failure).
    #[arg(long = "assert", global = true)]
    pub assert_mode: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a plenoptic raster of a Gaussian scene.
    Synth(SynthArgs),
    /// Finite-difference residuals of John's equation and its
    /// ultrahyperbolic form.
    CheckJohn(CheckJohnArgs),
    /// Circle-integral identities, continuous or on a polar pixel grid.
    CheckAsgeirsson(CheckAsgeirssonArgs),
    /// Resample a raster onto the polar grid.
    ToPolar(ToPolarArgs),
    /// Color-coded block layout and its footprint in the original raster.
    Colormap(ColormapArgs),
    /// Coordinate round trips on random rays.
    RoundtripCheck(RoundtripArgs),
}

#[derive(Debug, Args)]
pub struct SceneArg {
    /// Scene file (`a b c sigma amplitude` per line); defaults to the
    /// bundled three-blob fixture.
    #[arg(long)]
    pub scene: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub scene: SceneArg,
    #[arg(long)]
    pub geometry: PathBuf,
    /// Output PGM.
    #[arg(long)]
    pub out: PathBuf,
    /// Sample maxval of the output (255 or 65535).
    #[arg(long, default_value_t = 65535, value_parser = parse_maxval)]
    pub maxval: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    John,
    Ultrahyperbolic,
    Both,
}

#[derive(Debug, Args)]
pub struct CheckJohnArgs {
    #[command(flatten)]
    pub scene: SceneArg,
    /// Stencil steps; consecutive values are compared for the convergence
    /// ratio.
    #[arg(long = "h", num_args = 1.., default_values_t = [0.05, 0.025])]
    pub steps: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub n_points: usize,
    /// Points are drawn from [-extent, extent]^4.
    #[arg(long, default_value_t = 2.0)]
    pub extent: f64,
    #[arg(long, value_enum, default_value_t = Which::Both)]
    pub which: Which,
    /// Multiply every blob amplitude by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Continuous,
    Discrete,
}

#[derive(Debug, Args)]
pub struct PolarArgs {
    #[arg(long, default_value_t = 4)]
    pub r1max: usize,
    #[arg(long, default_value_t = 4)]
    pub r2max: usize,
    /// Ray-space length of one radial step.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Sub-samples per bin along each angle.
    #[arg(long, default_value_t = 1)]
    pub oversample: usize,
    /// Randomize sub-sample positions (seeded by --seed).
    #[arg(long)]
    pub jitter: bool,
}

#[derive(Debug, Args)]
pub struct CheckAsgeirssonArgs {
    #[command(flatten)]
    pub scene: SceneArg,
    #[arg(long, value_enum, default_value_t = Mode::Continuous)]
    pub mode: Mode,
    /// Discrete mode: read this polar archive instead of evaluating the
    /// scene on the polar grid.
    #[arg(long)]
    pub archive: Option<PathBuf>,
    /// Continuous mode: random configurations per theorem.
    #[arg(long, default_value_t = 20)]
    pub configs: usize,
    /// Continuous mode: nodes for the single-circle theorem.
    #[arg(long, default_value_t = 512)]
    pub n1: usize,
    /// Continuous mode: nodes per axis for the double-circle theorem.
    #[arg(long, default_value_t = 256)]
    pub n2: usize,
    #[arg(long, default_value_t = 2.0)]
    pub max_radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub center_extent: f64,
    #[command(flatten)]
    pub polar: PolarArgs,
    /// Discrete mode: also hold partially valid pairs to the tolerance.
    #[arg(long)]
    pub include_partial: bool,
    /// Largest accepted rel_diff under --assert [default: 1e-8 continuous,
    /// 5e-2 discrete].
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Positive,
    Negative,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    /// Override the geometry's shift (pixels).
    #[arg(long)]
    pub shift: Option<f64>,
    #[arg(long, value_enum, default_value_t = SignArg::Positive)]
    pub shift_sign: SignArg,
}

#[derive(Debug, Args)]
pub struct ToPolarArgs {
    #[arg(long)]
    pub raster: PathBuf,
    #[arg(long)]
    pub geometry: PathBuf,
    #[command(flatten)]
    pub polar: PolarArgs,
    #[command(flatten)]
    pub shift: ShiftArgs,
    /// Output polar archive.
    #[arg(long)]
    pub archive: PathBuf,
    /// Output block-layout image (PGM or PPM, following the raster).
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// One-pixel black lines between blocks in the layout image.
    #[arg(long)]
    pub separators: bool,
}

#[derive(Debug, Args)]
pub struct ColormapArgs {
    #[arg(long)]
    pub geometry: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub r1max: usize,
    #[arg(long, default_value_t = 7)]
    pub r2max: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1)]
    pub oversample: usize,
    #[command(flatten)]
    pub shift: ShiftArgs,
    /// Output PPM of the color-coded block layout.
    #[arg(long)]
    pub colormap: PathBuf,
    /// Output PPM of the sampled pixels in the original raster layout.
    #[arg(long)]
    pub original: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Ray components are drawn from [-extent, extent].
    #[arg(long, default_value_t = 100.0)]
    pub extent: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_maxval(s: &str) -> Result<u16, String> {
    match s {
        "255" => Ok(255),
        "65535" => Ok(65535),
        _ => Err(format!("expected 255 or 65535, got {s}")),
    }
}
