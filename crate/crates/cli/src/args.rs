//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

/// Default seed for every sampler.
pub const DEFAULT_SEED: u64 = 20_260_517;

#[derive(Debug, Parser)]
#[command(name = "pellip", version, about = "Batch experiments on p-ellipticity and bilinear embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for all randomized searches and test data.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,

    /// Worker threads for parameter sweeps; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ellipticity constants of a matrix or field.
    Ellipticity {
        #[arg(long)]
        spec: PathBuf,
        /// Exponent or start:stop:step.
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Convexity check of the Bellman function for a constant pair.
    Bellman {
        #[arg(long)]
        spec: PathBuf,
        /// Second matrix; defaults to the first.
        #[arg(long)]
        spec_b: Option<PathBuf>,
        #[arg(long, default_value = "4")]
        p: String,
        /// Number of random search seeds.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Discrete dissipativity functional on chirped Gaussians, plus identity residuals.
    Dissipativity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
        /// Cells per axis for matrix specs; field specs carry their own grid.
        #[arg(long, default_value_t = 128)]
        grid_cells: usize,
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
    },
    /// Cone-field counterexample over a range of gamma.
    Counterexample {
        #[arg(long, default_value_t = 40.0)]
        p: f64,
        #[arg(long, default_value = "0.5:0.99:0.01")]
        gamma_scan: String,
        #[arg(long, default_value_t = 256)]
        grid_cells: usize,
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
    },
    /// Bellman energy along two periodic heat flows.
    Heatflow {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        spec_b: Option<PathBuf>,
        #[arg(long, default_value = "4")]
        p: String,
        /// Cells per axis; defaults to 128 in one dimension and 16 in two.
        #[arg(long)]
        grid_cells: Option<usize>,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        extent: f64,
    },
    /// Norm of the heat semigroup at complex times and its tensor powers.
    Heatnorm {
        #[arg(long, default_value = "4")]
        p: String,
        /// Angle or start:stop:step.
        #[arg(long = "phi", visible_alias = "phi-grid", default_value = "0:1.5:0.1", allow_hyphen_values = true)]
        phi: String,
        /// Dimension for the tensorized norm.
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ellipticity { .. } => "ellipticity",
            Command::Bellman { .. } => "bellman",
            Command::Dissipativity { .. } => "dissipativity",
            Command::Counterexample { .. } => "counterexample",
            Command::Heatflow { .. } => "heatflow",
            Command::Heatnorm { .. } => "heatnorm",
        }
    }
}
