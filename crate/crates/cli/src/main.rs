//! `mann`: train, evaluate and apply multi-orientation 2D-PCA ensembles.
//!
//! Exit status is 0 on success, 1 when a run fails after its inputs were
//! accepted, and 2 for usage or input validation errors.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "mann",
    version,
    about = "Multi-orientation 2D-PCA features with a two-level neural network ensemble"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic PGM dataset and its manifest
    Synth(SynthArgs),
    /// Fit the projection bases and train both network levels
    Train(TrainArgs),
    /// Score a model and the combination baselines on a manifest
    Eval(EvalArgs),
    /// Classify a single PGM image
    Predict(PredictArgs),
    /// Describe a saved model
    Inspect(InspectArgs),
}

#[derive(Args)]
pub struct SynthArgs {
    /// Output directory for the images and manifest.csv
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub classes: usize,
    #[arg(long, default_value_t = 50)]
    pub per_class: usize,
    /// Image size as ROWSxCOLS
    #[arg(long, default_value = "16x16")]
    pub size: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Uniform noise amplitude added to every pixel
    #[arg(long, default_value_t = 0.15)]
    pub noise: f64,
}

/// Settings shared with the config file. Flags override file values.
#[derive(Args, Default)]
pub struct ConfigArgs {
    /// key = value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed for initialisation, shuffling and the train/test split
    #[arg(long)]
    pub seed: Option<String>,
    /// Axes per orientation: N, or column,row,diagonal,block
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub test_fraction: Option<String>,
    #[arg(long)]
    pub epochs: Option<String>,
    #[arg(long)]
    pub learning_rate: Option<String>,
    #[arg(long)]
    pub snn_hidden: Option<String>,
    #[arg(long)]
    pub cnn_hidden: Option<String>,
    /// Block grid as ROWSxCOLS
    #[arg(long)]
    pub block_grid: Option<String>,
}

#[derive(Args)]
pub struct TrainArgs {
    pub manifest: PathBuf,
    /// Where to write the model file
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Train on every manifest entry instead of holding out a test split
    #[arg(long)]
    pub no_split: bool,
    /// Worker threads for training independent networks
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    Test,
    Train,
    All,
}

#[derive(Args)]
pub struct EvalArgs {
    pub model: PathBuf,
    pub manifest: PathBuf,
    /// Part of the manifest to score; defaults to the model's held-out split
    #[arg(long, value_enum)]
    pub subset: Option<Subset>,
    /// Split fraction, overriding the one stored in the model
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Split seed, overriding the one stored in the model
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Comma-separated reliability coefficients; adds a Weighted row
    #[arg(long)]
    pub reliability: Option<String>,
    /// Tab-separated output
    #[arg(long)]
    pub tsv: bool,
    /// Also print confusion matrices
    #[arg(long)]
    pub confusion: bool,
    /// Write every method's per-image prediction to this TSV file
    #[arg(long)]
    pub dump_predictions: Option<PathBuf>,
}

#[derive(Args)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub image: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub tsv: bool,
}

#[derive(Args)]
pub struct InspectArgs {
    pub model: PathBuf,
}

/// A failed command and the exit status it maps to.
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

pub trait ResultExt<T> {
    /// Marks an error as a usage or input validation failure.
    fn usage(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ResultExt<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Predict(a) => commands::predict(a),
        Command::Inspect(a) => commands::inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
