//! `mtvaug` command line: augmentation export, training, sweeps, and report
//! regeneration.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtvaug::experiment::synth::SynthConfig;

#[derive(Parser)]
#[command(name = "mtvaug", version, about = "Text augmentation and weighted-objective training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write augmented copies of a dataset to a new TSV file.
    Augment(AugmentArgs),
    /// Train one model and print its test accuracy.
    Train(TrainArgs),
    /// Run a strength x weight sweep grid and emit report files.
    Sweep(SweepArgs),
    /// Regenerate summary.json, curves.csv, and heatmap.csv from a runs.csv.
    Report(ReportArgs),
    /// Generate the synthetic benchmark corpus and its lexicon.
    GenSynthetic(GenSyntheticArgs),
}

#[derive(Args)]
struct AugmentArgs {
    /// Input dataset TSV (label<TAB>text per line).
    #[arg(long)]
    input: PathBuf,
    /// Synonym lexicon TSV (required for substitution and injection).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Stopword file; listed words are never substituted or injected.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// substitution | dropout | injection | shuffling
    #[arg(long)]
    operator: String,
    /// Augmentation strength in [0, 1].
    #[arg(long)]
    alpha: f64,
    /// Augmented copies per input example.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output TSV path.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Augmentation operator; omit for vanilla training.
    #[arg(long)]
    operator: Option<String>,
    /// Augmentation strength in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Weight of the original-data loss term in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    gamma_o: f64,
    /// logistic | hinge
    #[arg(long, default_value = "hinge")]
    loss: String,
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2_lambda: f64,
    /// Feature dimension.
    #[arg(long, default_value_t = 1 << 18)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rescale epochs so total updates match a baseline corpus of this size
    /// trained for --epochs epochs (static-corpus mode).
    #[arg(long)]
    equalize_updates: Option<usize>,
    /// Write the trained model here.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Comma-separated operator list.
    #[arg(long)]
    operators: Option<String>,
    /// Comma-separated strength grid.
    #[arg(long)]
    alphas: Option<String>,
    /// Comma-separated gamma_o grid.
    #[arg(long)]
    gammas: Option<String>,
    /// Comma-separated seed list.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2_lambda: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Output directory for runs.csv, summary.json, curves.csv, heatmap.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep cells.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Existing runs.csv.
    #[arg(long)]
    runs: PathBuf,
    /// Output directory for the regenerated aggregate files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenSyntheticArgs {
    /// Output directory for train.tsv, test.tsv, lexicon.tsv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = SynthConfig::default().train_size)]
    train_size: usize,
    #[arg(long, default_value_t = SynthConfig::default().test_size)]
    test_size: usize,
    /// Wrong-class probability for plain indicative tokens.
    #[arg(long, default_value_t = SynthConfig::default().noise)]
    noise: f64,
    #[arg(long, default_value_t = SynthConfig::default().seed)]
    seed: u64,
}

/// Errors split by exit code: usage problems exit 2, runtime failures exit 1.
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Augment(args) => commands::augment::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Report(args) => commands::report::run(args),
        Command::GenSynthetic(args) => commands::gen_synthetic::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
