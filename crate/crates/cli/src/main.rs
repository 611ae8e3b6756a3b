//! `phasenet`: corpus generation, spectral checks, training and ablations.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasenet_core::{InputMode, PhaseMode, ResampleKind, Split};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "phasenet",
    version,
    about = "Phase-spectrum analysis of resampling forgeries"
)]
struct Cli {
    /// Overrides the corpus and training seeds of the run configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory receiving every artifact of the command.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthetic forgery corpus.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Amplitude/phase views of a single image.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Phase and amplitude drift under repeated resampling.
    #[command(subcommand)]
    Fig1(Fig1Command),
    /// Numerical checks of the up-sampling identities.
    Verify(VerifyArgs),
    /// Train one classifier and save a checkpoint.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a corpus split.
    Eval(EvalArgs),
    /// RGB/RGBP × deep/shallow matrix over several seeds.
    Ablate(CorpusArgs),
    /// Held-out AUC against network depth.
    DepthSweep(DepthArgs),
    /// Mean phase-only image per forgery recipe.
    Fingerprint(FingerprintArgs),
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    /// Generate the corpus and write PNGs plus `manifest.json`.
    Build {
        /// Hold out bicubic forgeries for the test split.
        #[arg(long)]
        cross_distribution: bool,
        #[arg(long)]
        per_class: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum SpectrumCommand {
    /// Write log-amplitude, phase, amplitude-only and phase-only images.
    Decompose {
        image: PathBuf,
        #[arg(long)]
        phase_mode: Option<PhaseMode>,
    },
}

#[derive(Debug, Subcommand)]
enum Fig1Command {
    /// Mean/variance of spectral differences after t resampling round trips.
    Sweep {
        #[arg(long, default_value_t = 1000)]
        images: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value = "bilinear")]
        kind: ResampleKind,
        #[arg(long, default_value_t = 5)]
        max_t: usize,
        #[arg(long)]
        phase_mode: Option<PhaseMode>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyTarget {
    /// Spectral duplication under zero insertion.
    Eq2,
    /// Convolution theorem for circular convolution.
    Eq5,
    /// Distributive law of convolution.
    Theorem1,
    /// Constructive component counts against the predicted counts.
    Counts,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    target: VerifyTarget,
    /// Number of random cases.
    #[arg(long)]
    cases: Option<usize>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Corpus directory or manifest; generated from the configuration when absent.
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value = "rgbp")]
    input: InputMode,
    /// `shallow`, `deep` or a block count.
    #[arg(long, default_value = "shallow")]
    profile: String,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    split: Split,
}

#[derive(Debug, Args)]
struct DepthArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value = "rgbp")]
    input: InputMode,
    /// Comma-separated block counts; defaults to the configuration.
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct FingerprintArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    phase_mode: Option<PhaseMode>,
}

fn parse_split(s: &str) -> Result<Split, String> {
    Split::ALL
        .into_iter()
        .find(|split| split.name() == s)
        .ok_or_else(|| format!("unknown split `{s}` (expected train, val or test)"))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = RunConfig::load(cli.config.as_deref(), cli.seed)?;
    let out = cli.out_dir.as_path();
    std::fs::create_dir_all(out).map_err(|e| anyhow::anyhow!("cannot create {}: {e}", out.display()))?;
    match cli.command {
        Command::Corpus(CorpusCommand::Build {
            cross_distribution,
            per_class,
            size,
        }) => commands::corpus::build(&config, out, cross_distribution, per_class, size),
        Command::Spectrum(SpectrumCommand::Decompose { image, phase_mode }) => {
            commands::spectrum::decompose(&image, phase_mode.unwrap_or(config.train.phase_mode), out)
        }
        Command::Fig1(Fig1Command::Sweep {
            images,
            size,
            kind,
            max_t,
            phase_mode,
        }) => commands::spectrum::fig1(
            &config,
            out,
            images,
            size,
            kind,
            max_t,
            phase_mode.unwrap_or(config.train.phase_mode),
        ),
        Command::Verify(args) => commands::verify::run(args.target, args.cases, config.corpus.seed, out),
        Command::Train(args) => {
            commands::train::train(&config, out, args.corpus.corpus.as_deref(), args.input, &args.profile)
        }
        Command::Eval(args) => commands::train::eval(
            &config,
            out,
            &args.checkpoint,
            args.corpus.corpus.as_deref(),
            args.split,
        ),
        Command::Ablate(args) => commands::experiments::ablate(&config, out, args.corpus.as_deref()),
        Command::DepthSweep(args) => {
            commands::experiments::depth(&config, out, args.corpus.corpus.as_deref(), args.input, args.depths)
        }
        Command::Fingerprint(args) => commands::experiments::fingerprint(
            &config,
            out,
            args.corpus.corpus.as_deref(),
            args.phase_mode.unwrap_or(config.train.phase_mode),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
