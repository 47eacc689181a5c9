//! `tablealign` command-line driver.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tablealign::pipeline::{Mode, StageId};

#[derive(Debug, Parser)]
#[command(name = "tablealign", version, about = "Align, clean and score table structure annotations")]
struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "TABLEALIGN_THREADS", default_value_t = 0)]
    threads: usize,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the pipeline up to a stage and write one snapshot per stage.
    Process(ProcessArgs),
    /// Score predictions against ground truth.
    Evaluate(EvaluateArgs),
    /// Diversity and complexity statistics of a canonical file.
    Stats(StatsArgs),
    /// Draw one table's boxes as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct ProcessArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Last stage to run (a1..a6; a1..a3 in ICDAR mode).
    #[arg(long)]
    stage: StageId,
    #[arg(long)]
    out: PathBuf,
    /// TOML file with pipeline thresholds; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Defaults to `icdar` for ICDAR datasets and `standard` otherwise.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Unreadable records tolerated before exiting with status 2.
    #[arg(long, default_value_t = 0)]
    max_parse_failures: usize,
    #[command(flatten)]
    overrides: OptionOverrides,
}

#[derive(Debug, Args, Default)]
struct OptionOverrides {
    #[arg(long)]
    dot_leader_min_dots: Option<usize>,
    #[arg(long)]
    word_overlap_threshold: Option<f64>,
    #[arg(long)]
    word_coverage_threshold: Option<f64>,
    #[arg(long)]
    iteration_cap: Option<usize>,
    #[arg(long)]
    currency_glyphs: Option<String>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Ground truth, canonical JSON lines.
    #[arg(long)]
    gt: PathBuf,
    /// Predictions, canonical JSON lines.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also write stats.json and stats.txt here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    table: String,
    /// Comma separated: rows, columns, cells, words, header, projected.
    #[arg(long, default_value = "cells")]
    layers: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "standard" => Ok(Mode::Standard),
        "icdar" => Ok(Mode::Icdar),
        _ => Err(format!("unknown mode '{s}' (expected standard or icdar)")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Process(a) => commands::process(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Stats(a) => commands::stats(a),
        Command::Render(a) => commands::render(a),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
