mod args;
mod commands;
mod config;
mod manifest;
mod shards;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use markermine::Error;

use args::{Cli, Command};
use config::PipelineConfig;

fn version() -> &'static str {
    let text = format!(
        "{} (model DMLC v{}, tagger DMPT v{}, manifest v{}, report v{})",
        env!("CARGO_PKG_VERSION"),
        markermine::linclass::MODEL_FORMAT_VERSION,
        markermine::tagger::TAGGER_FORMAT_VERSION,
        markermine::datasets::MANIFEST_VERSION,
        markermine::analysis::REPORT_VERSION,
    );
    Box::leak(text.into_boxed_str())
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    if cli.deterministic {
        cfg.deterministic = true;
    }
    match &cli.command {
        Command::Filter(a) => commands::filter(cfg, a),
        Command::Discover(a) => commands::discover(cfg, a),
        Command::TaggerTrain(a) => commands::tagger_train(cfg, a),
        Command::LangidTrain(a) => commands::langid_train(cfg, a),
        Command::ClassifyTrain(a) => commands::classify_train(cfg, a),
        Command::ClassifyEval(a) => commands::classify_eval(cfg, a),
        Command::Kfold(a) => commands::kfold(cfg, a),
        Command::Build(a) => commands::build(cfg, a),
        Command::Shuffle(a) => commands::shuffle(cfg, a),
        Command::Stats(a) => commands::stats(cfg, a),
        Command::Report(a) => commands::report(cfg, a),
        Command::ExportEmbeddings(a) => commands::export_embeddings(cfg, a),
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().version(version()).get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
