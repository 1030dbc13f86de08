//! `vforge` — stage-oriented pipeline driver.
//!
//! Usage: `vforge <stage> --config pipeline.toml [--force] [--jobs N]`.
//! Stage outputs land under the configured `out_dir`, one directory per
//! stage, each with a `manifest.json` recording input checksums and the
//! config hash; re-running a stage with unchanged inputs is a no-op.
//!
//! Exit codes: 0 ok, 1 internal error, 2 missing input artifact, 3 invalid
//! configuration.

mod config;
mod error;
mod manifest;
mod stages;

use std::path::PathBuf;

use clap::Parser;

use config::PipelineConfig;
use error::CliError;
use stages::{run_stage, Stage, StageContext};

#[derive(Parser, Debug)]
#[command(name = "vforge", version, about = "Version-clique dataset pipeline")]
struct Cli {
    /// Pipeline stage to run.
    #[arg(value_enum)]
    stage: Stage,

    /// Pipeline configuration file.
    #[arg(long, default_value = "pipeline.toml")]
    config: PathBuf,

    /// Re-run the stage even when its manifest is up to date.
    #[arg(long)]
    force: bool,

    /// Worker thread cap for parallel sections.
    #[arg(long)]
    jobs: Option<usize>,

    /// Binary artist-graph cache location (overrides config and
    /// VFORGE_CACHE_DIR).
    #[arg(long)]
    artist_graph_cache: Option<PathBuf>,

    /// Label marking noise rows/columns for the eval stage (overrides
    /// eval.noise_label).
    #[arg(long)]
    noise_label: Option<String>,

    /// Exclude the query item itself from its candidate ranking (overrides
    /// eval.self_mask; defaults to true).
    #[arg(long)]
    self_mask: Option<bool>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let mut config = PipelineConfig::load(&cli.config)?;
    if cli.noise_label.is_some() {
        config.eval.noise_label = cli.noise_label.clone();
    }
    if cli.self_mask.is_some() {
        config.eval.self_mask = cli.self_mask;
    }
    let ctx = StageContext {
        config_hash: config.config_hash(),
        out_dir: config.out_dir(),
        config,
        force: cli.force,
        graph_cache_override: cli.artist_graph_cache,
    };
    let report = run_stage(cli.stage, &ctx)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
