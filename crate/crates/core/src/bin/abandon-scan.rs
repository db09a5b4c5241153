//! Command-line front end for the abandonment scan pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

use abandon_scan::config::RunConfig;
use abandon_scan::pipeline::{self, Stage};

#[derive(Parser)]
#[command(
    name = "abandon-scan",
    about = "Detect abandoned Internet resources from registry snapshots, WHOIS data, and BGP traces",
    version
)]
struct Cli {
    /// Path to the run configuration (TOML)
    #[arg(long, global = true, default_value = "scan.toml")]
    config: PathBuf,

    /// Reference date for all expiry and inactivity decisions (YYYY-MM-DD)
    #[arg(long, global = true)]
    epoch: Option<NaiveDate>,

    /// Never open network sockets; serve WHOIS answers from the cache only
    #[arg(long, global = true)]
    offline: bool,

    /// Output directory for pipeline products
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class object counts and contact-domain coverage for the latest snapshot
    Stats,
    /// Build maintainer groups, run the discard cascade, keep hijackable groups
    Group,
    /// Resolve contact-domain expiry status via WHOIS (cache-aware)
    Domains,
    /// Diff snapshots into a change-event log, filtering bulk registry updates
    Registry,
    /// Index BGP activity from MRT trace files
    Bgp,
    /// Combine all signals into per-group verdicts
    Classify,
    /// Write the consolidated run report from persisted products
    Report,
    /// Run every stage in order
    All,
}

impl Command {
    fn stages(&self) -> Vec<Stage> {
        match self {
            Command::Stats => vec![Stage::Stats],
            Command::Group => vec![Stage::Group],
            Command::Domains => vec![Stage::Domains],
            Command::Registry => vec![Stage::Registry],
            Command::Bgp => vec![Stage::Bgp],
            Command::Classify => vec![Stage::Classify, Stage::Report],
            Command::Report => vec![Stage::Report],
            Command::All => Stage::ALL.to_vec(),
        }
    }
}

fn run(cli: &Cli) -> abandon_scan::Result<()> {
    let mut config = RunConfig::from_toml_file(&cli.config)?;
    if let Some(epoch) = cli.epoch {
        config.epoch = epoch;
    }
    if cli.offline {
        config.offline = true;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    config.apply_env_overrides();

    let report = pipeline::run(&config, &cli.command.stages())?;
    eprintln!(
        "done: {} objects parsed, {} paragraphs skipped, products in {}",
        report.objects_parsed,
        report.paragraphs_skipped,
        config.out_dir.display()
    );
    if let Some(summary) = &report.summary {
        eprintln!(
            "verdicts: {} abandoned, {} expired-but-active, {} maintained, {} indeterminate",
            summary.abandoned_groups,
            summary.expired_but_active_groups,
            summary.maintained_groups,
            summary.indeterminate_groups
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
