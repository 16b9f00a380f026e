use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinboson::info::info;
use spinboson::output::{with_sink, write_json, write_pairs, write_rows};
use spinboson::threshold::threshold;
use spinboson::verify::{verify, Level, VerifyOptions};
use spinboson::{parse_config, run_sweep, CliError, Format, Outcome, RunConfig};

#[derive(Parser)]
#[command(
    name = "spinboson",
    version,
    about = "Bound-state counting for the two-photon spin-boson model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration; every key is optional.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides `output.path`; stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Grid summary, coupling norms and the small-coupling threshold.
    Info(Common),
    /// One row per coupling constant.
    Sweep(Common),
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[cfg(debug_assertions)]
        #[arg(long, hide = true)]
        tamper_kernel: bool,
    },
    /// Scan the coupling upward for the onset of the strong-coupling regime.
    Threshold(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let path = &common.config;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(f) = common.format {
        cfg.output.format = f;
    }
    if let Some(p) = &common.out {
        cfg.output.path = Some(p.clone());
    }
    Ok(cfg)
}

fn emit_pairs<T: serde::Serialize>(
    cfg: &RunConfig,
    value: &T,
    pairs: &[(&str, String)],
) -> Result<(), CliError> {
    with_sink(cfg.output.path.as_deref(), |w| match cfg.output.format {
        Format::Json => write_json(value, w),
        Format::Csv => write_pairs(pairs, w),
    })
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Info(common) => {
            let cfg = load(&common)?;
            let r = info(&cfg)?;
            emit_pairs(&cfg, &r, &r.pairs())?;
        }
        Command::Sweep(common) => {
            let cfg = load(&common)?;
            let rows = run_sweep(&cfg)?;
            with_sink(cfg.output.path.as_deref(), |w| {
                write_rows(&rows, cfg.output.format, w)
            })?;
        }
        Command::Threshold(common) => {
            let cfg = load(&common)?;
            let r = threshold(&cfg)?;
            emit_pairs(&cfg, &r, &r.pairs())?;
        }
        Command::Verify {
            common,
            level,
            #[cfg(debug_assertions)]
            tamper_kernel,
        } => {
            let cfg = load(&common)?;
            #[allow(unused_mut)]
            let mut opts = VerifyOptions {
                level,
                ..VerifyOptions::default()
            };
            #[cfg(debug_assertions)]
            {
                opts.tamper_kernel = tamper_kernel;
            }
            let report = verify(&cfg, &opts)?;
            with_sink(cfg.output.path.as_deref(), |w| match cfg.output.format {
                Format::Json => write_json(&report.checks, w),
                Format::Csv => {
                    for line in report.lines() {
                        writeln!(w, "{line}")?;
                    }
                    Ok(())
                }
            })?;
            return Ok(report.outcome());
        }
    }
    Ok(Outcome::Success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    // Exit statuses are limited to 0, 1 and 2; an internal panic reports 2.
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(outcome)) => ExitCode::from(outcome.code() as u8),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
        Err(_) => ExitCode::from(2),
    }
}
