mod config;
mod driver;
mod error;
mod report;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Source;
use crate::error::CliError;

/// Radial simulator and extinction certificates for
/// `u_t = Δ(u^m) − |x|^σ u^q`.
#[derive(Debug, Parser)]
#[command(name = "extinct", version)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Record N evenly spaced snapshots over the horizon, overriding the
    /// configured interval.
    #[arg(long, global = true, value_name = "N")]
    snapshots: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one configuration and write all artifacts.
    Run { config: PathBuf },
    /// Run one simulation per value of a swept parameter.
    Sweep { sweep: PathBuf },
    /// Evaluate the certificates for a configuration without simulating.
    Certify { config: PathBuf },
    /// Print the extinction-time bound for a configuration.
    Oracle { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let say = |s: &str| {
        if !cli.quiet {
            print!("{s}");
        }
    };
    match &cli.command {
        Command::Run { config } => {
            let setup = Source::load(config)?.build(cli.snapshots)?;
            let done = driver::execute(&setup)?;
            driver::write_outputs(&cli.out, &setup, &done)?;
            let ext = &done.output.extinction;
            say(&report::summarize(&done.report));
            if ext.extinct {
                say(&format!(
                    "extinct in [{}, {}]\n",
                    ext.t_lower.unwrap_or(f64::NAN),
                    ext.t_upper.unwrap_or(f64::NAN)
                ));
            } else {
                say(&format!("no extinction up to t = {}\n", done.output.final_state.t()));
            }
            if let Some(err) = done.linf_error {
                say(&format!("max error against the manufactured solution: {err:e}\n"));
            }
            say(&format!("outputs written to {}\n", cli.out.display()));
        }
        Command::Sweep { sweep } => {
            let spec = sweep::SweepSpec::load(sweep)?;
            let out = if cli.out.as_os_str() == "out" {
                spec.out.clone().unwrap_or_else(|| cli.out.clone())
            } else {
                cli.out.clone()
            };
            let rows = sweep::run_sweep(&spec, &out, cli.snapshots)?;
            say(&sweep::format_summary(&rows));
            let failed: Vec<i32> = rows.iter().filter_map(|r| r.error.as_ref().map(|e| e.0)).collect();
            if !failed.is_empty() {
                return Err(CliError::SweepFailures {
                    failed: failed.len(),
                    total: rows.len(),
                    code: failed.into_iter().max().unwrap_or(1),
                });
            }
        }
        Command::Certify { config } => {
            let setup = Source::load(config)?.build(cli.snapshots)?;
            let report = report::certify(&setup);
            std::fs::create_dir_all(&cli.out).map_err(|source| CliError::Io {
                path: cli.out.clone(),
                source,
            })?;
            extinct_core::output::write_atomic(
                &cli.out.join("certificate.json"),
                driver::to_json(&report)?.as_bytes(),
            )
            .map_err(CliError::Output)?;
            say(&report::summarize(&report));
        }
        Command::Oracle { config } => {
            let src = Source::load(config)?;
            let setup = src.build(cli.snapshots)?;
            let report = report::certify(&setup);
            let section = report.certificate.as_ref().ok_or_else(|| {
                src.field_error("comparison", "", "the bound needs a comparison section or a power_cap IC")
            })?;
            match &section.t_bound {
                Some(bound) => println!("{}", driver::to_json(bound)?.trim_end()),
                None => {
                    return Err(src.field_error(
                        "ic",
                        "",
                        match section.admissibility {
                            Some(verdict) => format!("data are not certified ({verdict:?}), no bound"),
                            None => format!("data are not certified, no bound: {}", report.notes.join("; ")),
                        },
                    ))
                }
            }
        }
    }
    Ok(())
}
