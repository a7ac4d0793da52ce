//! Single runs: simulate, then write every artifact into one directory.

use std::path::Path;

use extinct_core::output::{format_extinction, format_snapshot, format_trajectory, write_atomic};
use extinct_core::solver::{self, ComparisonMonitor, InvariantLog, RunOutput};
use serde::Serialize;

use crate::config::Setup;
use crate::error::CliError;
use crate::report::{certify, CertificateReport};

pub struct Completed {
    pub output: RunOutput,
    pub report: CertificateReport,
    /// Final-time max error against the manufactured solution.
    pub linf_error: Option<f64>,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    invariants: &'a InvariantLog,
    threshold: f64,
    comparison_tolerance: Option<f64>,
    final_t: f64,
    final_support_radius: f64,
    linf_error: Option<f64>,
}

/// Runs the simulation. Data certified against a power-cap profile are
/// monitored against it even without an explicit comparison section.
pub fn execute(setup: &Setup) -> Result<Completed, CliError> {
    let report = certify(setup);
    let mut config = setup.config.clone();
    if config.comparison.is_none() && report.admissible() {
        config.comparison = setup.certificate.map(ComparisonMonitor::new);
    }
    let output = solver::run(&config).map_err(CliError::Solver)?;
    let linf_error = setup.manufactured.map(|ms| {
        let t = output.final_state.t();
        output
            .final_state
            .values()
            .iter()
            .zip(config.grid.centers())
            .map(|(u, &r)| (u - ms.value(t, r)).abs())
            .fold(0.0, f64::max)
    });
    Ok(Completed { output, report, linf_error })
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    write_atomic(path, contents).map_err(CliError::Output)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// `trajectory.csv`, `snapshots/snapshot_NNNN.txt`, `extinction.json`,
/// `certificate.json` and `summary.json`.
pub fn write_outputs(dir: &Path, setup: &Setup, done: &Completed) -> Result<(), CliError> {
    let snap_dir = dir.join("snapshots");
    create_dir(&snap_dir)?;
    let out = &done.output;
    write(&dir.join("trajectory.csv"), format_trajectory(&out.records).as_bytes())?;
    for (k, state) in out.snapshots.iter().enumerate() {
        let text = format_snapshot(state, &setup.config.grid);
        write(&snap_dir.join(format!("snapshot_{k:04}.txt")), text.as_bytes())?;
    }
    write(
        &dir.join("extinction.json"),
        format_extinction(&out.extinction).map_err(CliError::Output)?.as_bytes(),
    )?;
    write(&dir.join("certificate.json"), to_json(&done.report)?.as_bytes())?;
    let summary = RunSummary {
        invariants: &out.invariants,
        threshold: out.threshold,
        comparison_tolerance: out.comparison_tolerance,
        final_t: out.final_state.t(),
        final_support_radius: out.records.last().map_or(0.0, |r| r.support_radius),
        linf_error: done.linf_error,
    };
    write(&dir.join("summary.json"), to_json(&summary)?.as_bytes())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Output(e.into()))
}
