//! Parameter sweeps: one independent run per value, executed on a worker
//! pool, summarized in a CSV sorted by the swept value.

use std::path::{Path, PathBuf};

use extinct_core::output::write_atomic;
use rayon::prelude::*;
use serde::Deserialize;

use crate::config::{ConfigFile, IcSection, Source};
use crate::driver::{execute, write_outputs};
use crate::error::CliError;

pub const SUMMARY_HEADER: &str = "value,extinct,t_lower,t_upper,t_bound,final_support_radius,linf_error,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Parameter {
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "m")]
    M,
    /// Amplitude of the comparison profile and of a power-cap IC.
    #[serde(rename = "A")]
    Amplitude,
    #[serde(rename = "R_max")]
    RMax,
    #[serde(rename = "J")]
    Cells,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Base {
    Inline(Box<ConfigFile>),
    Path(PathBuf),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub base: Base,
    pub parameter: Parameter,
    pub values: Vec<f64>,
    /// Output directory; `--out` takes precedence.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Source,
    pub parameter: Parameter,
    /// Sorted ascending.
    pub values: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: SweepFile = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{label}:{}:{}", e.line(), e.column()), e.to_string()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base = match file.base {
            Base::Inline(cfg) => Source {
                file: *cfg,
                label: format!("{label} (base)"),
                text: None,
                base_dir,
            },
            Base::Path(p) => Source::load(&base_dir.join(p))?,
        };
        if file.values.is_empty() {
            return Err(CliError::config(label, "field `values`: the sweep needs at least one value"));
        }
        if let Some(v) = file.values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::config(label, format!("field `values`: {v} is not finite")));
        }
        let mut values = file.values;
        values.sort_by(f64::total_cmp);
        Ok(Self {
            base,
            parameter: file.parameter,
            values,
            out: file.out,
        })
    }

    /// The base config with the swept parameter set to `value`.
    pub fn instance(&self, value: f64) -> Result<Source, CliError> {
        let mut src = self.base.clone();
        // Line lookups would point into the base text, not the sweep value.
        src.text = None;
        src.label = format!("{} [{:?} = {value}]", src.label, self.parameter);
        let f = &mut src.file;
        match self.parameter {
            Parameter::Sigma => f.problem.sigma = value,
            Parameter::Q => f.problem.q = value,
            Parameter::M => f.problem.m = value,
            Parameter::RMax => f.grid.r_max = value,
            Parameter::Cells => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(src.field_error("grid", "cells", format!("J = {value} is not a positive integer")));
                }
                f.grid.cells = value as usize;
            }
            Parameter::Amplitude => {
                let mut touched = false;
                if let Some(c) = f.comparison.as_mut() {
                    c.amplitude = value;
                    touched = true;
                }
                if let IcSection::PowerCap { amplitude, .. } = &mut f.ic {
                    *amplitude = value;
                    touched = true;
                }
                if !touched {
                    return Err(src.field_error(
                        "comparison",
                        "amplitude",
                        "sweeping A needs a comparison section or a power_cap IC",
                    ));
                }
            }
        }
        Ok(src)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Row {
    pub value: f64,
    pub extinct: Option<bool>,
    pub t_lower: Option<f64>,
    pub t_upper: Option<f64>,
    pub t_bound: Option<f64>,
    pub final_support_radius: Option<f64>,
    pub linf_error: Option<f64>,
    pub error: Option<(i32, String)>,
}

fn run_one(spec: &SweepSpec, index: usize, value: f64, out: &Path, snapshots: Option<u32>) -> Row {
    let mut row = Row { value, ..Row::default() };
    let result = spec.instance(value).and_then(|src| {
        let setup = src.build(snapshots)?;
        let done = execute(&setup)?;
        write_outputs(&out.join(format!("run_{index:03}")), &setup, &done)?;
        Ok(done)
    });
    match result {
        Ok(done) => {
            let out = &done.output;
            row.extinct = Some(out.extinction.extinct);
            row.t_lower = out.extinction.t_lower;
            row.t_upper = out.extinction.t_upper;
            row.t_bound = done.report.t_bound();
            row.final_support_radius = out.records.last().map(|r| r.support_radius);
            row.linf_error = done.linf_error;
        }
        Err(e) => {
            log::error!("sweep value {value}: {e}");
            row.error = Some((e.exit_code(), e.to_string()));
        }
    }
    row
}

/// Runs every value, writes `summary.csv` and returns the rows in order.
pub fn run_sweep(spec: &SweepSpec, out: &Path, snapshots: Option<u32>) -> Result<Vec<Row>, CliError> {
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let rows: Vec<Row> = spec
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| run_one(spec, i, v, out, snapshots))
        .collect();
    write_atomic(&out.join("summary.csv"), format_summary(&rows).as_bytes()).map_err(CliError::Output)?;
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn format_summary(rows: &[Row]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.value.to_string(),
            r.extinct.map_or(String::new(), |e| e.to_string()),
            opt(r.t_lower),
            opt(r.t_upper),
            opt(r.t_bound),
            opt(r.final_support_radius),
            opt(r.linf_error),
            r.error.as_ref().map_or(String::new(), |(_, msg)| quote(msg)),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_quotes_errors() {
        let rows = [
            Row { value: 0.5, extinct: Some(true), t_lower: Some(1.0), t_upper: Some(1.5), ..Row::default() },
            Row { value: 1.0, error: Some((2, "bad, \"very\"".into())), ..Row::default() },
        ];
        let csv = format_summary(&rows);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines[1], "0.5,true,1,1.5,,,,");
        assert_eq!(lines[2], "1,,,,,,,\"bad, \"\"very\"\"\"");
    }
}
