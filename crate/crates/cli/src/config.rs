//! JSON run configuration with sections `problem`, `grid`, `ic`, `run` and
//! the optional `comparison`.

use std::path::{Path, PathBuf};

use extinct_core::initial_data::InitialData;
use extinct_core::model::{corollary_constants, ProblemParams, SupersolutionSpec};
use extinct_core::oracles::ManufacturedSolution;
use extinct_core::solver::{Boundary, ComparisonMonitor, RadialGrid, RunConfig};
use extinct_core::Error;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: ProblemSection,
    pub grid: GridSection,
    pub ic: IcSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub comparison: Option<ComparisonSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub m: f64,
    pub q: f64,
    pub sigma: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub r_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IcSection {
    /// `min(A r^a, A R^a)`; without `radius` the smallness radius for
    /// `(a, amplitude)` is used.
    PowerCap {
        a: f64,
        amplitude: f64,
        radius: Option<f64>,
    },
    Flat {
        value: f64,
    },
    Gaussian {
        height: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    Annulus {
        height: f64,
        inner: f64,
        outer: f64,
    },
    /// Two-column text file, relative paths resolved against the config.
    Table {
        path: PathBuf,
    },
    /// `(1 − (r/R_max)²)₊²` with the source term that makes
    /// `(1 − t)₊ (1 − (r/R_max)²)₊²` exact.
    Manufactured,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub t_max: f64,
    pub cfl: f64,
    pub boundary: Boundary,
    pub extinction_threshold: f64,
    pub snapshot_interval: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            t_max: 1.0,
            cfl: RunConfig::DEFAULT_CFL,
            boundary: Boundary::default(),
            extinction_threshold: RunConfig::DEFAULT_EXTINCTION_THRESHOLD,
            snapshot_interval: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSection {
    pub a: f64,
    pub amplitude: f64,
    /// Defaults to the smallness radius for `(a, amplitude)`.
    pub radius: Option<f64>,
    pub tolerance: Option<f64>,
}

/// A parsed config plus what is needed to report errors against it.
#[derive(Debug, Clone)]
pub struct Source {
    pub file: ConfigFile,
    /// Label used in diagnostics, usually the path.
    pub label: String,
    /// Raw text, for locating fields by line.
    pub text: Option<String>,
    /// Directory that relative table paths resolve against.
    pub base_dir: PathBuf,
}

impl Source {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &path.display().to_string(), base_dir)
    }

    pub fn parse(text: &str, label: &str, base_dir: PathBuf) -> Result<Self, CliError> {
        let file = serde_json::from_str(text)
            .map_err(|e| CliError::config(format!("{label}:{}:{}", e.line(), e.column()), e.to_string()))?;
        Ok(Self {
            file,
            label: label.to_string(),
            text: Some(text.to_string()),
            base_dir,
        })
    }

    /// Config error pointing at `section.key`, with the line of that key
    /// when it can be found in the raw text.
    pub fn field_error(&self, section: &str, key: &str, message: impl std::fmt::Display) -> CliError {
        let location = match self.text.as_deref().and_then(|t| locate(t, section, key)) {
            Some(line) => format!("{}:{line}", self.label),
            None => self.label.clone(),
        };
        let field = if key.is_empty() { section.to_string() } else { format!("{section}.{key}") };
        CliError::config(location, format!("field `{field}`: {message}"))
    }

    pub fn build(&self, snapshots: Option<u32>) -> Result<Setup, CliError> {
        let f = &self.file;
        let p = &f.problem;
        let params = ProblemParams::new(p.m, p.q, p.sigma, p.dim).map_err(|e| match e {
            Error::InvalidParameter { name, .. } => self.field_error("problem", name, &e),
            other => self.field_error("problem", "", other),
        })?;
        let grid = RadialGrid::new(f.grid.r_max, f.grid.cells, p.dim).map_err(|e| match e {
            Error::InvalidParameter { name: "dim", .. } => self.field_error("problem", "dim", &e),
            Error::InvalidParameter { name, .. } => self.field_error("grid", name, &e),
            other => self.field_error("grid", "", other),
        })?;

        let mut manufactured = None;
        let mut ic_spec = None;
        let ic_err = |e: Error| self.field_error("ic", "", e);
        let initial = match &f.ic {
            IcSection::PowerCap { a, amplitude, radius } => {
                let radius = match radius {
                    Some(r) => *r,
                    None => corollary_constants(*a, *amplitude, &params).map_err(ic_err)?.radius,
                };
                ic_spec = SupersolutionSpec::new(*a, *amplitude, radius, &params).ok();
                InitialData::power_cap(*a, *amplitude, radius).map_err(ic_err)?
            }
            IcSection::Flat { value } => InitialData::flat(*value).map_err(ic_err)?,
            IcSection::Gaussian { height, width, center } => {
                InitialData::gaussian(*height, *width, *center).map_err(ic_err)?
            }
            IcSection::Annulus { height, inner, outer } => {
                InitialData::annulus(*height, *inner, *outer).map_err(ic_err)?
            }
            IcSection::Table { path } => {
                let full = self.base_dir.join(path);
                InitialData::load_table(&full).map_err(|e| self.field_error("ic", "path", format!("{}: {e}", full.display())))?
            }
            IcSection::Manufactured => {
                let ms = ManufacturedSolution::new(params, grid.r_max());
                manufactured = Some(ms);
                InitialData::table(grid.centers().iter().map(|&r| (r, ms.value(0.0, r))).collect())
                    .map_err(ic_err)?
            }
        };

        let comparison = match &f.comparison {
            Some(c) => {
                let cmp_err = |e: Error| self.field_error("comparison", "", e);
                let radius = match c.radius {
                    Some(r) => r,
                    None => corollary_constants(c.a, c.amplitude, &params).map_err(cmp_err)?.radius,
                };
                let spec = SupersolutionSpec::new(c.a, c.amplitude, radius, &params).map_err(cmp_err)?;
                Some(ComparisonMonitor { spec, tolerance: c.tolerance })
            }
            None => None,
        };

        let run = &f.run;
        let mut config = RunConfig::new(params, grid, initial);
        config.boundary = run.boundary;
        config.cfl = run.cfl;
        config.extinction_threshold = run.extinction_threshold;
        config.t_max = run.t_max;
        config.snapshot_interval = match snapshots {
            Some(0) => return Err(self.field_error("run", "snapshot_interval", "--snapshots must be positive")),
            Some(n) => run.t_max / n as f64,
            None => run.snapshot_interval.unwrap_or(f64::INFINITY),
        };
        config.forcing = manufactured.map(|ms| ms.forcing());
        config.comparison = comparison;
        config.keep_states = true;

        config.validate().map_err(|e| {
            let msg = e.to_string();
            let (section, key) = if msg.contains("support radius") {
                ("grid", "r_max")
            } else if msg.contains("cfl") {
                ("run", "cfl")
            } else if msg.contains("t_max") {
                ("run", "t_max")
            } else if msg.contains("threshold") {
                ("run", "extinction_threshold")
            } else if matches!(e, Error::Hypothesis(_)) || msg.contains("comparison") {
                ("comparison", "")
            } else {
                ("run", "")
            };
            self.field_error(section, key, msg)
        })?;

        Ok(Setup {
            certificate: comparison.map(|c| c.spec).or(ic_spec),
            config,
            manufactured,
        })
    }
}

/// A validated run plus the objects reported alongside it.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: RunConfig,
    /// The comparison spec if configured, else the one a power-cap IC
    /// defines.
    pub certificate: Option<SupersolutionSpec>,
    pub manufactured: Option<ManufacturedSolution>,
}

/// 1-based line of `"key"` inside the object introduced by `"section"`.
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let section_tag = format!("\"{section}\"");
    let key_tag = format!("\"{key}\"");
    let mut lines = text.lines().enumerate();
    let (start, first) = lines.find(|(_, l)| l.contains(&section_tag))?;
    if key.is_empty() {
        return Some(start + 1);
    }
    let rest = &first[first.find(&section_tag)? + section_tag.len()..];
    if rest.contains(&key_tag) {
        return Some(start + 1);
    }
    lines.find(|(_, l)| l.contains(&key_tag)).map(|(i, _)| i + 1)
}
