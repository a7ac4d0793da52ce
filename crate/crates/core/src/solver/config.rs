use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{stable_dt_for_sup, RadialGrid, State};
use crate::error::{Error, Result};
use crate::initial_data::InitialData;
use crate::model::{check_supersolution_condition, ProblemParams, SupersolutionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Ghost value zero one cell beyond `R_max`.
    #[default]
    DirichletZero,
    /// No flux through `R_max`.
    NeumannZero,
}

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StepControl {
    /// CFL bound from the current sup norm.
    #[default]
    Adaptive,
    /// CFL bound from a fixed sup bound, giving the same step sequence for
    /// every run with the same config. The bound must dominate every state
    /// of the run (the initial sup suffices).
    Frozen { sup_bound: f64 },
}

/// Source term `f(t, r)` added explicitly after the diffusion sub-step.
#[derive(Clone)]
pub struct Forcing(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl Forcing {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, t: f64, r: f64) -> f64 {
        (self.0)(t, r)
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Forcing(..)")
    }
}

/// Supersolution monitored along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonMonitor {
    pub spec: SupersolutionSpec,
    /// Absolute tolerance on the margin; defaults to
    /// `1e-3 · A R^a · 512 / J`.
    pub tolerance: Option<f64>,
}

impl ComparisonMonitor {
    pub fn new(spec: SupersolutionSpec) -> Self {
        Self { spec, tolerance: None }
    }

    pub fn tolerance(&self, grid: &RadialGrid) -> f64 {
        self.tolerance
            .unwrap_or_else(|| default_comparison_tolerance(&self.spec, grid))
    }
}

/// `1e-3 · A R^a` at 512 cells, halving with each doubling of the grid.
pub fn default_comparison_tolerance(spec: &SupersolutionSpec, grid: &RadialGrid) -> f64 {
    1e-3 * spec.cap() * 512.0 / grid.cells() as f64
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub grid: RadialGrid,
    pub initial: InitialData,
    pub boundary: Boundary,
    /// Fraction of the monotonicity limit used per step, in `(0, 1)`.
    pub cfl: f64,
    /// Base extinction threshold; the effective value is
    /// `extinction_threshold · max(1, sup u₀)`.
    pub extinction_threshold: f64,
    pub t_max: f64,
    /// Time between recorded snapshots; non-positive or infinite records
    /// only the endpoints.
    pub snapshot_interval: f64,
    pub forcing: Option<Forcing>,
    pub comparison: Option<ComparisonMonitor>,
    pub step_control: StepControl,
    /// Keep the full state at every snapshot.
    pub keep_states: bool,
}

impl RunConfig {
    pub const DEFAULT_CFL: f64 = 0.4;
    pub const DEFAULT_EXTINCTION_THRESHOLD: f64 = 1e-12;

    pub fn new(params: ProblemParams, grid: RadialGrid, initial: InitialData) -> Self {
        Self {
            params,
            grid,
            initial,
            boundary: Boundary::default(),
            cfl: Self::DEFAULT_CFL,
            extinction_threshold: Self::DEFAULT_EXTINCTION_THRESHOLD,
            t_max: 1.0,
            snapshot_interval: f64::INFINITY,
            forcing: None,
            comparison: None,
            step_control: StepControl::default(),
            keep_states: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.dim() != self.grid.dim() {
            return Err(Error::InvalidConfig(format!(
                "problem dimension {} differs from grid dimension {}",
                self.params.dim(),
                self.grid.dim()
            )));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidConfig(format!("cfl = {} must lie in (0, 1)", self.cfl)));
        }
        if !(self.extinction_threshold > 0.0 && self.extinction_threshold.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "extinction threshold {} must be positive",
                self.extinction_threshold
            )));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_max = {} must be finite and non-negative", self.t_max)));
        }
        if self.snapshot_interval.is_nan() {
            return Err(Error::InvalidConfig("snapshot interval is NaN".into()));
        }
        if let Some(support) = self.initial.support_radius() {
            if support > self.grid.r_max() {
                return Err(Error::InvalidConfig(format!(
                    "initial support radius {support} exceeds the domain radius {}",
                    self.grid.r_max()
                )));
            }
        }
        if let StepControl::Frozen { sup_bound } = self.step_control {
            if !(sup_bound >= self.initial.sup_norm() && sup_bound.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "frozen sup bound {sup_bound} is below the initial sup {}",
                    self.initial.sup_norm()
                )));
            }
        }
        if let Some(monitor) = &self.comparison {
            let check = check_supersolution_condition(&monitor.spec, &self.params)?;
            if !check.holds {
                return Err(Error::Hypothesis(format!(
                    "comparison certificate fails with margin {}",
                    check.margin
                )));
            }
            if let Some(tol) = monitor.tolerance {
                if !(tol >= 0.0) {
                    return Err(Error::InvalidConfig(format!("comparison tolerance {tol} must be non-negative")));
                }
            }
        }
        Ok(())
    }

    /// Step size for `state`, capped at `remaining`.
    pub fn step_size(&self, state: &State, remaining: f64) -> f64 {
        let sup = match self.step_control {
            StepControl::Adaptive => state.sup(),
            StepControl::Frozen { sup_bound } => sup_bound,
        };
        stable_dt_for_sup(sup, &self.grid, &self.params, self.cfl, remaining)
    }
}
